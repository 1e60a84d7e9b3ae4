# %% [markdown]
# # When can a restricted equal-throughput scheduler equalize rates?
#
# Two users sit close to the access point and two sit very far away. The
# scheduler may only serve users whose normalized SNR ranks 3rd or 4th. The
# far users need more slots than those ranks can give them once their channels
# are weak enough, and the rates stop equalizing.

# %%
import numpy as np

from swiptsched import FadingSpec, SystemParams, check, dbm_to_watt, order_et, run
from swiptsched.sched_sim import Policy

noise = float(dbm_to_watt(-96.0))
S_A = (3, 4)


def system(weak):
    gains = [1.0, 1.0, weak, weak]
    return SystemParams(1.0, noise, 0.5, [FadingSpec("rayleigh", g) for g in gains])


# %%
for weak in (1e-10, 1e-11):
    sys = system(weak)
    et = order_et(sys, S_A)
    report = check(et.p, S_A)
    print(f"weak gain {weak:g}: p = {np.round(et.p, 4)}, feasible = {report.feasible}")
    for v in report.violated:
        print(f"   {v.condition} on users {v.users}: {v.lhs:.4f} > {v.rhs:.4f}")

# %% [markdown]
# Simulating the scheduler confirms the verdicts: the feasible case converges
# to one common rate, the infeasible one splits into two groups.

# %%
for weak in (1e-10, 1e-11):
    res = run(system(weak), Policy.order_et(S_A), slots=200_000, seed=1)
    print(f"weak gain {weak:g}: rates {np.round(res.rates, 3)}, spread {100 * res.et_spread:.2f}%")
