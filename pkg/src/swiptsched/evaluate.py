"""Per-policy dispatch to the closed forms and to the quadrature oracle."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import closed_form as cf
from . import fading, oracle
from .combinatorics import DEFAULT_BUDGET
from .sched_sim import Policy
from .system import SystemParams

__all__ = ["PolicyMetrics", "closed_form_metrics", "oracle_metrics"]


@dataclass(frozen=True)
class PolicyMetrics:
    """Per-user rates and energies for one policy; ``p`` is set for the ET schemes."""

    rates: np.ndarray
    energies: np.ndarray
    p: np.ndarray | None = None


def _users(sys):
    return range(1, sys.N + 1)


def closed_form_metrics(sys: SystemParams, policy: Policy, budget: int = DEFAULT_BUDGET) -> PolicyMetrics:
    policy.validate(sys.N)
    k = policy.kind
    if k == "rr":
        m = [cf.rr_metrics(sys, n) for n in _users(sys)]
        return PolicyMetrics(np.array([x.rate for x in m]), np.array([x.energy for x in m]))
    if k == "conv_et":
        r = cf.conv_et(sys)
        return PolicyMetrics(np.full(sys.N, r.rate), r.energies, r.p)
    if k == "order_et":
        r = cf.order_et(sys, policy.s_a)
        return PolicyMetrics(np.full(sys.N, r.rate), r.energies, r.p)
    if k == "order_snr":
        m = [cf.order_snr_metrics(sys, policy.j, n, budget) for n in _users(sys)]
    else:
        m = [cf.order_nsnr_metrics(sys, policy.j, n) for n in _users(sys)]
    return PolicyMetrics(np.array([x.rate for x in m]), np.array([x.energy for x in m]))


def oracle_metrics(
    sys: SystemParams, policy: Policy, budget: int = DEFAULT_BUDGET, ricean_approx: bool = False
) -> PolicyMetrics:
    """Same quantities from direct integration (exact rates, exact Ricean cdf).

    With ``ricean_approx`` the order-based schemes integrate over the Weibull
    laws that the Ricean closed forms stand on instead. Rates and the
    order-SNR energy use the full equivalent law (idle energy still counted
    against the nominal mean); the normalized-scheme energies use its
    unit-mean shape. The two sides should then agree to quadrature accuracy.
    """
    policy.validate(sys.N)
    ricean = any(u.family == "ricean" and u.shape > 0 for u in sys.users)
    if ricean_approx and ricean and policy.kind not in ("rr", "conv_et"):
        equiv = [fading.ricean_equivalent_weibull(u) if u.family == "ricean" else u for u in sys.users]
        proxy = SystemParams(sys.power, sys.noise, sys.eta, equiv)
        m = oracle_metrics(proxy, policy, budget)
        if policy.kind == "order_snr":
            shift = sys.eta * sys.power * (sys.omegas - proxy.omegas)
            return PolicyMetrics(m.rates, m.energies + shift, m.p)
        unit = fading.FadingSpec("weibull", 1.0, equiv[0].shape)
        if policy.kind == "order_nsnr":
            e = oracle.orderstat_mean_iid(unit, sys.N, policy.j)
            return PolicyMetrics(m.rates, sys.eta * sys.power * sys.omegas * (1.0 - e / sys.N))
        mean_sum = sum(oracle.orderstat_mean_iid(unit, sys.N, j) for j in policy.s_a)
        energies = sys.eta * sys.power * sys.omegas * (1.0 - m.p / len(policy.s_a) * mean_sum)
        return PolicyMetrics(m.rates, energies, m.p)
    k, N = policy.kind, sys.N
    if k in ("rr", "conv_et"):
        full = np.array([oracle.fulltime_rate_integral(u, sys.gbar) for u in sys.users])
        if k == "rr":
            return PolicyMetrics(full / N, (1.0 - 1.0 / N) * sys.eta * sys.power * sys.omegas)
        rate = 1.0 / np.sum(1.0 / full)
        p = rate / full
        return PolicyMetrics(np.full(N, rate), (1.0 - p) * sys.eta * sys.power * sys.omegas, p)
    if k == "order_et":
        size = len(policy.s_a)
        sums = np.array([sum(oracle.rate_integral_nsnr(sys, j, n) for j in policy.s_a) for n in _users(sys)])
        mean_sum = sum(oracle.orderstat_mean_iid(sys.users[0], N, j) for j in policy.s_a)
        rate = 1.0 / np.mean(size / sums)
        p = 1.0 / np.array([np.sum(sums[n] / sums) for n in range(N)])
        energies = sys.eta * sys.power * sys.omegas * (1.0 - p / size * mean_sum)
        return PolicyMetrics(np.full(N, rate), energies, p)
    if k == "order_snr":
        rates = [oracle.rate_integral_order_snr(sys, policy.j, n, budget=budget) for n in _users(sys)]
        energies = [oracle.energy_integral_order_snr(sys, policy.j, n, budget=budget) for n in _users(sys)]
    else:
        rates = [oracle.rate_integral_nsnr(sys, policy.j, n) for n in _users(sys)]
        energies = [oracle.energy_integral_nsnr(sys, policy.j, n) for n in _users(sys)]
    return PolicyMetrics(np.array(rates), np.array(energies))
