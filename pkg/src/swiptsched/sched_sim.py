"""
Slot-level Monte Carlo of the scheduling policies.

Each slot draws one independent power gain per user. The scheduled user is
credited ``log2(1 + gbar h)`` bits per channel use; every other user harvests
``eta P h``. The ET schedulers pick the minimum moving-average throughput with
``beta = 1/t``, which makes the running average a scaled cumulative sum, so
the argmin is taken over cumulative credited rates. Ties go to the lowest
user index.

``run`` vectorizes the non-ET policies over whole batches and keeps a tight
Python loop for the ET ones. ``step`` advances a :class:`SimState` by one
slot and is the reference the fast path is tested against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from . import fading
from .system import SystemParams, UserMetrics

__all__ = ["Policy", "SimState", "SimResult", "gain_batches", "step", "run"]

_KINDS = ("rr", "conv_et", "order_snr", "order_nsnr", "order_et")


@dataclass(frozen=True)
class Policy:
    """A scheduler: ``kind`` plus its order ``j`` or allowed-order set ``s_a``."""

    kind: str
    j: int | None = None
    s_a: tuple | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown policy {self.kind!r}; expected one of {_KINDS}")
        if self.kind in ("order_snr", "order_nsnr") and (self.j is None or self.j < 1):
            raise ValueError(f"{self.kind} needs an order j >= 1")
        if self.kind == "order_et":
            if self.s_a is None or len(set(self.s_a)) < 2:
                raise ValueError("order_et needs at least two allowed orders")
            object.__setattr__(self, "s_a", tuple(sorted(set(self.s_a))))

    @classmethod
    def rr(cls):
        return cls("rr")

    @classmethod
    def conv_et(cls):
        return cls("conv_et")

    @classmethod
    def order_snr(cls, j):
        return cls("order_snr", j=j)

    @classmethod
    def order_nsnr(cls, j):
        return cls("order_nsnr", j=j)

    @classmethod
    def order_et(cls, s_a):
        return cls("order_et", s_a=tuple(s_a))

    def validate(self, N):
        if self.j is not None and self.j > N:
            raise ValueError(f"order j={self.j} exceeds N={N}")
        if self.s_a is not None and (self.s_a[0] < 1 or self.s_a[-1] > N):
            raise ValueError(f"allowed orders {self.s_a} must lie in 1..{N}")

    def __str__(self):
        if self.j is not None:
            return f"{self.kind}(j={self.j})"
        if self.s_a is not None:
            return f"{self.kind}(S_a={{{','.join(map(str, self.s_a))}}})"
        return self.kind


@dataclass
class SimState:
    """Running totals after ``t`` slots plus the generator; arrays are 0-based by user."""

    N: int
    rng: np.random.Generator = field(default_factory=np.random.default_rng)
    t: int = 0
    rate_sum: np.ndarray = field(default=None)
    energy_sum: np.ndarray = field(default=None)
    access: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.rate_sum is None:
            self.rate_sum = np.zeros(self.N)
        if self.energy_sum is None:
            self.energy_sum = np.zeros(self.N)
        if self.access is None:
            self.access = np.zeros(self.N, dtype=np.int64)

    @classmethod
    def start(cls, sys: SystemParams, seed=None):
        return cls(sys.N, np.random.default_rng(seed))

    @property
    def moving_average(self):
        """``r_n(t)`` with ``beta = 1/t``: the running mean of credited rates."""
        return self.rate_sum / max(self.t, 1)


@dataclass(frozen=True)
class SimResult:
    policy: Policy
    slots: int
    seed: int | None
    rates: np.ndarray
    energies: np.ndarray
    rate_se: np.ndarray
    energy_se: np.ndarray
    access: np.ndarray
    eligible: np.ndarray | None = None

    @property
    def metrics(self):
        return [UserMetrics(float(r), float(e)) for r, e in zip(self.rates, self.energies)]

    @property
    def conditional_access(self):
        """Scheduling frequency given the user's N-SNR order is allowed (order-based ET only)."""
        if self.eligible is None:
            return None
        return self.access * self.slots / np.maximum(self.eligible, 1)

    @property
    def sum_rate(self):
        return float(self.rates.sum())

    @property
    def total_energy(self):
        return float(self.energies.sum())

    @property
    def et_spread(self):
        """``(max - min) / mean`` of the per-user rates."""
        return float((self.rates.max() - self.rates.min()) / self.rates.mean())


def _ranks(x):
    # 1-based ascending rank of each entry along axis 1
    return np.argsort(np.argsort(x, axis=1, kind="stable"), axis=1, kind="stable") + 1


def gain_batches(sys: SystemParams, rng: np.random.Generator, slots: int, batch: int) -> Iterator[np.ndarray]:
    """Yield ``(b, N)`` gain matrices covering ``slots`` slots, drawn user by user."""
    done = 0
    while done < slots:
        b = min(batch, slots - done)
        yield np.column_stack([fading.sample(u, rng, b) for u in sys.users])
        done += b


def _select(sys, policy, h, state):
    N = sys.N
    if policy.kind == "rr":
        return int(state.t % N)
    if policy.kind == "order_snr":
        return int(np.argsort(h, kind="stable")[policy.j - 1])
    x = h / sys.omegas
    if policy.kind == "order_nsnr":
        return int(np.argsort(x, kind="stable")[policy.j - 1])
    if policy.kind == "conv_et":
        eligible = np.arange(N)
    else:
        rank = np.argsort(np.argsort(x, kind="stable"), kind="stable") + 1
        eligible = np.flatnonzero(np.isin(rank, policy.s_a))
    return int(eligible[np.argmin(state.rate_sum[eligible])])


def step(state: SimState, sys: SystemParams, policy: Policy, h=None):
    """Advance one slot.

    Draws the gains from ``state.rng`` unless ``h`` is given. Returns the
    1-based scheduled user and the per-user instantaneous rate and energy.
    """
    if h is None:
        h = np.array([fading.sample(u, state.rng) for u in sys.users], dtype=float)
    h = np.asarray(h, dtype=float)
    n = _select(sys, policy, h, state)
    energy = sys.eta * sys.power * h
    energy[n] = 0.0
    rate = np.zeros(sys.N)
    rate[n] = math.log2(1.0 + sys.gbar * h[n])
    state.energy_sum += energy
    state.rate_sum += rate
    state.access[n] += 1
    state.t += 1
    return n + 1, rate, energy


def _batch_selection(sys, policy, h, t0, rate_sum, eligible_count):
    """0-based scheduled user per slot for one batch; updates ``rate_sum`` for ET."""
    b, N = h.shape
    if policy.kind == "rr":
        return (t0 + np.arange(b)) % N
    if policy.kind == "order_snr":
        return np.argsort(h, axis=1, kind="stable")[:, policy.j - 1]
    x = h / sys.omegas
    if policy.kind == "order_nsnr":
        return np.argsort(x, axis=1, kind="stable")[:, policy.j - 1]
    rates = np.log2(1.0 + sys.gbar * h).tolist()
    if policy.kind == "conv_et":
        eligible = [list(range(N))] * b
    else:
        mask = np.isin(_ranks(x), policy.s_a)
        eligible_count += mask.sum(axis=0)
        eligible = [np.flatnonzero(row).tolist() for row in mask]
    cum = rate_sum.tolist()
    pick = cum.__getitem__
    sel = np.empty(b, dtype=np.int64)
    for t in range(b):
        # min keeps the first (lowest-index) minimizer
        n = min(eligible[t], key=pick)
        cum[n] += rates[t][n]
        sel[t] = n
    rate_sum[:] = cum
    return sel


def run(
    sys: SystemParams,
    policy: Policy,
    slots: int = 10**6,
    seed: int | None = None,
    batches: int = 100,
) -> SimResult:
    """Simulate ``slots`` slots; standard errors come from ``batches`` batch means."""
    policy.validate(sys.N)
    if slots < 1:
        raise ValueError("slots must be positive")
    rng = np.random.default_rng(seed)
    N = sys.N
    batches = max(1, min(batches, slots))
    size = -(-slots // batches)
    rate_sum = np.zeros(N)
    rate_means, energy_means = [], []
    access = np.zeros(N, dtype=np.int64)
    energy_total = np.zeros(N)
    eligible = np.zeros(N, dtype=np.int64)
    t0 = 0
    for h in gain_batches(sys, rng, slots, size):
        b = h.shape[0]
        before = rate_sum.copy()
        sel = _batch_selection(sys, policy, h, t0, rate_sum, eligible)
        scheduled = np.zeros((b, N), dtype=bool)
        scheduled[np.arange(b), sel] = True
        if policy.kind in ("conv_et", "order_et"):
            batch_rate = rate_sum - before
        else:
            batch_rate = np.where(scheduled, np.log2(1.0 + sys.gbar * h), 0.0).sum(axis=0)
            rate_sum += batch_rate
        batch_energy = sys.eta * sys.power * np.where(scheduled, 0.0, h).sum(axis=0)
        energy_total += batch_energy
        access += scheduled.sum(axis=0)
        rate_means.append(batch_rate / b)
        energy_means.append(batch_energy / b)
        t0 += b
    rm, em = np.array(rate_means), np.array(energy_means)
    k = len(rm)
    se = (lambda a: a.std(axis=0, ddof=1) / math.sqrt(k)) if k > 1 else (lambda a: np.full(N, np.nan))
    return SimResult(
        policy=policy,
        slots=slots,
        seed=seed,
        rates=rate_sum / slots,
        energies=energy_total / slots,
        rate_se=se(rm),
        energy_se=se(em),
        access=access / slots,
        eligible=eligible if policy.kind == "order_et" else None,
    )
