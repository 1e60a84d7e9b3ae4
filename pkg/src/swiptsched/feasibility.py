"""Feasibility of equal throughput under an allowed-order set."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

import numpy as np

from .combinatorics import Combinations

__all__ = ["Violation", "FeasibilityReport", "check", "combination_bound", "SLACK"]

SLACK = 1e-12


@dataclass(frozen=True)
class Violation:
    condition: str  # "PerUserCap" or "CombinationCap"
    users: tuple
    lhs: float
    rhs: float


@dataclass(frozen=True)
class FeasibilityReport:
    feasible: bool
    violated: list = field(default_factory=list)
    borderline: list = field(default_factory=list)

    def __post_init__(self):
        if self.feasible != (not self.violated):
            raise ValueError("feasible must be True exactly when nothing is violated")

    def violations_at(self, L):
        return [v for v in self.violated if v.condition == "CombinationCap" and len(v.users) == L]


def combination_bound(N: int, size: int, L: int) -> float:
    """Largest total access probability any L users can receive when orders are limited to ``size`` ranks."""
    return (comb(N - 1, size - 1) * L + comb(L, size) * (1 - size)) / comb(N, size)


def check(p, s_a, N: int | None = None) -> FeasibilityReport:
    """Test whether access probabilities ``p`` are achievable with orders in ``s_a``.

    Users in the report are 1-based. Every violated inequality is listed;
    inequalities within ``1e3 * SLACK`` of their bound are listed as borderline.
    """
    p = np.asarray(p, dtype=float)
    N = len(p) if N is None else N
    if p.ndim != 1 or len(p) != N:
        raise ValueError(f"need a probability vector of length N={N}")
    if np.any(p < -SLACK) or abs(p.sum() - 1.0) > 1e-12 * max(1, N):
        raise ValueError(f"invalid probability vector (sum={p.sum()!r})")
    s_a = sorted(set(s_a))
    size = len(s_a)
    if size < 2:
        raise ValueError("the allowed order set needs at least two orders")
    if s_a[0] < 1 or s_a[-1] > N:
        raise ValueError(f"orders must lie in 1..{N}")

    violated, borderline = [], []

    def test(cond, users, lhs, rhs):
        if lhs > rhs + SLACK:
            violated.append(Violation(cond, users, float(lhs), float(rhs)))
        elif lhs > rhs - 1e3 * SLACK:
            borderline.append(Violation(cond, users, float(lhs), float(rhs)))

    cap = size / N
    for n in range(N):
        test("PerUserCap", (n + 1,), p[n], cap)
    for L in range(size, N + 1):
        rhs = combination_bound(N, size, L)
        for users in Combinations(N, L):
            test("CombinationCap", users, p[[u - 1 for u in users]].sum(), rhs)
    return FeasibilityReport(not violated, violated, borderline)
