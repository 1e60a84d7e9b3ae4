"""
Index-set families behind the order-statistic expansions.

Each family is an immutable description with a closed-form ``cardinality``;
iterating it streams the tuples lazily. Users are 1-based throughout to match
the way the sums are written.

=================  ==========================================================
``Permutations``   (i_1..i_{N-1}) of {1..N}\\{n}; first j-1 and last N-j sorted
``Unr``            r-subsets of the first j-1 slots followed by the last N-j
``Smr``            exponent tuples in {0..m-1}^count
``Iml``            compositions (i_0..i_{m-1}) of l into m non-negative parts
``Combinations``   L-subsets of {1..N}
=================  ==========================================================
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb
from typing import Iterator

__all__ = [
    "DEFAULT_BUDGET",
    "BudgetExceeded",
    "Permutations",
    "Unr",
    "Smr",
    "Iml",
    "Combinations",
    "enumerate_family",
]

DEFAULT_BUDGET = 10**8


class BudgetExceeded(RuntimeError):
    """The expansion is too large to sum; use the quadrature oracle instead."""

    def __init__(self, predicted, budget, what="index set"):
        self.predicted = predicted
        self.budget = budget
        super().__init__(
            f"{what} has {predicted} terms, over the budget of {budget}; "
            "raise the budget or evaluate the defining integral with swiptsched.oracle"
        )


def _check_order(j, N):
    if not (N >= 1 and 1 <= j <= N):
        raise ValueError(f"need 1 <= j <= N, got j={j}, N={N}")


@dataclass(frozen=True)
class Permutations:
    n: int
    j: int
    N: int

    def __post_init__(self):
        _check_order(self.j, self.N)
        if not 1 <= self.n <= self.N:
            raise ValueError(f"user index {self.n} outside 1..{self.N}")

    @property
    def cardinality(self):
        return comb(self.N - 1, self.j - 1)

    def __iter__(self) -> Iterator[tuple]:
        others = [i for i in range(1, self.N + 1) if i != self.n]
        for head in itertools.combinations(others, self.j - 1):
            hs = set(head)
            yield head + tuple(i for i in others if i not in hs)


@dataclass(frozen=True)
class Unr:
    n: int
    j: int
    r: int
    N: int

    def __post_init__(self):
        _check_order(self.j, self.N)
        if not 0 <= self.r <= self.j - 1:
            raise ValueError(f"need 0 <= r <= j-1, got r={self.r}, j={self.j}")

    @property
    def cardinality(self):
        return comb(self.N - 1, self.j - 1) * comb(self.j - 1, self.r)

    @property
    def length(self):
        return self.N - self.j + self.r

    def __iter__(self):
        k = self.j - 1
        for perm in Permutations(self.n, self.j, self.N):
            tail = perm[k:]
            for c in itertools.combinations(perm[:k], self.r):
                yield c + tail


@dataclass(frozen=True)
class Smr:
    m: int
    count: int

    @property
    def cardinality(self):
        return self.m**self.count

    def __iter__(self):
        return itertools.product(range(self.m), repeat=self.count)


@dataclass(frozen=True)
class Iml:
    m: int
    l: int  # noqa: E741

    @property
    def cardinality(self):
        return comb(self.l + self.m - 1, self.m - 1)

    def __iter__(self):
        return _compositions(self.l, self.m)


def _compositions(total, parts):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@dataclass(frozen=True)
class Combinations:
    N: int
    L: int

    @property
    def cardinality(self):
        return comb(self.N, self.L)

    def __iter__(self):
        return itertools.combinations(range(1, self.N + 1), self.L)


def enumerate_family(family, budget: int = DEFAULT_BUDGET):
    """Stream the tuples of ``family`` after checking its size against ``budget``."""
    size = family.cardinality
    if size > budget:
        raise BudgetExceeded(size, budget, what=type(family).__name__)
    return iter(family)
