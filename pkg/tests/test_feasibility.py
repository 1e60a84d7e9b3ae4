import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _support import make_system
from swiptsched import closed_form as cf
from swiptsched.feasibility import FeasibilityReport, Violation, check, combination_bound

probability_vectors = st.integers(2, 7).flatmap(
    lambda N: st.lists(st.floats(0.01, 1.0), min_size=N, max_size=N).map(lambda w: np.array(w) / np.sum(w))
)


@settings(max_examples=80, deadline=None)
@given(p=probability_vectors)
def test_full_order_set_always_feasible(p):
    assert check(p, range(1, len(p) + 1)).feasible


@settings(max_examples=80, deadline=None)
@given(p=probability_vectors, data=st.data())
def test_combination_cap_never_binds_at_L_equal_N(p, data):
    N = len(p)
    size = data.draw(st.integers(2, N))
    s_a = data.draw(st.lists(st.integers(1, N), min_size=size, max_size=size, unique=True))
    rep = check(p, s_a)
    assert not rep.violations_at(N)
    assert combination_bound(N, len(set(s_a)), N) == pytest.approx(1.0, abs=1e-15)


@settings(max_examples=60, deadline=None)
@given(p=probability_vectors, data=st.data())
def test_permutation_equivariance(p, data):
    N = len(p)
    perm = data.draw(st.permutations(range(N)))
    s_a = [N - 1, N] if N > 2 else [1, 2]
    a, b = check(p, s_a), check(p[list(perm)], s_a)
    assert a.feasible == b.feasible
    # relabel b's users back through the permutation
    back = lambda users: tuple(sorted(perm[u - 1] + 1 for u in users))  # noqa: E731
    assert sorted((v.condition, tuple(sorted(v.users))) for v in a.violated) == sorted(
        (v.condition, back(v.users)) for v in b.violated
    )


def test_equal_split_is_feasible_for_any_set():
    for N in range(2, 7):
        p = np.full(N, 1 / N)
        for size in range(2, N + 1):
            for s_a in itertools.combinations(range(1, N + 1), size):
                assert check(p, s_a).feasible


def test_per_user_cap():
    rep = check([0.7, 0.1, 0.1, 0.1], [3, 4])
    assert not rep.feasible
    assert any(v.condition == "PerUserCap" and v.users == (1,) for v in rep.violated)


def test_two_weak_user_reference_vectors():
    ok = check([0.0884, 0.0884, 0.4116, 0.4116], [3, 4])
    assert ok.feasible
    bad = check([0.0603, 0.0603, 0.4397, 0.4397], [3, 4])
    assert not bad.feasible
    assert [v.users for v in bad.violations_at(2)] == [(3, 4)]
    assert bad.violated[0].rhs == pytest.approx(5 / 6)


@pytest.mark.parametrize("weak,verdict", [(1e-10, True), (1e-11, False)])
def test_two_weak_user_verdicts_from_closed_forms(weak, verdict):
    p = cf.order_et(make_system("rayleigh", 1, [1, 1, weak, weak]), [3, 4]).p
    assert check(p, [3, 4]).feasible is verdict


def test_borderline_is_flagged():
    # L = 2 bound for N = 4, |S_a| = 2 is exactly 5/6
    p = np.array([1 / 12, 1 / 12, 5 / 12, 5 / 12])
    rep = check(p, [3, 4])
    assert rep.feasible
    assert any(v.users == (3, 4) for v in rep.borderline)


@pytest.mark.parametrize(
    "p,s_a", [([0.5, 0.6], [1, 2]), ([1.2, -0.2], [1, 2]), ([0.5, 0.5], [1]), ([0.5, 0.5], [1, 3])]
)
def test_invalid_inputs(p, s_a):
    with pytest.raises(ValueError):
        check(p, s_a)


def test_report_invariant():
    with pytest.raises(ValueError):
        FeasibilityReport(True, [Violation("PerUserCap", (1,), 1.0, 0.5)])


@pytest.mark.slow
@pytest.mark.parametrize("weak,feasible", [(1e-10, True), (1e-11, False)])
def test_simulated_spread_follows_verdict(weak, feasible):
    from swiptsched import sched_sim
    from swiptsched.sched_sim import Policy

    sys = make_system("rayleigh", 1, [1, 1, weak, weak])
    res = sched_sim.run(sys, Policy.order_et([3, 4]), 10**6, seed=11)
    assert (res.et_spread < 0.01) is feasible
