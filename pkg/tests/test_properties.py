"""Structural identities that hold for every family; runnable on its own."""

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _support import make_system
from swiptsched import closed_form as cf
from swiptsched import fading, oracle, sched_sim
from swiptsched.evaluate import oracle_metrics
from swiptsched.feasibility import check
from swiptsched.sched_sim import Policy

FAMILIES = [("rayleigh", 1), ("nakagami", 2), ("nakagami", 3), ("weibull", 1.5), ("weibull", 3.0), ("ricean", 6.0)]
ids = [f"{f}-{s}" for f, s in FAMILIES]


@pytest.mark.parametrize("family,shape", FAMILIES, ids=ids)
@pytest.mark.parametrize("N", [2, 3, 5])
def test_nsnr_rates_mix_to_fulltime_rate(family, shape, N):
    sys = make_system(family, shape, [k * 1e-5 for k in range(1, N + 1)])
    for n in (1, N):
        total = sum(oracle.rate_integral_nsnr(sys, j, n) for j in range(1, N + 1))
        assert total == pytest.approx(oracle.fulltime_rate_integral(sys.user(n), sys.gbar), rel=1e-8)
        cf_total = sum(cf.order_nsnr_rate(sys, j, n) for j in range(1, N + 1))
        # exact for Rayleigh; high-SNR forms elsewhere (Ricean also carries the Marcum step)
        tol = {"rayleigh": 1e-10, "ricean": 5e-3}.get(family, 1e-6)
        assert cf_total == pytest.approx(cf.fulltime_rate(sys.user(n), sys), rel=tol)


@pytest.mark.parametrize("family,shape", FAMILIES, ids=ids)
@pytest.mark.parametrize("N", [1, 2, 4, 7])
def test_order_statistic_means_sum_to_N(family, shape, N):
    spec = fading.FadingSpec(family, 1.0, shape)
    means = [cf.order_statistic_mean(spec, N, j) for j in range(1, N + 1)]
    assert sum(means) == pytest.approx(N, rel=1e-10)
    assert all(b > a for a, b in zip(means, means[1:]))
    if family != "ricean":
        for j in (1, N):
            assert means[j - 1] == pytest.approx(oracle.orderstat_mean_iid(spec, N, j), rel=1e-7)


@pytest.mark.parametrize("family,shape", FAMILIES, ids=ids)
def test_exact_order_statistic_means_monotone(family, shape):
    spec = fading.FadingSpec(family, 1.0, shape)
    means = [oracle.orderstat_mean_iid(spec, 5, j) for j in range(1, 6)]
    assert all(b > a for a, b in zip(means, means[1:]))
    assert sum(means) == pytest.approx(5.0, rel=1e-8)


@pytest.mark.parametrize("family,shape", FAMILIES, ids=ids)
@pytest.mark.parametrize("N", [2, 4])
def test_full_order_set_et_is_conventional_et(family, shape, N):
    sys = make_system(family, shape, [k * 1e-5 for k in range(1, N + 1)])
    full, conv = Policy.order_et(range(1, N + 1)), Policy.conv_et()
    a, b = oracle_metrics(sys, full), oracle_metrics(sys, conv)
    np.testing.assert_allclose(a.p, b.p, rtol=1e-8)
    np.testing.assert_allclose(a.energies, b.energies, rtol=1e-8)
    np.testing.assert_allclose(a.rates, b.rates, rtol=1e-8)
    # closed forms: exact for Rayleigh, high-SNR rates elsewhere, Marcum step for Ricean
    x, y = cf.order_et(sys, range(1, N + 1)), cf.conv_et(sys)
    tol = {"rayleigh": 1e-10, "ricean": 5e-3}.get(family, 1e-6)
    assert x.rate == pytest.approx(y.rate, rel=tol)
    np.testing.assert_allclose(x.energies, y.energies, rtol=tol)


@pytest.mark.parametrize("family,shape", FAMILIES + [("ricean", 0.5), ("weibull", 0.7)])
@pytest.mark.parametrize("omega", [1.0, 3e-5])
def test_pdf_integrates_to_one(family, shape, omega):
    spec = fading.FadingSpec(family, omega, shape)
    upper = fading.tail_point(spec)
    val = oracle.quad(lambda x: float(fading.pdf(spec, x)), upper, (omega,))
    assert val == pytest.approx(1.0, abs=1e-9)
    mean = oracle.quad(lambda x: x * float(fading.pdf(spec, x)), upper, (omega,))
    assert mean == pytest.approx(omega, rel=1e-8)


@pytest.mark.parametrize("family,shape", FAMILIES, ids=ids)
def test_order_statistic_densities(family, shape):
    users = [fading.FadingSpec(family, o, shape) for o in (1.0, 2.0, 5.0)]
    upper = max(fading.tail_point(u) for u in users)
    xs = np.linspace(0.01, 8.0, 17)
    stacked = sum(oracle.orderstat_pdf_ind(users, j, xs) for j in (1, 2, 3))
    np.testing.assert_allclose(stacked, sum(fading.pdf(u, xs) for u in users), rtol=1e-10)
    for j in (1, 3):
        val = oracle.quad(lambda x: float(np.sum(oracle.orderstat_pdf_ind(users, j, x))), upper, (1.0, 5.0))
        assert val == pytest.approx(1.0, abs=1e-8)
    unit = fading.normalized(users[0])
    for j in (1, 2, 3):
        assert oracle.quad(lambda x: float(oracle.orderstat_pdf_iid(unit, 3, j, x)), 60.0, (1.0,)) == pytest.approx(
            1.0, abs=1e-9
        )


class TestFamilyReductions:
    reductions = [("ricean", 0.0), ("weibull", 1.0), ("nakagami", 1)]

    @pytest.mark.parametrize("family,shape", reductions)
    def test_distributions_coincide(self, family, shape):
        a, b = fading.FadingSpec(family, 2e-5, shape), fading.rayleigh(2e-5)
        x = np.linspace(0, 2e-4, 41)
        np.testing.assert_allclose(fading.pdf(a, x), fading.pdf(b, x), rtol=1e-12)
        np.testing.assert_allclose(fading.cdf(a, x), fading.cdf(b, x), rtol=1e-12, atol=1e-15)

    @pytest.mark.parametrize("family,shape", reductions)
    def test_closed_form_energies_coincide(self, family, shape):
        omegas = [1e-5, 2e-5, 4e-5]
        a, b = make_system(family, shape, omegas), make_system("rayleigh", 1, omegas)
        for j, n in itertools.product((1, 2, 3), (1, 2, 3)):
            assert cf.order_snr_energy(a, j, n) == pytest.approx(cf.order_snr_energy(b, j, n), rel=1e-10)
            assert cf.order_nsnr_energy(a, j, n) == pytest.approx(cf.order_nsnr_energy(b, j, n), rel=1e-10)
        np.testing.assert_allclose(cf.order_et(a, [2, 3]).energies, cf.order_et(b, [2, 3]).energies, rtol=1e-8)

    @pytest.mark.parametrize("family,shape", reductions)
    def test_rates_coincide_at_high_snr(self, family, shape):
        # K = 0 routes to the exact Rayleigh path; k = 1 and m = 1 use the high-SNR forms
        omegas = [1e-5, 2e-5, 4e-5]
        a, b = make_system(family, shape, omegas), make_system("rayleigh", 1, omegas)
        tol = 1e-12 if family == "ricean" else 1e-6
        for j, n in itertools.product((1, 3), (1, 3)):
            assert cf.order_snr_rate(a, j, n) == pytest.approx(cf.order_snr_rate(b, j, n), rel=tol)
            assert cf.order_nsnr_rate(a, j, n) == pytest.approx(cf.order_nsnr_rate(b, j, n), rel=tol)


@settings(max_examples=100, deadline=None)
@given(
    w=st.lists(st.floats(0.01, 1.0), min_size=2, max_size=8),
    data=st.data(),
)
def test_combination_cap_trivial_at_L_equal_N(w, data):
    p = np.array(w) / np.sum(w)
    N = len(p)
    size = data.draw(st.integers(2, N))
    s_a = data.draw(st.lists(st.integers(1, N), min_size=size, max_size=size, unique=True))
    assert check(p, s_a).violations_at(N) == []


@settings(max_examples=30, deadline=None)
@given(N=st.integers(1, 9), slots=st.integers(1, 3000), seed=st.integers(0, 2**32 - 1))
def test_round_robin_frequency_exact(N, slots, seed):
    sys = make_system("rayleigh", 1, [1e-5] * N)
    res = sched_sim.run(sys, Policy.rr(), slots, seed=seed, batches=1)
    counts = np.rint(res.access * slots).astype(int)
    assert counts.sum() == slots
    assert counts.max() - counts.min() <= 1
    # earlier users take the remainder slots
    assert list(counts) == sorted(counts, reverse=True)


@pytest.mark.parametrize(
    "policy", [Policy.rr(), Policy.conv_et(), Policy.order_snr(1), Policy.order_nsnr(2), Policy.order_et([2, 3])], ids=str
)
@pytest.mark.parametrize("family,shape", [("nakagami", 2), ("ricean", 6.0)])
def test_seed_determinism(policy, family, shape):
    sys = make_system(family, shape, [1e-5, 2e-5, 3e-5])
    a = sched_sim.run(sys, policy, 4000, seed=123)
    b = sched_sim.run(sys, policy, 4000, seed=123)
    c = sched_sim.run(sys, policy, 4000, seed=124)
    for f in ("rates", "energies", "rate_se", "energy_se", "access"):
        np.testing.assert_array_equal(getattr(a, f), getattr(b, f))
    assert not np.array_equal(a.rates, c.rates)
