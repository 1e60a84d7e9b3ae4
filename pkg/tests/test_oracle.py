import math

import numpy as np
import pytest
from scipy import integrate, stats

from _support import make_system
from swiptsched import closed_form as cf
from swiptsched import fading, oracle
from swiptsched.oracle import QuadratureConfig


class TestOrderStatisticDensity:
    def test_single_user_is_its_pdf(self):
        spec = fading.weibull(1.5, 2.0)
        x = np.linspace(0, 6, 31)
        np.testing.assert_allclose(oracle.orderstat_pdf_ind([spec], 1, x), fading.pdf(spec, x), rtol=1e-14)

    @pytest.mark.parametrize("j", [1, 2, 4])
    def test_iid_specialization(self, j):
        spec = fading.nakagami(2, 1.0)
        x = np.linspace(0.01, 5, 40)
        np.testing.assert_allclose(
            oracle.orderstat_pdf_ind([spec] * 4, j, x), oracle.orderstat_pdf_iid(spec, 4, j, x), rtol=1e-12
        )

    @pytest.mark.parametrize("j", [1, 2, 3])
    def test_mixed_rayleigh_normalizes_and_matches_sorted_draws(self, j):
        users = [fading.rayleigh(o) for o in (0.5, 1.0, 3.0)]
        mass, _ = integrate.quad(lambda x: oracle.orderstat_pdf_ind(users, j, x), 0, 120, points=[0.5, 1, 3])
        assert mass == pytest.approx(1.0, abs=1e-8)
        rng = np.random.default_rng(99)
        draws = np.sort(np.column_stack([fading.sample(u, rng, 20000) for u in users]), axis=1)[:, j - 1]

        def cdf(x):
            return integrate.quad(lambda t: oracle.orderstat_pdf_ind(users, j, t), 0, x)[0]

        grid = np.quantile(draws, np.linspace(0.01, 0.99, 40))
        emp = np.searchsorted(np.sort(draws), grid, side="right") / draws.size
        model = np.array([cdf(g) for g in grid])
        assert np.max(np.abs(emp - model)) < 1.628 / math.sqrt(draws.size)

    def test_bad_order(self):
        with pytest.raises(ValueError):
            oracle.orderstat_pdf_ind([fading.rayleigh()], 2, 1.0)


OMEGAS3 = [1e-5, 2.5e-5, 4e-5]


class TestOrderSnrIntegrals:
    @pytest.mark.parametrize("family,shape", [("rayleigh", 1), ("nakagami", 2), ("weibull", 1.5), ("ricean", 6)])
    @pytest.mark.parametrize("j", [1, 2, 3])
    def test_scheduling_probabilities_sum_to_one(self, family, shape, j):
        sys = make_system(family, shape, OMEGAS3)
        total = sum(oracle.scheduling_probability_order_snr(sys, j, n) for n in (1, 2, 3))
        assert total == pytest.approx(1.0, abs=1e-8)

    @pytest.mark.parametrize("j", [1, 2, 3])
    def test_energy_two_routes(self, j):
        sys = make_system("nakagami", 2, OMEGAS3)
        lhs = sum(oracle.energy_integral_order_snr(sys, j, n) for n in (1, 2, 3))
        mean_j = oracle.orderstat_mean_ind(list(sys.users), j)
        rhs = sys.eta * sys.power * (sum(OMEGAS3) - mean_j)
        assert lhs == pytest.approx(rhs, rel=1e-8)

    @pytest.mark.parametrize("j", [1, 2, 3])
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_rayleigh_equals_closed_form(self, j, n):
        sys = make_system("rayleigh", 1, OMEGAS3)
        assert oracle.rate_integral_order_snr(sys, j, n) == pytest.approx(cf.order_snr_rate(sys, j, n), rel=1e-6)
        assert oracle.energy_integral_order_snr(sys, j, n) == pytest.approx(cf.order_snr_energy(sys, j, n), rel=1e-6)


class TestNsnrIntegrals:
    @pytest.mark.parametrize("j", [1, 2, 3, 4])
    def test_rayleigh_equals_closed_form(self, j):
        sys = make_system("rayleigh", 1, [1e-5, 2e-5, 3e-5, 4e-5])
        for n in (1, 4):
            assert oracle.rate_integral_nsnr(sys, j, n) == pytest.approx(cf.order_nsnr_rate(sys, j, n), rel=1e-6)
            assert oracle.energy_integral_nsnr(sys, j, n) == pytest.approx(cf.order_nsnr_energy(sys, j, n), rel=1e-6)

    @pytest.mark.parametrize("family,shape", [("rayleigh", 1), ("nakagami", 3), ("weibull", 0.8), ("ricean", 6)])
    def test_mixture_identity(self, family, shape):
        sys = make_system(family, shape, [1e-5, 3e-5, 6e-5])
        n = 2
        parts = sum(oracle.rate_integral_nsnr(sys, j, n) for j in (1, 2, 3))
        assert parts == pytest.approx(oracle.fulltime_rate_integral(sys.user(n), sys.gbar), rel=1e-6)

    def test_nakagami_bound_tightens_with_snr(self):
        errs = []
        for noise in (1e-2, 1e-4, 1e-6, 1e-8):
            sys = make_system("nakagami", 3, [1.0, 2.0, 3.0], noise=noise)
            exact = oracle.rate_integral_nsnr(sys, 2, 1)
            errs.append((exact - cf.order_nsnr_rate(sys, 2, 1)) / exact)
        assert all(e > 0 for e in errs)
        assert all(a > b for a, b in zip(errs, errs[1:]))


@pytest.mark.parametrize("family,shape", [("nakagami", 3), ("ricean", 6)])
def test_tail_cut_insensitivity(family, shape):
    sys = make_system(family, shape, OMEGAS3)
    a = oracle.rate_integral_order_snr(sys, 2, 1, cfg=QuadratureConfig(tail_cut=1e-12))
    b = oracle.rate_integral_order_snr(sys, 2, 1, cfg=QuadratureConfig(tail_cut=5e-13))
    assert a == pytest.approx(b, rel=1e-9)


def test_energies_bounded_by_max():
    sys = make_system("weibull", 2.0, OMEGAS3)
    for j in (1, 2, 3):
        for n in (1, 2, 3):
            assert 0 <= oracle.energy_integral_order_snr(sys, j, n) <= sys.max_energy(n)
            assert 0 <= oracle.energy_integral_nsnr(sys, j, n) <= sys.max_energy(n)


def test_fulltime_integral_against_gamma_law():
    g = 4e3
    ref, _ = integrate.quad(lambda t: math.log2(1 + g * t) * stats.gamma.pdf(t, a=2, scale=0.5), 0, 80, epsrel=1e-12)
    assert oracle.fulltime_rate_integral(fading.nakagami(2, 1e-3), g / 1e-3) == pytest.approx(ref, rel=1e-9)


def test_config_validation():
    with pytest.raises(ValueError):
        QuadratureConfig(rel_tol=0)
    with pytest.raises(ValueError):
        QuadratureConfig(tail_cut=1e-3)


def test_nonconvergence_reports_error_estimate():
    with pytest.raises(oracle.QuadratureError) as err:
        oracle.quad(lambda x: math.sin(1 / x) / x if x else 0.0, 1.0, cfg=QuadratureConfig(max_subdivisions=5))
    assert math.isfinite(err.value.error)
