"""
Direct numerical evaluation of the defining rate and energy integrals.

Nothing here uses the closed-form expansions: densities and distribution
functions come straight from :mod:`swiptsched.fading` (exact Marcum-Q cdf for
Ricean), order-statistic densities are assembled term by term, and the
integrals are done by adaptive Gauss-Kronrod quadrature on ``[0, x_max]``
where ``x_max`` is the doubling tail point of the relevant user.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from math import comb

import numpy as np
from scipy import integrate

from . import fading
from .combinatorics import DEFAULT_BUDGET, Permutations, enumerate_family
from .system import SystemParams

__all__ = [
    "QuadratureConfig",
    "QuadratureError",
    "DEFAULT_QUADRATURE",
    "quad",
    "orderstat_pdf_ind",
    "orderstat_pdf_iid",
    "selection_weight",
    "fulltime_rate_integral",
    "rate_integral_order_snr",
    "energy_integral_order_snr",
    "scheduling_probability_order_snr",
    "orderstat_mean_ind",
    "rate_integral_nsnr",
    "energy_integral_nsnr",
    "orderstat_mean_iid",
]

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class QuadratureConfig:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-300
    max_subdivisions: int = 500
    tail_cut: float = 1e-12

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be positive")
        if not 0 < self.tail_cut <= 1e-6:
            raise ValueError("tail_cut must lie in (0, 1e-6]")


DEFAULT_QUADRATURE = QuadratureConfig()


class QuadratureError(ArithmeticError):
    def __init__(self, value, error, message=""):
        self.value = value
        self.error = error
        super().__init__(f"quadrature did not converge: value={value!r}, error estimate={error!r}. {message}")


def quad(f, upper, points=(), cfg: QuadratureConfig = DEFAULT_QUADRATURE):
    """Integrate scalar ``f`` over ``[0, upper]``; raise if the error estimate is poor."""
    pts = sorted(p for p in set(points) if 0 < p < upper)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err = integrate.quad(
            f,
            0.0,
            upper,
            points=pts or None,
            epsabs=cfg.abs_tol,
            epsrel=cfg.rel_tol,
            limit=cfg.max_subdivisions,
        )
    if not math.isfinite(val) or err > max(1e3 * cfg.rel_tol * abs(val), cfg.abs_tol):
        raise QuadratureError(val, err)
    return val


# ------------------------------------------------------------ order statistics


def _perm_index(n, j, N, budget):
    perms = list(enumerate_family(Permutations(n, j, N), budget))
    arr = np.array(perms, dtype=int).reshape(len(perms), N - 1) - 1
    return arr[:, : j - 1], arr[:, j - 1 :]


def selection_weight(users, j, n, x, budget=DEFAULT_BUDGET, use_ricean_approx=False):
    """Sum over P_n of prod F (first j-1 slots) * prod (1-F) (remaining slots).

    This is the probability that user ``n``'s gain, if equal to ``x``, is the
    j-th smallest.
    """
    N = len(users)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    F = np.array([fading.cdf(u, x, use_ricean_approx) for u in users])
    S = np.array([fading.sf(u, x, use_ricean_approx) for u in users])
    head, tail = _perm_index(n, j, N, budget)
    total = np.zeros_like(x)
    for h, t in zip(head, tail):
        total += np.prod(F[h], axis=0) * np.prod(S[t], axis=0)
    return total


def orderstat_pdf_ind(users, j, x, budget=DEFAULT_BUDGET):
    """Density of the j-th smallest of independent, non-identical power gains."""
    N = len(users)
    if not 1 <= j <= N:
        raise ValueError(f"need 1 <= j <= N, got j={j}, N={N}")
    scalar = np.ndim(x) == 0
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.zeros_like(xa)
    for n in range(1, N + 1):
        out += fading.pdf(users[n - 1], xa) * selection_weight(users, j, n, xa, budget)
    return float(out[0]) if scalar else out


def orderstat_pdf_iid(spec, N, j, x):
    """``N C(N-1, j-1) f F^{j-1} (1-F)^{N-j}``."""
    f = fading.pdf(spec, x)
    F = fading.cdf(spec, x)
    S = fading.sf(spec, x)
    return N * comb(N - 1, j - 1) * f * F ** (j - 1) * S ** (N - j)


def _points(users, upper):
    return [u.omega for u in users if u.omega < upper]


def _scalar(fn):
    return lambda x: float(fn(np.array([x]))[0])


# ------------------------------------------------------------ full-time access


def _log_kinks(g):
    return [1.0 / g, 1e2 / g, 1e4 / g]


def fulltime_rate_integral(spec, gbar, cfg: QuadratureConfig = DEFAULT_QUADRATURE):
    """``int log2(1 + gbar x) f_h(x) dx`` in the normalized variable ``x / omega``."""
    unit = fading.normalized(spec)
    g = gbar * spec.omega
    upper = fading.tail_point(unit, cfg.tail_cut)

    def f(t):
        return math.log1p(g * t) / _LN2 * fading.pdf(unit, t)

    # the log changes regime near t = 1/g; resolve that kink explicitly
    return quad(f, upper, (1.0, *_log_kinks(g)), cfg)


# ------------------------------------------------------------ order-based SNR


def _order_snr_integral(sys, j, n, weight_fn, cfg, budget, extra=()):
    users = sys.users
    u = sys.user(n)
    upper = fading.tail_point(u, cfg.tail_cut)

    def f(x):
        xs = np.array([x])
        return float(weight_fn(xs)[0] * fading.pdf(u, xs)[0] * selection_weight(users, j, n, xs, budget)[0])

    return quad(f, upper, _points(users, upper) + [u.omega, *extra], cfg)


def rate_integral_order_snr(sys: SystemParams, j, n, cfg=DEFAULT_QUADRATURE, budget=DEFAULT_BUDGET):
    """Exact per-user ergodic rate under order-SNR selection (no high-SNR step)."""
    g = sys.gbar
    return _order_snr_integral(sys, j, n, lambda x: np.log1p(g * x) / _LN2, cfg, budget, _log_kinks(g))


def scheduling_probability_order_snr(sys: SystemParams, j, n, cfg=DEFAULT_QUADRATURE, budget=DEFAULT_BUDGET):
    """Probability that user ``n`` holds the j-th smallest gain."""
    return _order_snr_integral(sys, j, n, np.ones_like, cfg, budget)


def energy_integral_order_snr(sys: SystemParams, j, n, cfg=DEFAULT_QUADRATURE, budget=DEFAULT_BUDGET):
    """``eta P (omega_n - int x f_n(x) w_n(x) dx)``, w_n the selection weight."""
    harvested_when_selected = _order_snr_integral(sys, j, n, lambda x: x, cfg, budget)
    return sys.eta * sys.power * (sys.user(n).omega - harvested_when_selected)


def orderstat_mean_ind(users, j, cfg=DEFAULT_QUADRATURE, budget=DEFAULT_BUDGET):
    """``E[h_(j)]`` by quadrature of ``x`` times the i.n.d. order-statistic density."""
    upper = max(fading.tail_point(u, cfg.tail_cut) for u in users)
    return quad(
        lambda x: x * orderstat_pdf_ind(users, j, x, budget),
        upper,
        _points(users, upper),
        cfg,
    )


# ------------------------------------------------------------ order-based N-SNR


def _nsnr_integral(spec, N, j, weight_fn, cfg, extra=()):
    unit = fading.normalized(spec)
    upper = fading.tail_point(unit, cfg.tail_cut)
    return quad(lambda t: weight_fn(t) * orderstat_pdf_iid(unit, N, j, t), upper, (1.0, *extra), cfg)


def rate_integral_nsnr(sys: SystemParams, j, n, cfg=DEFAULT_QUADRATURE):
    """``(1/N) int log2(1 + gbar_n x) f_{X_(j)}(x) dx`` over the unit-mean law."""
    N = sys.N
    g = sys.gbar_n(n)
    return _nsnr_integral(sys.user(n), N, j, lambda t: math.log1p(g * t) / _LN2, cfg, _log_kinks(g)) / N


def orderstat_mean_iid(spec, N, j, cfg=DEFAULT_QUADRATURE):
    """``E[X_(j)]`` for N i.i.d. unit-mean gains of the family of ``spec``."""
    return _nsnr_integral(spec, N, j, lambda t: t, cfg)


def energy_integral_nsnr(sys: SystemParams, j, n, cfg=DEFAULT_QUADRATURE):
    N = sys.N
    return sys.max_energy(n) * (1.0 - orderstat_mean_iid(sys.user(n), N, j, cfg) / N)
