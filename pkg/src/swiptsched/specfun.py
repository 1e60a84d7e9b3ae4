"""
Special functions used by the closed-form rate and energy expressions.

Exponential integral, upper incomplete gamma, digamma and the first-order
Marcum Q-function (exact, plus the exponential approximation that turns a
Ricean power gain into an equivalent Weibull one).

Scalar cores are written out by hand (power series below the switchover,
modified Lentz continued fractions above it). The public functions accept
scalars or arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.special import i0e

__all__ = [
    "EULER_GAMMA",
    "Accuracy",
    "DEFAULT_ACCURACY",
    "MarcumApproxParams",
    "MARCUM_SMALL_A",
    "exp_integral_e1",
    "exp_e1_scaled",
    "upper_incomplete_gamma",
    "upper_incomplete_gamma_regularized",
    "digamma",
    "marcum_q1_exact",
    "marcum_approx_params",
    "marcum_q1_approx",
]

EULER_GAMMA = 0.57721566490153286061

# below this the small-argument expansion of mu(a), nu(a) is used
MARCUM_SMALL_A = 0.1

_TINY = 1e-300


@dataclass(frozen=True)
class Accuracy:
    """Convergence controls for the series / continued-fraction evaluators."""

    abs_tol: float = 1e-16
    rel_tol: float = 1e-15
    max_terms: int = 500

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.max_terms < 1:
            raise ValueError("max_terms must be >= 1")


DEFAULT_ACCURACY = Accuracy()


@dataclass(frozen=True)
class MarcumApproxParams:
    mu: float
    nu: float

    def __post_init__(self):
        if not (math.isfinite(self.mu) and math.isfinite(self.nu)):
            raise ValueError("Marcum approximation parameters must be finite")
        if self.mu <= 0:
            raise ValueError("mu must be positive")


def _apply(fn, *args):
    """Broadcast a scalar kernel over array arguments; scalars stay scalars."""
    if all(np.ndim(a) == 0 for a in args):
        return fn(*(float(a) for a in args))
    bargs = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in args))
    out = np.empty(bargs[0].shape)
    for idx in np.ndindex(out.shape):
        out[idx] = fn(*(b[idx] for b in bargs))
    return out


# ---------------------------------------------------------------- E1


def _e1_series(x, acc):
    # E1(x) = -C - ln x - sum_{k>=1} (-x)^k / (k k!)
    total = 0.0
    term = 1.0
    for k in range(1, acc.max_terms + 1):
        term *= -x / k
        delta = term / k
        total += delta
        if abs(delta) <= acc.rel_tol * abs(total):
            break
    else:
        raise ArithmeticError(f"E1 series did not converge at x={x}")
    return -EULER_GAMMA - math.log(x) - total


def _e1_scaled_cf(x, acc):
    # e^x E1(x) = 1/(x+1- 1/(x+3- 4/(x+5- ...))), modified Lentz
    b = x + 1.0
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, acc.max_terms + 1):
        an = -float(i * i)
        b += 2.0
        d = 1.0 / (an * d + b)
        c = b + an / c
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < acc.rel_tol:
            return h
    raise ArithmeticError(f"E1 continued fraction did not converge at x={x}")


def _e1_scalar(x, acc=DEFAULT_ACCURACY):
    if not x > 0:
        raise ValueError(f"E1 requires x > 0, got {x}")
    if x <= 1.0:
        return _e1_series(x, acc)
    return math.exp(-x) * _e1_scaled_cf(x, acc)


def _e1_scaled_scalar(x, acc=DEFAULT_ACCURACY):
    if not x > 0:
        raise ValueError(f"E1 requires x > 0, got {x}")
    if x <= 1.0:
        return math.exp(x) * _e1_series(x, acc)
    return _e1_scaled_cf(x, acc)


def exp_integral_e1(x, acc: Accuracy = DEFAULT_ACCURACY):
    r"""Exponential integral :math:`E_1(x) = \int_1^\infty e^{-tx}/t \, dt`, x > 0."""
    return _apply(lambda v: _e1_scalar(v, acc), x)


def exp_e1_scaled(x, acc: Accuracy = DEFAULT_ACCURACY):
    """``exp(x) * E1(x)`` without overflow/underflow for large ``x``.

    This is the combination that appears in every Rayleigh rate expression.
    """
    return _apply(lambda v: _e1_scaled_scalar(v, acc), x)


# ---------------------------------------------------------------- Gamma(s, x)


def _lower_gamma_series(s, x, acc):
    # gamma(s, x) = x^s e^-x sum_n x^n / (s (s+1) ... (s+n))
    ap = s
    term = 1.0 / s
    total = term
    for _ in range(acc.max_terms):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * acc.rel_tol:
            return total * math.exp(-x + s * math.log(x))
    raise ArithmeticError(f"incomplete gamma series did not converge at s={s}, x={x}")


def _upper_gamma_cf(s, x, acc):
    # Gamma(s, x) = e^-x x^s / (x+1-s- 1(1-s)/(x+3-s- 2(2-s)/(x+5-s- ...)))
    b = x + 1.0 - s
    c = 1.0 / _TINY
    d = 1.0 / b if b != 0 else 1.0 / _TINY
    h = d
    for i in range(1, acc.max_terms + 1):
        an = -i * (i - s)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < acc.rel_tol:
            return h * math.exp(-x + s * math.log(x))
    raise ArithmeticError(f"incomplete gamma continued fraction did not converge at s={s}, x={x}")


def _upper_gamma_scalar(s, x, acc=DEFAULT_ACCURACY, regularized=False):
    if not (s > 0 and x >= 0):
        raise ValueError(f"Gamma(s, x) requires s > 0 and x >= 0, got s={s}, x={x}")
    gs = math.gamma(s) if s < 171 else math.inf
    if x == 0:
        return 1.0 if regularized else gs
    if x < s + 1.0:
        val = gs - _lower_gamma_series(s, x, acc)
        if regularized:
            return max(val / gs, 0.0)
        return max(val, 0.0)
    val = _upper_gamma_cf(s, x, acc)
    return val / gs if regularized else val


def upper_incomplete_gamma(s, x, acc: Accuracy = DEFAULT_ACCURACY):
    r""":math:`\Gamma(s, x) = \int_x^\infty t^{s-1} e^{-t} dt` for s > 0, x >= 0.

    Power series for the lower function when ``x < s + 1``, continued
    fraction for the upper function otherwise.
    """
    return _apply(lambda a, b: _upper_gamma_scalar(a, b, acc), s, x)


def upper_incomplete_gamma_regularized(s, x, acc: Accuracy = DEFAULT_ACCURACY):
    """``Gamma(s, x) / Gamma(s)``."""
    return _apply(lambda a, b: _upper_gamma_scalar(a, b, acc, regularized=True), s, x)


# ---------------------------------------------------------------- digamma

# Bernoulli numbers B_2k / (2k) for the asymptotic series
_PSI_ASYMPTOTIC = (
    1.0 / 12,
    -1.0 / 120,
    1.0 / 252,
    -1.0 / 240,
    1.0 / 132,
    -691.0 / 32760,
    1.0 / 12,
)


def digamma(x):
    """Digamma function for x > 0 (vectorized).

    Shifts the argument up to >= 10 with the recurrence, then uses the
    asymptotic expansion; accurate to a few ulp for positive arguments.
    """
    scalar = np.ndim(x) == 0
    xa = np.array(x, dtype=float, ndmin=1)
    if np.any(~(xa > 0)):
        raise ValueError("digamma requires x > 0")
    shift = np.zeros_like(xa)
    z = xa.copy()
    while True:
        small = z < 10.0
        if not small.any():
            break
        shift[small] -= 1.0 / z[small]
        z[small] += 1.0
    inv2 = 1.0 / (z * z)
    series = np.zeros_like(z)
    for coef in reversed(_PSI_ASYMPTOTIC):
        series = series * inv2 + coef
    out = np.log(z) - 0.5 / z - series * inv2 + shift
    return float(out[0]) if scalar else out


# ---------------------------------------------------------------- Marcum Q


def _marcum_q1_scalar(a, b):
    if not (math.isfinite(a) and math.isfinite(b)):
        raise ValueError("Marcum Q requires finite arguments")
    if a < 0 or b < 0:
        raise ValueError("Marcum Q requires a >= 0 and b >= 0")
    if b == 0:
        return 1.0
    if a == 0:
        return math.exp(-0.5 * b * b)

    # x e^{-(x^2+a^2)/2} I0(ax) = x e^{-(x-a)^2/2} i0e(ax)
    def integrand(x):
        return x * math.exp(-0.5 * (x - a) ** 2) * i0e(a * x)

    # integrand < 1e-16 beyond a + 9.5 (gaussian tail around the peak)
    hi = max(a, b) + 9.5 + math.sqrt(2.0 * math.log(max(a, 1.0) + 1.0))
    if b >= hi:
        return 0.0
    # integrate the shorter side of the mass
    if b < a:
        lower, _ = integrate.quad(integrand, 0.0, b, epsabs=1e-15, epsrel=1e-13, limit=200)
        return min(1.0, max(0.0, 1.0 - lower))
    upper, _ = integrate.quad(integrand, b, hi, epsabs=1e-16, epsrel=1e-13, limit=200)
    return min(1.0, max(0.0, upper))


def marcum_q1_exact(a, b):
    r"""First-order Marcum Q-function by quadrature of its defining integral.

    :math:`Q_1(a,b) = \int_b^\infty x e^{-(x^2+a^2)/2} I_0(ax) dx`.
    Slow; meant as the reference the approximation is checked against.
    """
    return _apply(_marcum_q1_scalar, a, b)


def marcum_approx_params(a: float) -> MarcumApproxParams:
    """Parameters (mu, nu) of ``Q1(a, b) ~ exp(-exp(nu) * b**mu)``.

    Quartic least-squares fits in ``a`` above :data:`MARCUM_SMALL_A`; the
    small-argument expansion below it, with the fourth-order corrections
    multiplying ``a**4`` so that ``a = 0`` gives ``exp(-b**2 / 2)`` exactly.
    """
    a = float(a)
    if not a >= 0:
        raise ValueError(f"a must be non-negative, got {a}")
    if a < MARCUM_SMALL_A:
        d = 9.0 * math.pi**2 - 80.0
        a4 = a**4
        mu = 2.0 + 9.0 / (8.0 * d) * a4
        nu = (
            -math.log(2.0)
            - 0.5 * a * a
            + (45.0 * math.pi**2 + 72.0 * math.log(2.0) + 36.0 * EULER_GAMMA - 496.0) / (64.0 * d) * a4
        )
    else:
        mu = 2.1793 - 0.5916 * a + 0.5895 * a**2 - 0.0909 * a**3 + 0.0053 * a**4
        nu = -0.8526 + 0.3504 * a - 0.7529 * a**2 + 0.0858 * a**3 - 0.0045 * a**4
    return MarcumApproxParams(mu=mu, nu=nu)


def marcum_q1_approx(a: float, b):
    """Exponential approximation ``exp(-exp(nu(a)) * b**mu(a))`` (vectorized in b)."""
    if np.any(np.asarray(b) < 0):
        raise ValueError("b must be non-negative")
    p = marcum_approx_params(a)
    out = np.exp(-math.exp(p.nu) * np.power(b, p.mu))
    return float(out) if np.ndim(out) == 0 else out
