"""
Closed-form per-user ergodic rates and average harvested energies.

Schemes: round robin, conventional equal throughput (ET), order-based SNR,
order-based normalized SNR (N-SNR) and order-based ET. Rates are in bits per
channel use, energies in watts (joules per unit slot). Users are 1-based.

Rayleigh rates are exact. Nakagami-m and Weibull rates use the high-SNR
step ``ln(1 + g x) -> ln(g x)`` and are lower bounds that tighten as the SNR
grows; Ricean results go through the Weibull-equivalent Marcum-Q
approximation and are approximations, not bounds. All energies are exact
(up to that approximation for Ricean).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import comb, factorial

import numpy as np
from scipy.special import gammaln

from . import fading, oracle
from .combinatorics import DEFAULT_BUDGET, BudgetExceeded, Iml, Smr, Unr, enumerate_family
from .specfun import EULER_GAMMA, digamma, exp_e1_scaled
from .system import SystemParams, UserMetrics

__all__ = [
    "MixedFamilies",
    "SeriesDivergence",
    "ETResult",
    "fulltime_rate",
    "rr_metrics",
    "conv_et",
    "order_snr_rate",
    "order_snr_energy",
    "order_snr_metrics",
    "order_statistic_mean",
    "order_nsnr_rate",
    "order_nsnr_energy",
    "order_nsnr_metrics",
    "order_et",
    "nakagami_log_moment_exact",
    "order_snr_rate_exact_nakagami",
]

_LN2 = math.log(2.0)


class MixedFamilies(ValueError):
    """Closed forms need every user on the same fading family and shape."""


class SeriesDivergence(ArithmeticError):
    pass


@dataclass(frozen=True)
class ETResult:
    """Equal-throughput outcome: common rate, access probabilities, energies."""

    rate: float
    p: np.ndarray
    energies: np.ndarray

    @property
    def sum_rate(self):
        return self.rate * len(self.p)


def _family(sys: SystemParams):
    keys = {u.key for u in sys.users}
    if len(keys) != 1:
        raise MixedFamilies(f"closed forms need one family/shape across users, got {sorted(keys)}")
    return sys.users[0].family


def _check_user(sys, j, n):
    if not 1 <= j <= sys.N:
        raise ValueError(f"order j={j} outside 1..{sys.N}")
    sys.user(n)


# ------------------------------------------------------------------ baselines


def fulltime_rate(spec: fading.FadingSpec, sys: SystemParams) -> float:
    """Ergodic rate with full-time channel access.

    Rayleigh: ``exp(1/g) E1(1/g) / ln 2`` with ``g = gbar * omega``. Other
    families integrate the defining expression numerically.
    """
    g = sys.gbar * spec.omega
    if spec.family == "rayleigh" or (spec.family == "ricean" and spec.shape == 0):
        return float(exp_e1_scaled(1.0 / g)) / _LN2
    return oracle.fulltime_rate_integral(spec, sys.gbar)


def rr_metrics(sys: SystemParams, n: int) -> UserMetrics:
    N = sys.N
    return UserMetrics(
        rate=fulltime_rate(sys.user(n), sys) / N,
        energy=(1.0 - 1.0 / N) * sys.max_energy(n),
    )


def conv_et(sys: SystemParams) -> ETResult:
    full = np.array([fulltime_rate(u, sys) for u in sys.users])
    rate = 1.0 / np.sum(1.0 / full)
    p = rate / full
    p = p / p.sum()
    energies = (1.0 - p) * sys.eta * sys.power * sys.omegas
    return ETResult(float(rate), p, energies)


# ------------------------------------------------------------------ order-based SNR


def _u_sums(sys, j, n, weights, budget, terms_per_tuple=None):
    """Yield (sign, array of sum_t weights[u_t]) for every r and every U_{n,r} tuple.

    ``terms_per_tuple(r)`` gives the inner multiplicity (|S_{m,r}| for
    Nakagami) used only for the budget check.
    """
    N = sys.N
    predicted = 0
    for r in range(j):
        fam = Unr(n, j, r, N)
        predicted += fam.cardinality * (terms_per_tuple(fam.length) if terms_per_tuple else 1)
    if predicted > budget:
        raise BudgetExceeded(predicted, budget, what=f"order-SNR expansion (N={N}, j={j})")
    for r in range(j):
        fam = Unr(n, j, r, N)
        idx = np.array(list(enumerate_family(fam, budget)), dtype=int).reshape(fam.cardinality, fam.length) - 1
        yield (-1.0) ** r, idx


def _snr_weibull_like(sys, j, n, budget):
    d = [fading.derived_scale(u) for u in sys.users]
    b = np.array([x.beta for x in d])
    k = d[n - 1].mu_prime
    bn = b[n - 1]
    lg = math.log(sys.gbar)
    rate = 0.0
    energy = 0.0
    for sign, idx in _u_sums(sys, j, n, b, budget):
        Lam = bn + b[idx].sum(axis=1)
        rate += sign * np.sum((lg - (np.log(Lam) + EULER_GAMMA) / k) / Lam)
        energy += sign * np.sum(Lam ** -(1.0 + 1.0 / k))
    rate *= bn / _LN2
    energy = sys.eta * sys.power * (sys.user(n).omega - bn * math.gamma(1.0 + 1.0 / k) * energy)
    return rate, energy


def _snr_rayleigh(sys, j, n, budget):
    lam = 1.0 / sys.omegas
    ln_ = lam[n - 1]
    g = sys.gbar
    rate = 0.0
    energy = 0.0
    for sign, idx in _u_sums(sys, j, n, lam, budget):
        zeta = ln_ + lam[idx].sum(axis=1)
        rate += sign * np.sum(exp_e1_scaled(zeta / g) / zeta)
        energy += sign * np.sum(zeta**-2.0)
    return ln_ * rate / _LN2, sys.eta * sys.power * (sys.user(n).omega - ln_ * energy)


def _truncated_exp_product(rho, m):
    """Coefficients of prod_t sum_{s<m} (rho_t x)^s / s! for each row of ``rho``.

    Summing over all exponent tuples in S_{m,r} grouped by total degree.
    """
    cnt, k = rho.shape
    coef = np.zeros((cnt, k * (m - 1) + 1))
    coef[:, 0] = 1.0
    deg = 0
    for t in range(k):
        new = np.zeros_like(coef)
        p = np.ones(cnt)
        for s in range(m):
            new[:, s : s + deg + 1] += coef[:, : deg + 1] * p[:, None]
            p = p * rho[:, t] / (s + 1)
        coef = new
        deg += m - 1
    return coef


def _snr_nakagami(sys, j, n, budget):
    m = sys.users[0].shape
    lam = m / sys.omegas
    ln_ = lam[n - 1]
    lg = math.log(sys.gbar)
    rate = 0.0
    energy = 0.0
    for sign, idx in _u_sums(sys, j, n, lam, budget, terms_per_tuple=lambda length: m**length):
        zeta = ln_ + lam[idx].sum(axis=1)
        # lambda_u / zeta < 1 keeps the polynomial coefficients bounded
        coef = _truncated_exp_product(lam[idx] / zeta[:, None], m)
        a = np.arange(coef.shape[1])
        alpha = m + a
        lead = np.exp(m * np.log(ln_ / zeta) - math.lgamma(m))
        g_alpha = np.exp(gammaln(alpha))
        rate_inner = coef @ (g_alpha * digamma(alpha)) + (coef @ g_alpha) * (lg - np.log(zeta))
        energy_inner = coef @ np.exp(gammaln(alpha + 1))
        rate += sign * np.sum(lead * rate_inner)
        energy += sign * np.sum(lead * energy_inner / zeta)
    return rate / _LN2, sys.eta * sys.power * (sys.user(n).omega - energy)


def _order_snr(sys, j, n, budget):
    fam = _family(sys)
    _check_user(sys, j, n)
    if fam == "rayleigh" or (fam == "ricean" and sys.users[0].shape == 0):
        return _snr_rayleigh(sys, j, n, budget)
    if fam == "nakagami":
        return _snr_nakagami(sys, j, n, budget)
    return _snr_weibull_like(sys, j, n, budget)


def order_snr_rate(sys: SystemParams, j: int, n: int, budget: int = DEFAULT_BUDGET) -> float:
    """Per-user rate when the user with the j-th smallest SNR is served."""
    return float(_order_snr(sys, j, n, budget)[0])


def order_snr_energy(sys: SystemParams, j: int, n: int, budget: int = DEFAULT_BUDGET) -> float:
    """Per-user harvested energy under order-SNR selection."""
    return float(_order_snr(sys, j, n, budget)[1])


def order_snr_metrics(sys: SystemParams, j: int, n: int, budget: int = DEFAULT_BUDGET) -> UserMetrics:
    rate, energy = _order_snr(sys, j, n, budget)
    return UserMetrics(float(rate), float(energy))


# ------------------------------------------------------------------ order-based N-SNR


def _nakagami_nsnr_terms(m, N, j, gn=None):
    """Shared sum for Nakagami N-SNR: rate (if ``gn`` is given) or E[X_(j)]/N."""
    total = 0.0
    for l in range(N - j, N):  # noqa: E741
        sign = (-1.0) ** (l - N + j)
        c = comb(j - 1, N - l - 1)
        inner = 0.0
        for i in Iml(m, l):
            # log of prod_s (1/(s!(1+l)^s))^{i_s} / i_s!
            logw = sum(-ik * (math.lgamma(s + 1) + s * math.log1p(l)) - math.lgamma(ik + 1) for s, ik in enumerate(i))
            deg = sum(s * ik for s, ik in enumerate(i))
            if gn is None:
                inner += math.exp(logw + math.lgamma(m + 1 + deg))
            else:
                alpha = m + deg
                inner += math.exp(logw + math.lgamma(alpha)) * (
                    float(digamma(alpha)) + math.log(gn / (m * (1.0 + l)))
                )
        if gn is None:
            total += sign * c * factorial(l) / (1.0 + l) ** (m + 1) * inner
        else:
            total += sign * c * factorial(l) / (1.0 + l) ** m * inner
    if gn is None:
        return comb(N - 1, j - 1) * total / math.gamma(m + 1)
    return comb(N - 1, j - 1) * total / (math.gamma(m) * _LN2)


def order_statistic_mean(spec: fading.FadingSpec, N: int, j: int) -> float:
    """``E[X_(j)]``: mean of the j-th smallest of N i.i.d. unit-mean gains.

    Same expansion as the N-SNR energy, so ``energy = eta P omega (1 - E/N)``.
    """
    if not 1 <= j <= N:
        raise ValueError(f"order j={j} outside 1..{N}")
    fam = spec.family
    if fam == "rayleigh" or (fam == "ricean" and spec.shape == 0):
        return sum(1.0 / l for l in range(N - j + 1, N + 1))
    if fam == "nakagami":
        return N * _nakagami_nsnr_terms(spec.shape, N, j)
    k = fading.derived_scale(fading.normalized(spec)).mu_prime
    total = sum((-1) ** l * comb(j - 1, l) * (N - j + l + 1.0) ** -(1.0 + 1.0 / k) for l in range(j))
    return N * comb(N - 1, j - 1) * total


def _nsnr_rate_unit(spec, N, j, gn):
    fam = spec.family
    if fam == "rayleigh" or (fam == "ricean" and spec.shape == 0):
        a = N - j + np.arange(j) + 1.0
        terms = (-1.0) ** np.arange(j) * np.array([comb(j - 1, l) for l in range(j)]) / a * exp_e1_scaled(a / gn)
        return comb(N - 1, j - 1) * float(np.sum(terms)) / _LN2
    if fam == "nakagami":
        return _nakagami_nsnr_terms(spec.shape, N, j, gn)
    d = fading.derived_scale(fading.normalized(spec))
    k, B = d.mu_prime, d.beta
    total = 0.0
    for l in range(j):  # noqa: E741
        a = N - j + l + 1.0
        total += (-1) ** l * comb(j - 1, l) / a * (math.log(gn) - (math.log(a * B) + EULER_GAMMA) / k)
    return comb(N - 1, j - 1) * total / _LN2


def order_nsnr_rate(sys: SystemParams, j: int, n: int) -> float:
    """Per-user rate when the user with the j-th smallest normalized SNR is served."""
    _family(sys)
    _check_user(sys, j, n)
    return _nsnr_rate_unit(sys.user(n), sys.N, j, sys.gbar_n(n))


def order_nsnr_energy(sys: SystemParams, j: int, n: int) -> float:
    _family(sys)
    _check_user(sys, j, n)
    return sys.max_energy(n) * (1.0 - order_statistic_mean(sys.user(n), sys.N, j) / sys.N)


def order_nsnr_metrics(sys: SystemParams, j: int, n: int) -> UserMetrics:
    return UserMetrics(order_nsnr_rate(sys, j, n), order_nsnr_energy(sys, j, n))


# ------------------------------------------------------------------ order-based ET


def order_et(sys: SystemParams, s_a) -> ETResult:
    """Equal throughput restricted to users whose N-SNR order lies in ``s_a``.

    The common rate is the harmonic mean over users of each user's arithmetic
    mean N-SNR rate over the allowed orders. Feasibility is not checked here;
    see :func:`swiptsched.feasibility.check`.
    """
    _family(sys)
    N = sys.N
    s_a = sorted(set(s_a))
    if len(s_a) < 2:
        raise ValueError("the allowed order set needs at least two orders")
    if s_a[0] < 1 or s_a[-1] > N:
        raise ValueError(f"orders must lie in 1..{N}")
    size = len(s_a)
    sums = np.array([sum(order_nsnr_rate(sys, j, n) for j in s_a) for n in range(1, N + 1)])
    rate = 1.0 / np.mean(size / sums)
    p = 1.0 / np.array([np.sum(sums[n] / sums) for n in range(N)])
    spec = sys.users[0]
    mean_sum = sum(order_statistic_mean(spec, N, j) for j in s_a)
    energies = sys.eta * sys.power * sys.omegas * (1.0 - p / size * mean_sum)
    return ETResult(float(rate), p, energies)


# ------------------------------------------------------------------ exact-SNR Nakagami (validation path)


def _hyp_series(a_params, b_params, z, max_terms=2000, tol=1e-17):
    term = 1.0
    total = 1.0
    for k in range(max_terms):
        num = 1.0
        for a in a_params:
            num *= a + k
        den = float(k + 1)
        for b in b_params:
            den *= b + k
        if den == 0:
            raise SeriesDivergence(f"pole in hypergeometric denominator at term {k}")
        term *= num / den * z
        total += term
        if abs(term) <= tol * abs(total):
            return total
    raise SeriesDivergence(f"hypergeometric series did not converge for z={z}")


def nakagami_log_moment_exact(alpha: float, zeta: float, gbar: float, max_arg: float = 30.0) -> float:
    r"""``int_0^inf ln(1 + gbar x) x^{alpha-1} e^{-zeta x} dx`` via 1F1 / 2F2.

    The representation has a pole at integer ``alpha`` (through
    ``alpha sin(alpha pi)`` and the ``2 - alpha`` lower parameter); those
    inputs raise :class:`SeriesDivergence`, as do arguments ``zeta/gbar``
    beyond ``max_arg`` where the alternating series loses all precision.
    """
    if alpha <= 0 or zeta <= 0 or gbar <= 0:
        raise ValueError("alpha, zeta and gbar must be positive")
    if abs(alpha - round(alpha)) < 1e-9:
        raise SeriesDivergence(f"integer alpha={alpha} sits on a pole of the hypergeometric form")
    z = zeta / gbar
    if z > max_arg:
        raise SeriesDivergence(f"argument {z} too large for the series")
    first = gbar**-alpha * math.pi / (alpha * math.sin(alpha * math.pi)) * _hyp_series([alpha], [alpha + 1.0], z)
    # the 2F2 term enters with a plus sign; residue calculus and quadrature both confirm it
    bracket = math.log(z) - float(digamma(alpha)) + z / (1.0 - alpha) * _hyp_series([1.0, 1.0], [2.0, 2.0 - alpha], z)
    return first - math.gamma(alpha) * zeta**-alpha * bracket


def order_snr_rate_exact_nakagami(sys: SystemParams, j: int, n: int, budget: int = DEFAULT_BUDGET) -> float:
    """Exact order-SNR Nakagami rate through :func:`nakagami_log_moment_exact`.

    Every term has ``alpha = m + sum(s)``, an integer for integer m, so this
    raises :class:`SeriesDivergence` on all valid Nakagami inputs; exact
    rates are available from :func:`swiptsched.oracle.rate_integral_order_snr`.
    """
    if _family(sys) != "nakagami":
        raise ValueError("exact-SNR path is defined for Nakagami-m fading only")
    _check_user(sys, j, n)
    m = sys.users[0].shape
    lam = m / sys.omegas
    ln_ = lam[n - 1]
    total = 0.0
    for sign, idx in _u_sums(sys, j, n, lam, budget, terms_per_tuple=lambda length: m**length):
        for row in idx:
            zeta = ln_ + lam[row].sum()
            for s in Smr(m, len(row)):
                alpha = m + sum(s)
                w = math.prod(lam[u] ** st / math.factorial(st) for u, st in zip(row, s))
                total += sign * w * nakagami_log_moment_exact(alpha, zeta, sys.gbar)
    return ln_**m / math.gamma(m) * total / _LN2

