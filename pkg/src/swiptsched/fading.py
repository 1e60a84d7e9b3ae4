"""
Channel power gain distributions: Rayleigh, Nakagami-m, Weibull and Ricean.

Every family is parameterized by its mean power gain ``omega`` plus one shape
parameter. ``h`` is the power gain (squared envelope), so Rayleigh means an
exponential ``h``, Nakagami-m a Gamma ``h``, and so on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import i0e
from scipy.stats import ncx2

from .specfun import marcum_approx_params

__all__ = [
    "FAMILIES",
    "FadingSpec",
    "DerivedScale",
    "rayleigh",
    "nakagami",
    "weibull",
    "ricean",
    "derived_scale",
    "ricean_equivalent_weibull",
    "pdf",
    "cdf",
    "sf",
    "sample",
    "normalized",
    "tail_point",
]

FAMILIES = ("rayleigh", "nakagami", "weibull", "ricean")


@dataclass(frozen=True)
class FadingSpec:
    """One user's channel power gain distribution.

    ``shape`` is ``m`` for Nakagami (positive integer), ``k`` for Weibull,
    ``K`` for Ricean and is ignored for Rayleigh.
    """

    family: str
    omega: float = 1.0
    shape: float = 1.0

    def __post_init__(self):
        fam = self.family.lower()
        object.__setattr__(self, "family", fam)
        if fam not in FAMILIES:
            raise ValueError(f"unknown fading family {self.family!r}")
        if not self.omega > 0:
            raise ValueError(f"omega must be positive, got {self.omega}")
        if fam == "rayleigh":
            object.__setattr__(self, "shape", 1.0)
        elif fam == "nakagami":
            if self.shape < 1 or int(self.shape) != self.shape:
                raise ValueError(f"Nakagami m must be a positive integer, got {self.shape}")
            object.__setattr__(self, "shape", int(self.shape))
        elif fam == "weibull":
            if not self.shape > 0:
                raise ValueError(f"Weibull k must be positive, got {self.shape}")
        elif not self.shape >= 0:
            raise ValueError(f"Ricean K must be non-negative, got {self.shape}")

    @property
    def key(self):
        """(family, shape) -- what must agree for users to share a closed form."""
        return (self.family, self.shape)


def rayleigh(omega=1.0):
    return FadingSpec("rayleigh", omega)


def nakagami(m, omega=1.0):
    return FadingSpec("nakagami", omega, m)


def weibull(k, omega=1.0):
    return FadingSpec("weibull", omega, k)


def ricean(K, omega=1.0):
    return FadingSpec("ricean", omega, K)


@dataclass(frozen=True)
class DerivedScale:
    """Rate parameters used by the closed forms.

    ``lam`` is lambda_n of the table (Rayleigh/Nakagami/Weibull). For Ricean
    fading ``beta`` and ``mu_prime`` describe the Weibull-equivalent cdf
    ``1 - exp(-beta x**mu_prime)``; for Weibull ``beta = lam**k`` and
    ``mu_prime = k`` so both families share one code path.
    """

    lam: float
    beta: float
    mu_prime: float


def derived_scale(spec: FadingSpec) -> DerivedScale:
    fam, om = spec.family, spec.omega
    if fam == "rayleigh":
        lam = 1.0 / om
        return DerivedScale(lam, lam, 1.0)
    if fam == "nakagami":
        lam = spec.shape / om
        return DerivedScale(lam, lam, 1.0)
    if fam == "weibull":
        k = spec.shape
        lam = math.gamma(1.0 + 1.0 / k) / om
        return DerivedScale(lam, lam**k, k)
    K = spec.shape
    p = marcum_approx_params(math.sqrt(2.0 * K))
    beta = math.exp(p.nu) * (2.0 * (K + 1.0) / om) ** (p.mu / 2.0)
    return DerivedScale(math.nan, beta, p.mu / 2.0)


def ricean_equivalent_weibull(spec: FadingSpec) -> FadingSpec:
    """The Weibull law whose cdf is the exponential Marcum approximation of ``spec``.

    Its mean is not exactly ``spec.omega``; the gap is the approximation error.
    """
    if spec.family != "ricean":
        raise ValueError("only Ricean specs have a Weibull equivalent")
    d = derived_scale(spec)
    k = d.mu_prime
    lam = d.beta ** (1.0 / k)
    return FadingSpec("weibull", math.gamma(1.0 + 1.0 / k) / lam, k)


def _effective(spec):
    # Ricean with K = 0 is Rayleigh; routes around the degenerate ncx2
    if spec.family == "ricean" and spec.shape == 0:
        return FadingSpec("rayleigh", spec.omega)
    return spec


def pdf(spec: FadingSpec, x):
    """Density of the power gain at ``x >= 0`` (vectorized)."""
    spec = _effective(spec)
    x = np.asarray(x, dtype=float)
    fam, om = spec.family, spec.omega
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        if fam == "rayleigh":
            out = np.exp(-x / om) / om
        elif fam == "nakagami":
            m = spec.shape
            lam = m / om
            out = np.exp(m * np.log(lam) + (m - 1) * np.log(x) - lam * x - math.lgamma(m))
            if m == 1:
                out = np.where(x == 0, lam, out)
            else:
                out = np.where(x == 0, 0.0, out)
        elif fam == "weibull":
            k = spec.shape
            lam = math.gamma(1.0 + 1.0 / k) / om
            out = k * lam**k * np.power(x, k - 1) * np.exp(-np.power(lam * x, k))
            if k == 1:
                out = np.where(x == 0, lam, out)
            elif k > 1:
                out = np.where(x == 0, 0.0, out)
        else:
            K = spec.shape
            c = (K + 1.0) / om
            z = 2.0 * np.sqrt(K * c * x)
            # I0(z) e^{-z} keeps the exponent bounded for large x
            out = c * np.exp(-K - c * x + z) * i0e(z)
    out = np.where(x < 0, 0.0, out)
    return float(out) if out.ndim == 0 else out


def sf(spec: FadingSpec, x, use_ricean_approx: bool = False):
    """Survival function ``1 - cdf`` (kept separate for accuracy in the tail)."""
    spec = _effective(spec)
    x = np.maximum(np.asarray(x, dtype=float), 0.0)
    fam, om = spec.family, spec.omega
    if fam == "rayleigh":
        out = np.exp(-x / om)
    elif fam == "nakagami":
        m = spec.shape
        t = m * x / om
        # finite series valid for integer m
        term = np.ones_like(t)
        acc = np.ones_like(t)
        for s in range(1, m):
            term = term * t / s
            acc = acc + term
        out = np.exp(-t) * acc
    elif fam == "weibull":
        k = spec.shape
        lam = math.gamma(1.0 + 1.0 / k) / om
        out = np.exp(-np.power(lam * x, k))
    elif use_ricean_approx:
        d = derived_scale(spec)
        out = np.exp(-d.beta * np.power(x, d.mu_prime))
    else:
        K = spec.shape
        out = ncx2.sf(2.0 * (K + 1.0) * x / om, 2, 2.0 * K)
    return float(out) if np.ndim(out) == 0 else out


def cdf(spec: FadingSpec, x, use_ricean_approx: bool = False):
    """Distribution function of the power gain.

    Ricean fading uses ``1 - Q1(sqrt(2K), sqrt(2(K+1)x/omega))`` unless
    ``use_ricean_approx`` selects the exponential (Weibull-equivalent) form.
    """
    out = 1.0 - np.asarray(sf(spec, x, use_ricean_approx))
    return float(out) if out.ndim == 0 else out


def sample(spec: FadingSpec, rng: np.random.Generator, size=None):
    """Draw power gains.

    Rayleigh and Weibull by inverse cdf, Nakagami-m as a sum of ``m`` unit
    exponentials (same uniforms as Rayleigh when m = 1), Ricean as the
    squared magnitude of a complex Gaussian with a line-of-sight mean.
    """
    fam, om = spec.family, spec.omega
    if fam == "rayleigh":
        return -np.log1p(-rng.random(size)) * om
    if fam == "nakagami":
        m = spec.shape
        shape = (m,) if size is None else (m,) + tuple(np.atleast_1d(size))
        return -np.log1p(-rng.random(shape)).sum(axis=0) * (om / m)
    if fam == "weibull":
        k = spec.shape
        lam = math.gamma(1.0 + 1.0 / k) / om
        return np.power(-np.log1p(-rng.random(size)), 1.0 / k) / lam
    K = spec.shape
    # line-of-sight component on the real axis, power K om/(K+1); scatter om/(K+1)
    los = math.sqrt(K * om / (K + 1.0))
    sd = math.sqrt(om / (2.0 * (K + 1.0)))
    re = rng.normal(los, sd, size)
    im = rng.normal(0.0, sd, size)
    return re * re + im * im


def normalized(spec: FadingSpec) -> FadingSpec:
    """Same family and shape with unit mean (the law of ``h / omega``)."""
    return replace(spec, omega=1.0)


def tail_point(spec: FadingSpec, tail_cut: float = 1e-12, use_ricean_approx: bool = False) -> float:
    """Smallest doubling of ``omega`` with ``1 - cdf < tail_cut``."""
    x = spec.omega
    while sf(spec, x, use_ricean_approx) >= tail_cut:
        x *= 2.0
    return x
