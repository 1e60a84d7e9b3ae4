"""System-level parameters shared by the analytical, oracle and simulation paths."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .fading import FadingSpec

__all__ = ["SystemParams", "UserMetrics", "dbm_to_watt", "watt_to_dbm", "omega_from_distance"]


def dbm_to_watt(dbm):
    return 10.0 ** (np.asarray(dbm, dtype=float) / 10.0) * 1e-3


def watt_to_dbm(watt):
    return 10.0 * np.log10(np.asarray(watt, dtype=float) / 1e-3)


def omega_from_distance(
    distance,
    exponent=2.76,
    wavelength=0.328,
    tx_gain_dbi=0.0,
    rx_gain_dbi=0.0,
    ref_distance=1.0,
):
    """Mean power gain from a free-space reference loss and a distance exponent.

    ``G_t G_r (wavelength / (4 pi d0))**2 (d0 / d)**exponent``. With the
    defaults (915 MHz, 0 dBi) distances of 4.6 m .. 2.27 m give mean gains
    of roughly 1e-5 .. 7e-5.
    """
    d = np.asarray(distance, dtype=float)
    if np.any(d <= 0):
        raise ValueError("distances must be positive")
    g = 10.0 ** ((tx_gain_dbi + rx_gain_dbi) / 10.0)
    ref = g * (wavelength / (4.0 * np.pi * ref_distance)) ** 2
    return ref * (ref_distance / d) ** exponent


@dataclass(frozen=True)
class SystemParams:
    """Transmit power and noise in watts, RF-to-DC efficiency, per-user channels."""

    power: float
    noise: float
    eta: float
    users: tuple

    def __init__(self, power: float, noise: float, eta: float, users: Sequence[FadingSpec]):
        object.__setattr__(self, "power", float(power))
        object.__setattr__(self, "noise", float(noise))
        object.__setattr__(self, "eta", float(eta))
        object.__setattr__(self, "users", tuple(users))
        if not (self.power > 0 and self.noise > 0):
            raise ValueError("power and noise must be positive")
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError("eta must lie in [0, 1]")
        if not self.users:
            raise ValueError("at least one user is required")

    @property
    def N(self) -> int:
        return len(self.users)

    @property
    def gbar(self) -> float:
        """Transmit SNR ``P / sigma^2``."""
        return self.power / self.noise

    @property
    def omegas(self) -> np.ndarray:
        return np.array([u.omega for u in self.users])

    def gbar_n(self, n: int) -> float:
        """Average SNR of user ``n`` (1-based)."""
        return self.gbar * self.users[n - 1].omega

    def user(self, n: int) -> FadingSpec:
        if not 1 <= n <= self.N:
            raise ValueError(f"user index {n} outside 1..{self.N}")
        return self.users[n - 1]

    def max_energy(self, n: int) -> float:
        """Energy harvested by a user that is never scheduled."""
        return self.eta * self.power * self.user(n).omega


@dataclass(frozen=True)
class UserMetrics:
    rate: float
    energy: float
