"""
Scenario files: a small ``key = value`` text format.

Blank lines and everything after ``#`` are ignored. Keys::

    power_w       = 1                 # transmit power in watts
    noise_dbm     = -96               # default; or noise_w = 2.5e-13
    eta           = 0.5
    family        = nakagami          # rayleigh | nakagami | weibull | ricean
    shape         = 3                 # m, k or K (unused for rayleigh)

    # users: exactly one of the three forms
    omegas        = 1e-5, 2e-5, 3e-5
    users         = 7                 # with omega_scale: omega_n = n * scale
    omega_scale   = 1e-5
    omega_rule    = linear            # or "normalized": n / mean(1..N) * scale
    distances     = 2.3, 3.1, 4.6     # with the optional path-loss keys below
    path_loss_exponent = 2.76
    wavelength_m  = 0.328
    tx_gain_dbi   = 0
    rx_gain_dbi   = 0

    policies      = rr; conv_et; order_snr(1..N); order_nsnr(1, N/2, N); order_et(N-1, N)
    sweep_users   = 2..16             # user counts for the user_count sweep
    slots         = 1000000
    seed          = 1
    out           = results.csv

Order arguments may use ``N`` (the user count), ``N/2`` (floor, at least 1),
``N-k`` and ranges ``a..b``. For ``order_snr``/``order_nsnr`` each listed
order becomes its own policy; for ``order_et`` the list is the allowed set.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from . import fading
from .sched_sim import Policy
from .system import SystemParams, dbm_to_watt, omega_from_distance

__all__ = ["ScenarioError", "PolicySpec", "Scenario", "parse", "load", "normalized_omegas"]

_KEYS = {
    "power_w", "noise_dbm", "noise_w", "eta", "family", "shape", "omegas", "users",
    "omega_scale", "omega_rule", "distances", "path_loss_exponent", "wavelength_m",
    "tx_gain_dbi", "rx_gain_dbi", "policies", "sweep_users", "slots", "seed", "out",
}  # fmt: skip


class ScenarioError(ValueError):
    def __init__(self, message, line=None, source="<scenario>"):
        self.line = line
        where = f"{source}:{line}: " if line is not None else f"{source}: "
        super().__init__(where + message)


@dataclass(frozen=True)
class PolicySpec:
    """A policy template whose order arguments may still refer to ``N``."""

    kind: str
    args: tuple = ()

    def resolve(self, N: int) -> list[Policy]:
        orders = _expand(self.args, N)
        if self.kind in ("rr", "conv_et"):
            return [Policy(self.kind)]
        if self.kind == "order_et":
            return [Policy.order_et(orders)]
        return [Policy(self.kind, j=j) for j in orders]


def _order_value(tok, N):
    tok = tok.replace(" ", "")
    if tok == "N":
        return N
    if tok == "N/2":
        return max(1, N // 2)
    m = re.fullmatch(r"N-(\d+)", tok)
    if m:
        return N - int(m.group(1))
    return int(tok)


def _expand(args, N):
    out = []
    for a in args:
        if ".." in a:
            lo, hi = a.split("..", 1)
            out.extend(range(_order_value(lo, N), _order_value(hi, N) + 1))
        else:
            out.append(_order_value(a, N))
    seen = []
    for j in out:
        if j not in seen:
            seen.append(j)
    return seen


def normalized_omegas(N, scale=1e-5):
    """``omega_n = n / ((1/N) sum_i i) * scale``: mean gain fixed at ``scale`` for any N."""
    mean_index = (N + 1) / 2.0
    return [n / mean_index * scale for n in range(1, N + 1)]


@dataclass(frozen=True)
class Scenario:
    power: float
    noise: float
    eta: float
    family: str
    shape: float
    omegas: tuple
    policies: tuple
    slots: int = 10**6
    seed: int = 0
    out: str | None = None
    omega_scale: float | None = None
    sweep_users: tuple = field(default_factory=lambda: tuple(range(2, 17)))

    @property
    def N(self):
        return len(self.omegas)

    def system(self, omegas=None) -> SystemParams:
        om = self.omegas if omegas is None else omegas
        return SystemParams(self.power, self.noise, self.eta, [fading.FadingSpec(self.family, o, self.shape) for o in om])

    def resolved_policies(self, N=None) -> list[Policy]:
        N = self.N if N is None else N
        out = []
        for spec in self.policies:
            for pol in spec.resolve(N):
                pol.validate(N)
                out.append(pol)
        return out


_POLICY_RE = re.compile(r"^\s*([a-z_]+)\s*(?:\((.*)\))?\s*$")


def _parse_policies(text, line, source):
    specs = []
    for item in text.split(";"):
        if not item.strip():
            continue
        m = _POLICY_RE.match(item)
        if not m:
            raise ScenarioError(f"cannot parse policy {item.strip()!r}", line, source)
        kind, inner = m.group(1), m.group(2)
        if kind not in ("rr", "conv_et", "order_snr", "order_nsnr", "order_et"):
            raise ScenarioError(f"unknown policy {kind!r}", line, source)
        args = tuple(a.strip() for a in inner.split(",")) if inner and inner.strip() else ()
        if kind in ("rr", "conv_et") and args:
            raise ScenarioError(f"{kind} takes no arguments", line, source)
        if kind not in ("rr", "conv_et") and not args:
            raise ScenarioError(f"{kind} needs order arguments", line, source)
        for a in args:
            for part in a.split(".."):
                if not re.fullmatch(r"\s*(\d+|N|N/2|N-\d+)\s*", part):
                    raise ScenarioError(f"bad order {a!r} in {kind}", line, source)
        specs.append(PolicySpec(kind, args))
    if not specs:
        raise ScenarioError("at least one policy is required", line, source)
    return tuple(specs)


def _floats(text, key, line, source):
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ScenarioError(f"{key} must be a comma-separated list of numbers", line, source) from None
    if not vals:
        raise ScenarioError(f"{key} is empty", line, source)
    return vals


def parse(text: str, source: str = "<scenario>") -> Scenario:
    raw, lines = {}, {}
    for i, full in enumerate(text.splitlines(), start=1):
        body = full.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ScenarioError(f"expected 'key = value', got {body!r}", i, source)
        key, value = (s.strip() for s in body.split("=", 1))
        if key not in _KEYS:
            raise ScenarioError(f"unknown key {key!r}", i, source)
        if key in raw:
            raise ScenarioError(f"duplicate key {key!r} (first on line {lines[key]})", i, source)
        raw[key], lines[key] = value, i

    def num(key, default=None, kind=float):
        if key not in raw:
            if default is None:
                raise ScenarioError(f"missing required key {key!r}", None, source)
            return default
        try:
            return kind(raw[key])
        except ValueError:
            raise ScenarioError(f"{key} must be a number, got {raw[key]!r}", lines[key], source) from None

    power = num("power_w", 1.0)
    if "noise_dbm" in raw and "noise_w" in raw:
        raise ScenarioError("give noise_dbm or noise_w, not both", lines["noise_w"], source)
    noise = num("noise_w") if "noise_w" in raw else float(dbm_to_watt(num("noise_dbm", -96.0)))
    eta = num("eta", 0.5)
    family = raw.get("family", "rayleigh").lower()
    if family not in fading.FAMILIES:
        raise ScenarioError(f"unknown family {family!r}", lines.get("family"), source)
    shape = num("shape", 1.0)

    forms = [k for k in ("omegas", "users", "distances") if k in raw]
    if len(forms) != 1:
        raise ScenarioError("give exactly one of omegas, users (+ omega_scale) or distances", None, source)
    scale = None
    if "omegas" in raw:
        omegas = _floats(raw["omegas"], "omegas", lines["omegas"], source)
    elif "users" in raw:
        N = num("users", kind=int)
        scale = num("omega_scale", 1e-5)
        rule = raw.get("omega_rule", "linear")
        if rule == "linear":
            omegas = [n * scale for n in range(1, N + 1)]
        elif rule == "normalized":
            omegas = normalized_omegas(N, scale)
        else:
            raise ScenarioError(f"omega_rule must be linear or normalized, got {rule!r}", lines["omega_rule"], source)
    else:
        d = _floats(raw["distances"], "distances", lines["distances"], source)
        omegas = list(
            omega_from_distance(
                d,
                exponent=num("path_loss_exponent", 2.76),
                wavelength=num("wavelength_m", 0.328),
                tx_gain_dbi=num("tx_gain_dbi", 0.0),
                rx_gain_dbi=num("rx_gain_dbi", 0.0),
            )
        )
    if "policies" not in raw:
        raise ScenarioError("missing required key 'policies'", None, source)
    policies = _parse_policies(raw["policies"], lines["policies"], source)

    sweep = tuple(range(2, 17))
    if "sweep_users" in raw:
        m = re.fullmatch(r"\s*(\d+)\s*\.\.\s*(\d+)\s*", raw["sweep_users"])
        if m:
            sweep = tuple(range(int(m.group(1)), int(m.group(2)) + 1))
        else:
            sweep = tuple(int(v) for v in _floats(raw["sweep_users"], "sweep_users", lines["sweep_users"], source))

    try:
        sc = Scenario(
            power=power,
            noise=noise,
            eta=eta,
            family=family,
            shape=shape,
            omegas=tuple(float(o) for o in omegas),
            policies=policies,
            slots=num("slots", 10**6, int),
            seed=num("seed", 0, int),
            out=raw.get("out"),
            omega_scale=scale,
            sweep_users=sweep,
        )
        sc.system()
    except ValueError as exc:
        raise ScenarioError(str(exc), None, source) from None
    try:
        sc.resolved_policies()
    except ValueError as exc:
        raise ScenarioError(str(exc), lines["policies"], source) from None
    return sc


def load(path) -> tuple[Scenario, bytes]:
    """Parse a scenario file; also return its raw bytes for hashing."""
    data = Path(path).read_bytes()
    return parse(data.decode("utf-8"), source=str(path)), data
