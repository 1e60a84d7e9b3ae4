"""
Command line: ``swiptsched {analyze,simulate,sweep,feascheck} --scenario FILE``.

Results go to a CSV file (``--out``, else the scenario's ``out`` key, else
stdout) with a JSON sidecar ``<out>.json`` holding the scenario hash, seed
and package versions. Output is byte-stable for a fixed scenario and seed.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import itertools
import json
import platform
import sys as _sys
from concurrent.futures import ProcessPoolExecutor
from importlib import metadata
from pathlib import Path

import numpy as np
import scipy

from . import feasibility, sched_sim
from .closed_form import MixedFamilies
from .combinatorics import DEFAULT_BUDGET, BudgetExceeded
from .evaluate import closed_form_metrics, oracle_metrics
from .scenario import ScenarioError, load, normalized_omegas
from .sched_sim import Policy

__all__ = ["COLUMNS", "FEAS_COLUMNS", "main", "build_parser"]

COLUMNS = [
    "scheme", "order", "n_users", "user",
    "cf_rate", "cf_energy", "oracle_rate", "oracle_energy",
    "sim_rate", "sim_rate_se", "sim_energy", "sim_energy_se",
    "p", "feasible",
]  # fmt: skip
FEAS_COLUMNS = ["scheme", "order", "user", "p", "per_user_cap", "feasible", "violations"]

SWEEP_AXES = ("order_j", "s_a_catalog", "user_count")


class CliError(RuntimeError):
    pass


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _order_label(policy):
    if policy.j is not None:
        return str(policy.j)
    if policy.s_a is not None:
        return "{" + ",".join(map(str, policy.s_a)) + "}"
    return ""


# ---------------------------------------------------------------- row builders


def _rows_for(system, policy, *, with_oracle=False, budget=DEFAULT_BUDGET, sim=None):
    """Rows for one (system, policy) cell; ``sim`` is an optional SimResult."""
    N = system.N
    cf = orc = None
    try:
        cf = closed_form_metrics(system, policy, budget)
    except BudgetExceeded as exc:
        if not with_oracle:
            raise CliError(f"{policy}: {exc}. Rerun with --oracle to fill the quadrature columns instead.") from None
    except MixedFamilies:
        cf = None
    if with_oracle:
        orc = oracle_metrics(system, policy, budget)
    p = cf.p if cf is not None and cf.p is not None else (orc.p if orc is not None else None)
    verdict = None
    if policy.kind == "order_et" and p is not None:
        verdict = feasibility.check(p, policy.s_a, N).feasible
    rows = []
    for n in range(N):
        rows.append(
            [
                policy.kind,
                _order_label(policy),
                N,
                n + 1,
                None if cf is None else cf.rates[n],
                None if cf is None else cf.energies[n],
                None if orc is None else orc.rates[n],
                None if orc is None else orc.energies[n],
                None if sim is None else sim.rates[n],
                None if sim is None else sim.rate_se[n],
                None if sim is None else sim.energies[n],
                None if sim is None else sim.energy_se[n],
                None if p is None else p[n],
                verdict,
            ]
        )
    return rows


def _cell(args):
    system, policy, with_oracle, budget = args
    return _rows_for(system, policy, with_oracle=with_oracle, budget=budget)


def _map_cells(cells, workers):
    if workers > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_cell, cells))
    return [_cell(c) for c in cells]


def sweep_cells(scenario, axis):
    """(system, policy) pairs for one sweep axis, in output order."""
    if axis == "order_j":
        kinds = []
        for spec in scenario.policies:
            if spec.kind in ("order_snr", "order_nsnr") and spec.kind not in kinds:
                kinds.append(spec.kind)
        if not kinds:
            raise CliError("the order_j sweep needs an order_snr or order_nsnr policy in the scenario")
        system = scenario.system()
        return [(system, Policy(k, j=j)) for k in kinds for j in range(1, scenario.N + 1)]
    if axis == "s_a_catalog":
        if not any(spec.kind == "order_et" for spec in scenario.policies):
            raise CliError("the s_a_catalog sweep needs an order_et policy in the scenario")
        N = scenario.N
        if N > 10:
            raise CliError(f"s_a_catalog enumerates 2^N-(N+1) sets; N={N} exceeds the limit of 10")
        system = scenario.system()
        return [
            (system, Policy.order_et(s))
            for size in range(2, N + 1)
            for s in itertools.combinations(range(1, N + 1), size)
        ]
    if axis == "user_count":
        scale = scenario.omega_scale or 1e-5
        cells = []
        for N in scenario.sweep_users:
            system = scenario.system(normalized_omegas(N, scale))
            for spec in scenario.policies:
                try:
                    pols = spec.resolve(N)
                    for pol in pols:
                        pol.validate(N)
                except ValueError:
                    continue  # policy not defined at this N (e.g. order_et with N = 1)
                cells.extend((system, pol) for pol in pols)
        return cells
    raise CliError(f"unknown sweep axis {axis!r}; expected one of {SWEEP_AXES}")


# ---------------------------------------------------------------- output


def _write(out, header, rows, meta):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(x) for x in r])
    if out is None:
        _sys.stdout.write(buf.getvalue())
        return
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(buf.getvalue(), encoding="utf-8")
    Path(str(path) + ".json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(f"wrote {len(rows)} rows to {path}", file=_sys.stderr)


def _versions():
    try:
        pkg = metadata.version("artifact")
    except metadata.PackageNotFoundError:
        pkg = "unknown"
    return {"package": pkg, "numpy": np.__version__, "scipy": scipy.__version__, "python": platform.python_version()}


def _meta(args, raw, **extra):
    meta = {
        "verb": args.verb,
        "scenario": str(args.scenario),
        "scenario_sha256": hashlib.sha256(raw).hexdigest(),
        "oracle": bool(getattr(args, "oracle", False)),
        "budget": args.budget,
        "versions": _versions(),
        "columns": extra.pop("columns", COLUMNS),
    }
    meta.update(extra)
    return meta


# ---------------------------------------------------------------- verbs


def cmd_analyze(args, scenario, raw):
    system = scenario.system()
    cells = [(system, pol, args.oracle, args.budget) for pol in scenario.resolved_policies()]
    rows = [r for block in _map_cells(cells, args.workers) for r in block]
    _write(args.out or scenario.out, COLUMNS, rows, _meta(args, raw))


def cmd_simulate(args, scenario, raw):
    system = scenario.system()
    seed = scenario.seed if args.seed is None else args.seed
    slots = scenario.slots if args.slots is None else args.slots
    policies = scenario.resolved_policies()
    children = np.random.SeedSequence(seed).spawn(len(policies))
    rows = []
    for pol, child in zip(policies, children):
        res = sched_sim.run(system, pol, slots=slots, seed=child)
        rows.extend(_rows_for(system, pol, with_oracle=args.oracle, budget=args.budget, sim=res))
    _write(args.out or scenario.out, COLUMNS, rows, _meta(args, raw, seed=seed, slots=slots))


def cmd_sweep(args, scenario, raw):
    cells = [(s, p, args.oracle, args.budget) for s, p in sweep_cells(scenario, args.axis)]
    rows = [r for block in _map_cells(cells, args.workers) for r in block]
    _write(args.out or scenario.out, COLUMNS, rows, _meta(args, raw, axis=args.axis))


def cmd_feascheck(args, scenario, raw):
    system = scenario.system()
    policies = [p for p in scenario.resolved_policies() if p.kind == "order_et"]
    if not policies:
        raise CliError("feascheck needs at least one order_et policy in the scenario")
    rows = []
    for pol in policies:
        p = closed_form_metrics(system, pol, args.budget).p
        rep = feasibility.check(p, pol.s_a, system.N)
        viol = " ".join(
            f"{v.condition}{list(v.users)}:{v.lhs:.6g}>{v.rhs:.6g}".replace(" ", "") for v in rep.violated
        )
        print(f"{pol}: {'FEASIBLE' if rep.feasible else 'INFEASIBLE'}", file=_sys.stderr)
        cap = len(pol.s_a) / system.N
        for n in range(system.N):
            rows.append([pol.kind, _order_label(pol), n + 1, p[n], p[n] <= cap + feasibility.SLACK, rep.feasible, viol])
    _write(args.out or scenario.out, FEAS_COLUMNS, rows, _meta(args, raw, columns=FEAS_COLUMNS))


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", required=True, type=Path, help="scenario file (key = value)")
    common.add_argument("--out", help="CSV output path (default: scenario 'out' or stdout)")
    common.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="max terms in a closed-form expansion")
    common.add_argument("--oracle", action="store_true", help="add quadrature columns")
    common.add_argument("--workers", type=int, default=1, help="worker processes for analyze/sweep cells")

    parser = argparse.ArgumentParser(prog="swiptsched", description="Rate-energy analysis of SWIPT schedulers.")
    sub = parser.add_subparsers(dest="verb", required=True)
    sub.add_parser("analyze", parents=[common], help="closed forms (and --oracle quadrature) per policy and user")
    sim = sub.add_parser("simulate", parents=[common], help="Monte Carlo next to the closed forms")
    sim.add_argument("--seed", type=int, help="override the scenario seed")
    sim.add_argument("--slots", type=int, help="override the scenario slot count")
    sw = sub.add_parser("sweep", parents=[common], help="closed forms along one axis")
    sw.add_argument("--axis", choices=SWEEP_AXES, required=True)
    sub.add_parser("feascheck", parents=[common], help="equal-throughput feasibility of order_et policies")
    return parser


_VERBS = {"analyze": cmd_analyze, "simulate": cmd_simulate, "sweep": cmd_sweep, "feascheck": cmd_feascheck}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.budget < 1:
        print("error: --budget must be positive", file=_sys.stderr)
        return 2
    try:
        scenario, raw = load(args.scenario)
        _VERBS[args.verb](args, scenario, raw)
    except (ScenarioError, CliError, OSError) as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
