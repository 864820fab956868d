"""``lmg-lab`` command-line interface.

Every subcommand produces a table (fixed column order) written as CSV with
six significant digits or as JSON with full precision. When the output goes
to a file, a ``<file>.manifest.json`` sidecar records the command line,
parameters, seed, version and timestamp; JSON documents also embed it.

Output defaults to stdout. Setting ``LMG_LAB_OUTPUT_DIR`` makes every
command write ``<dir>/<command>.<ext>`` instead, unless ``--output`` is given.

Exit codes: 0 success, 1 numerical failure, 2 invalid arguments.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .opensystem import (
    BracketError,
    k3_sequential,
    k3_stationary,
    threshold_gamma,
    truncate,
)
from .params import DELTA_E_BENCHMARK, J_PHYS, ModelParams
from .spectrum import (
    ConvergenceError,
    NonlinearResponseError,
    eigenbasis_element,
    jz2_expectation,
    m0_weight,
    sign_observable,
    solve,
    susceptibility,
)

log = logging.getLogger("lmg_lab")

OUTPUT_ENV = "LMG_LAB_OUTPUT_DIR"

REFERENCE_GAMMAS = (0.005, 0.01, 0.02, 0.05, 0.1, 0.2, 0.3, 0.5, 1.0, 2.0)
K3_COLUMNS = ["gamma_phi_s", "levels", "protocol", "c12", "c23", "c13", "k3"]

OUTPUT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["command", "columns", "rows", "manifest"],
    "properties": {
        "command": {"type": "string"},
        "columns": {"type": "array", "items": {"type": "string"}},
        "rows": {
            "type": "array",
            "items": {"type": "object", "additionalProperties": {"type": ["number", "string", "null"]}},
        },
        "manifest": {
            "type": "object",
            "required": ["command_line", "parameters", "version", "timestamp"],
            "properties": {
                "command_line": {"type": "array", "items": {"type": "string"}},
                "parameters": {"type": "object"},
                "seed": {"type": ["integer", "null"]},
                "version": {"type": "string"},
                "timestamp": {"type": "string"},
                "outputs": {"type": "array", "items": {"type": "string"}},
            },
        },
    },
}


class UsageError(ValueError):
    """Invalid command-line input detected after parsing."""


@dataclass
class Table:
    columns: list[str]
    rows: list[dict]
    seed: int | None = None
    extra: dict = field(default_factory=dict)


@dataclass
class RunManifest:
    command_line: list[str]
    parameters: dict
    seed: int | None
    version: str
    timestamp: str
    outputs: list[str]

    def to_dict(self) -> dict:
        return asdict(self)


# ---------------------------------------------------------------- formatting

def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        if math.isnan(value):
            return "nan"
        return format(float(value), ".6g")
    return str(value)


def to_csv(table: Table) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([_fmt(row.get(c)) for c in table.columns])
    return buf.getvalue()


def _jsonable(value):
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, np.integer):
        return int(value)
    return value


def to_json(table: Table, command: str, manifest: RunManifest) -> str:
    doc = {
        "command": command,
        "columns": table.columns,
        "rows": [{c: _jsonable(r.get(c)) for c in table.columns} for r in table.rows],
        "manifest": manifest.to_dict(),
    }
    doc.update({k: _jsonable(v) for k, v in table.extra.items()})
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


# ---------------------------------------------------------------- helpers

def _params(args) -> ModelParams:
    return ModelParams(args.n, args.gamma_ratio, j_phys=args.j_phys, temp_nK=args.temp_nk)


def _system(params: ModelParams, levels: int):
    spec = solve(params, n_lowest=max(levels, 2))
    return truncate(spec, sign_observable(params.n_spins), levels, params.j_phys)


def _pool_map(fn, items, jobs: int):
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))  # map preserves input order


def _k3_row(sys, gamma: float, protocol: str) -> dict:
    fn = k3_sequential if protocol == "sequential" else k3_stationary
    rep = fn(sys, gamma)
    return dict(gamma_phi_s=gamma, levels=sys.n_levels, protocol=protocol,
                c12=rep.c12, c23=rep.c23, c13=rep.c13, k3=rep.k3)


# ---------------------------------------------------------------- commands

def cmd_spectrum(args) -> Table:
    p = _params(args)
    spec = solve(p)
    levels = min(args.levels, spec.dim)
    q = sign_observable(p.n_spins)
    row = dict(
        n_spins=p.n_spins,
        gamma_ratio=p.gamma_ratio,
        delta_e_rad_s=spec.delta_e * p.j_phys,
        q01_sq=eigenbasis_element(spec, q, 0, 1) ** 2,
        m0_weight_pct=100.0 * m0_weight(spec),
        gap_ratio_21=spec.gap_ratio(2) if spec.dim > 2 and spec.delta_e > 0 else math.nan,
        jz2_e0=jz2_expectation(spec, 0),
        jz2_e1=jz2_expectation(spec, 1),
    )
    try:
        row["chi_exact"] = susceptibility(p, "exact")
    except NonlinearResponseError as exc:
        log.warning("%s", exc)
        row["chi_exact"] = math.nan
    row["chi_two_level"] = (susceptibility(p, "two_level")
                            if p.gamma_ratio < 1 and spec.delta_e > 0 else math.nan)
    for k in range(levels):
        row[f"e{k}"] = spec.eigenvalues[k]
    return Table(list(row), [row])


def cmd_k3(args) -> Table:
    p = _params(args)
    sys = _system(p, args.levels)
    return Table(K3_COLUMNS, [_k3_row(sys, args.gamma_phi, args.protocol)])


def cmd_k3_scan(args) -> Table:
    p = _params(args)
    gammas = args.gammas or list(REFERENCE_GAMMAS)
    systems = {n: _system(p, n) for n in args.levels}
    tasks = [(n, g) for n in args.levels for g in gammas]
    rows = _pool_map(lambda t: _k3_row(systems[t[0]], t[1], args.protocol), tasks, args.jobs)
    return Table(K3_COLUMNS, rows)


def cmd_k3_curve(args) -> Table:
    """Two-level analytic K3 curves (dephasing-rate or T2 axis)."""
    from .semiclassics import k3_two_level_curve, two_level_coefficient

    p = _params(args)
    spec = solve(p, n_lowest=2)
    q01_sq = eigenbasis_element(spec, sign_observable(p.n_spins), 0, 1) ** 2
    if args.axis == "gamma":
        gammas = np.geomspace(args.x_min, args.x_max, args.samples)
        c_re = two_level_coefficient(spec, j_phys=p.j_phys)
        c_q = two_level_coefficient(spec, delta_e_rad_s=DELTA_E_BENCHMARK)
        k_re = k3_two_level_curve(gammas, c_re, q01_sq)
        k_q = k3_two_level_curve(gammas, c_q, q01_sq)
        rows = [dict(gamma_phi_s=g, k3_recomputed_gap=a, k3_quoted_gap=b)
                for g, a, b in zip(gammas, k_re, k_q)]
        return Table(["gamma_phi_s", "k3_recomputed_gap", "k3_quoted_gap"], rows,
                     extra={"coefficient_recomputed_gap": c_re, "coefficient_quoted_gap": c_q})
    x = np.linspace(args.x_min, args.x_max, args.samples)
    rows = []
    for xi in x:
        base = math.exp(-1.0 / (3.0 * xi)) if xi > 0 else 0.0
        ideal = base + 0.5 * base * base
        rows.append(dict(delta_e_t2_over_pi=xi, k3=q01_sq * ideal, k3_ideal=ideal))
    return Table(["delta_e_t2_over_pi", "k3", "k3_ideal"], rows, extra={"q01_sq": q01_sq})


def cmd_threshold(args) -> Table:
    p = _params(args)
    systems = {n: _system(p, n) for n in args.levels}
    values = _pool_map(lambda n: threshold_gamma(systems[n]), args.levels, args.jobs)
    rows = [dict(levels=n, gamma_thresh_s=g) for n, g in zip(args.levels, values)]
    return Table(["levels", "gamma_thresh_s"], rows)


def cmd_hierarchy(args) -> Table:
    from .semiclassics import hierarchy

    p = _params(args)
    spec = solve(p)
    gamma_c = threshold_gamma(_system(p, args.levels))
    rep = hierarchy(p, spec, gamma_c, reference_gamma=args.reference_gamma)
    row = asdict(rep)
    row["ratio_ab"] = rep.ratio_ab
    row["ratio_bc"] = rep.ratio_bc
    return Table(list(row), [row])


def cmd_goldilocks(args) -> Table:
    from .semiclassics import FITTED_C0_OVER_KBT, fit_c0, goldilocks

    if args.table:
        rows = []
        for g in sorted(FITTED_C0_OVER_KBT, reverse=True):
            r = goldilocks(g)
            rows.append(dict(gamma_ratio=g, s_inst=r.s_inst, c0_over_kbt=r.c0_over_kbt,
                             nc_analytic=r.nc_analytic, nc_root=r.nc_root,
                             nc_root_lo=r.nc_root_lo, nc_root_hi=r.nc_root_hi,
                             nc_root_lo_log=r.nc_root_lo_log, nc_root_hi_log=r.nc_root_hi_log,
                             underestimate=r.nc_root / r.nc_analytic))
        return Table(list(rows[0]), rows)

    if args.step <= 0 or args.n_min > args.n_max:
        raise UsageError("need step > 0 and n-min <= n-max")
    ns = sorted(set(range(args.n_min, args.n_max + 1, args.step)) | set(args.include))
    base = ModelParams(max(ns[0], 2), args.gamma_ratio, j_phys=args.j_phys, temp_nK=args.temp_nk)
    kbt = base.kbt_phys

    def gap(n):
        return solve(base.with_(n_spins=n), n_lowest=2).delta_e * base.j_phys

    gaps = _pool_map(gap, ns, args.jobs)
    columns = ["n_spins", "delta_e_rad_s", "delta_e_over_kbt"]
    rows = [dict(n_spins=n, delta_e_rad_s=g, delta_e_over_kbt=g / kbt) for n, g in zip(ns, gaps)]
    if args.derivative:
        columns.append("d_delta_e_dn")
        derivs = _pool_map(lambda n: (gap(n + 2) - gap(n - 2)) / 4.0, ns, args.jobs)
        for row, d in zip(rows, derivs):
            row["d_delta_e_dn"] = d
    extra = {}
    c0 = FITTED_C0_OVER_KBT.get(round(args.gamma_ratio, 6))
    if args.fit_c0:
        c0 = fit_c0(ns, [r["delta_e_over_kbt"] for r in rows], args.gamma_ratio)
        extra["c0_fit"] = c0
        log.info("fitted C0/kBT = %.6g", c0)
    if c0 is not None:
        from .semiclassics import instanton_splitting

        columns.append("instanton_over_kbt")
        for row in rows:
            row["instanton_over_kbt"] = float(instanton_splitting(row["n_spins"], args.gamma_ratio, c0))
    return Table(columns, rows, extra=extra)


def cmd_lz(args) -> Table:
    from .semiclassics import lz_crossover_schematic, lz_error, lz_normalized_time, lz_sweep_rate
    from .semiclassics import order_parameter, sweep_window

    p = _params(args)
    spec = solve(p, n_lowest=2)
    delta_e = spec.delta_e * p.j_phys
    m_star = order_parameter(p.gamma_ratio)
    window = sweep_window(p, spec.delta_e)
    delta_h = args.delta_h if args.delta_h is not None else math.sqrt(window[0] * window[1])
    alpha = lz_sweep_rate(p.n_spins, m_star, delta_h)
    taus = np.asarray(args.tau_q, dtype=float)
    perr = np.atleast_1d(lz_error(delta_e, p.n_spins, m_star, delta_h, taus, window=window))
    x = np.atleast_1d(lz_normalized_time(delta_e, alpha, taus))
    rows = [dict(tau_q_s=t, x=xi, p_error=pe, p_schematic=float(lz_crossover_schematic(xi)))
            for t, xi, pe in zip(taus, x, perr)]
    return Table(["tau_q_s", "x", "p_error", "p_schematic"], rows,
                 extra={"delta_h_rad_s": delta_h, "window_lo_rad_s": window[0],
                        "window_hi_rad_s": window[1]})


def cmd_n2(args) -> Table:
    """N = 2 exact solution against mean field over a grid of J/Gamma."""
    rows = []
    for x in np.linspace(args.x_min, args.x_max, args.samples):
        g = 1.0 / x
        spec = solve(ModelParams(2, g, j_phys=args.j_phys))
        v0 = spec.eigenvectors[:, 0]
        rows.append(dict(
            j_over_gamma=x,
            p_macro=v0[0] ** 2 + v0[2] ** 2,
            p_macro_closed=0.5 * (1 + x / math.sqrt(x * x + 16)),
            splitting_over_4gamma=spec.delta_e / (4 * g),
            splitting_closed=(math.sqrt(x * x + 16) - x) / 8,
            m_plus=math.sqrt(1 - g * g) if g < 1 else 0.0,
        ))
    return Table(list(rows[0]), rows)


def cmd_foil(args) -> Table:
    from .classical import LangevinConfig, classical_p_error, mfpt_estimate, temperature_for_exponent

    temp = args.temp_nk
    if args.exponent is not None:
        temp = temperature_for_exponent(args.n, args.gamma_ratio, args.exponent, args.j_phys)
    if args.mode == "mfpt":
        cfg = LangevinConfig(args.n, args.gamma_ratio, temp, gamma_eff=args.gamma_eff,
                             dt=args.dt, n_paths=args.paths, seed=args.seed, j_phys=args.j_phys)
        r = mfpt_estimate(cfg)
        row = dict(n_spins=args.n, gamma_ratio=args.gamma_ratio, temp_nk=temp,
                   exponent=r.exponent, mfpt_s=r.mean_s, stderr_s=r.stderr_s,
                   kramers_s=r.kramers_s, ratio=r.mean_s / r.kramers_s,
                   passages=r.n_passages, paths=r.n_paths, seed=args.seed)
        return Table(list(row), [row], seed=args.seed)
    p = ModelParams(args.n, args.gamma_ratio, j_phys=args.j_phys, temp_nK=temp)
    rows = []
    for tau in args.tau_q:
        pe = classical_p_error(tau, p, args.gamma_eff, delta_h=args.delta_h,
                               n_paths=args.paths, seed=args.seed, dt=args.dt)
        rows.append(dict(tau_q_s=tau, p_error=pe, seed=args.seed))
    return Table(["tau_q_s", "p_error", "seed"], rows, seed=args.seed)


def cmd_selftest(args) -> Table:
    from .selftest import run_selftest

    checks = run_selftest()
    rows = [dict(check=c.name, passed=int(c.passed), detail=c.detail) for c in checks]
    return Table(["check", "passed", "detail"], rows,
                 extra={"all_passed": all(c.passed for c in checks)})


# ---------------------------------------------------------------- parser

def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a list of numbers: {text!r}") from None


def _ints(text: str) -> list[int]:
    try:
        return [int(t) for t in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a list of integers: {text!r}") from None


def _model_args(p: argparse.ArgumentParser, n: int = 370) -> None:
    p.add_argument("--n", type=int, default=n, help="number of spins N")
    p.add_argument("--gamma-ratio", type=float, default=0.95, help="Gamma/J")
    p.add_argument("--j-phys", type=float, default=J_PHYS, help="J in rad/s")
    p.add_argument("--temp-nk", type=float, default=10.0, help="temperature in nK")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lmg-lab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--output", "-o", help="output file ('-' for stdout)")
    common.add_argument("--jobs", type=int, default=min(8, os.cpu_count() or 1))
    common.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", parents=[common], help="spectral observables")
    _model_args(p)
    p.add_argument("--levels", type=int, default=6, help="eigenvalues to list")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("k3", parents=[common], help="one K3 evaluation")
    _model_args(p)
    p.add_argument("--gamma-phi", type=float, required=True, help="dephasing rate, s^-1")
    p.add_argument("--levels", type=int, default=5)
    p.add_argument("--protocol", choices=("stationary", "sequential"), default="stationary")
    p.set_defaults(func=cmd_k3)

    p = sub.add_parser("k3-scan", parents=[common], help="K3 over a dephasing grid")
    _model_args(p)
    p.add_argument("--gammas", type=_floats, default=None,
                   help="comma-separated rates (default: the ten reference rates)")
    p.add_argument("--levels", type=_ints, default=[5, 10])
    p.add_argument("--protocol", choices=("stationary", "sequential"), default="stationary")
    p.set_defaults(func=cmd_k3_scan)

    p = sub.add_parser("k3-curve", parents=[common], help="two-level analytic K3 curves")
    _model_args(p)
    p.add_argument("--axis", choices=("gamma", "t2"), default="gamma")
    p.add_argument("--x-min", type=float, default=0.003)
    p.add_argument("--x-max", type=float, default=5.0)
    p.add_argument("--samples", type=int, default=200)
    p.set_defaults(func=cmd_k3_curve)

    p = sub.add_parser("threshold", parents=[common], help="K3 = 1 dephasing thresholds")
    _model_args(p)
    p.add_argument("--levels", type=_ints, default=[2, 3, 4, 5, 10])
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("hierarchy", parents=[common], help="A/B/C threshold hierarchy")
    _model_args(p)
    p.add_argument("--levels", type=int, default=5, help="truncation for level C")
    p.add_argument("--reference-gamma", type=float, default=0.05)
    p.set_defaults(func=cmd_hierarchy)

    p = sub.add_parser("goldilocks", parents=[common], help="tunnel splitting vs N and N_c table")
    p.add_argument("--gamma-ratio", type=float, default=0.95)
    p.add_argument("--j-phys", type=float, default=J_PHYS)
    p.add_argument("--temp-nk", type=float, default=10.0)
    p.add_argument("--n-min", type=int, default=50)
    p.add_argument("--n-max", type=int, default=500)
    p.add_argument("--step", type=int, default=10)
    p.add_argument("--include", type=int, action="append", default=[],
                   help="extra N values (repeatable)")
    p.add_argument("--derivative", action="store_true", help="add dDeltaE/dN (central, N+-2)")
    p.add_argument("--fit-c0", action="store_true", help="least-squares C0/kBT over the scan")
    p.add_argument("--table", action="store_true", help="emit the N_c table instead of a scan")
    p.set_defaults(func=cmd_goldilocks)

    p = sub.add_parser("lz", parents=[common], help="Landau-Zener sweep error")
    _model_args(p)
    p.add_argument("--tau-q", type=_floats, required=True, help="sweep times, s")
    p.add_argument("--delta-h", type=float, default=None,
                   help="bias amplitude, rad/s (default: geometric mid-window)")
    p.set_defaults(func=cmd_lz)

    p = sub.add_parser("n2", parents=[common], help="N = 2 exact vs mean field")
    p.add_argument("--j-phys", type=float, default=J_PHYS)
    p.add_argument("--x-min", type=float, default=0.05)
    p.add_argument("--x-max", type=float, default=6.0)
    p.add_argument("--samples", type=int, default=120)
    p.set_defaults(func=cmd_n2)

    p = sub.add_parser("foil", parents=[common], help="classical Langevin ensemble")
    _model_args(p, n=20)
    p.set_defaults(gamma_ratio=0.9)
    p.add_argument("--mode", choices=("mfpt", "p-error"), default="mfpt")
    p.add_argument("--exponent", type=float, default=None,
                   help="choose temp so that N df0/kBT equals this")
    p.add_argument("--gamma-eff", type=float, default=1.0)
    p.add_argument("--dt", type=float, default=0.05)
    p.add_argument("--paths", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tau-q", type=_floats, default=[1e-3], help="sweep times, s (p-error)")
    p.add_argument("--delta-h", type=float, default=None, help="bias amplitude, units of J")
    p.set_defaults(func=cmd_foil)

    p = sub.add_parser("selftest", parents=[common], help="run the built-in checks")
    p.set_defaults(func=cmd_selftest)
    return parser


def _destination(args) -> Path | None:
    if args.output and args.output != "-":
        return Path(args.output)
    if args.output is None and os.environ.get(OUTPUT_ENV):
        return Path(os.environ[OUTPUT_ENV]) / f"{args.command}.{args.format}"
    return None


def _parameters(args) -> dict:
    skip = {"func", "format", "output", "verbose", "jobs"}
    return {k: v for k, v in vars(args).items() if k not in skip}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.jobs < 1:
        print("lmg-lab: error: --jobs must be >= 1", file=sys.stderr)
        return 2

    try:
        table = args.func(args)
    except (ConvergenceError, BracketError, NonlinearResponseError, RuntimeError,
            ArithmeticError) as exc:
        print(f"lmg-lab: numerical failure: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"lmg-lab: error: {exc}", file=sys.stderr)
        return 2

    dest = _destination(args)
    manifest = RunManifest(
        command_line=["lmg-lab", *argv],
        parameters=_parameters(args),
        seed=table.seed,
        version=__version__,
        timestamp=datetime.now(timezone.utc).isoformat(timespec="seconds"),
        outputs=[str(dest)] if dest else [],
    )
    text = to_json(table, args.command, manifest) if args.format == "json" else to_csv(table)
    if dest is None:
        sys.stdout.write(text)
    else:
        dest.parent.mkdir(parents=True, exist_ok=True)
        dest.write_text(text)
        sidecar = dest.with_name(dest.name + ".manifest.json")
        sidecar.write_text(json.dumps(manifest.to_dict(), indent=2) + "\n")
        log.info("wrote %s", dest)

    if args.command == "selftest":
        failed = [r["check"] for r in table.rows if not r["passed"]]
        for r in table.rows:
            print(f"{'PASS' if r['passed'] else 'FAIL'}: {r['check']} ({r['detail']})",
                  file=sys.stderr)
        return 1 if failed else 0
    return 0


if __name__ == "__main__":
    sys.exit(main())
