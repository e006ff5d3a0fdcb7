"""Command-line front end ``spec2d``.

Every subcommand produces a table (columns plus rows) that is written as
CSV (17 significant digits, unit-annotated header) or as JSON with keys
"schema", "params", "columns" and "rows". Output depends only on the
flags, so repeated runs are byte-identical.
"""

import argparse
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import momentum_rep as mr
from . import slab_limit as sl
from . import spectral_core as spc
from .errors import Spec2DError

SCHEMA_VERSION = 1


@dataclass
class Table:
    """Command result: named columns with unit labels and row tuples."""

    name: str
    columns: list
    units: list
    rows: list = field(default_factory=list)
    params: dict = field(default_factory=dict)
    ok: bool = True


# ---------------------------------------------------------------- formatting

def _fmt_csv(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return format(v, ".17g")
    if v is None:
        return ""
    return str(v)


def _json_value(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else None
    return v


def render(table: Table, fmt: str) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        head = [c if not u else f"{c} [{u}]" for c, u in zip(table.columns, table.units)]
        buf.write(",".join(head) + "\n")
        for row in table.rows:
            buf.write(",".join(_fmt_csv(v) for v in row) + "\n")
        return buf.getvalue()
    doc = {
        "schema": f"spec2d/{table.name}/v{SCHEMA_VERSION}",
        "params": {k: _json_value(v) for k, v in sorted(table.params.items())},
        "columns": list(table.columns),
        "units": list(table.units),
        "rows": [[_json_value(v) for v in row] for row in table.rows],
    }
    return json.dumps(doc, indent=1, sort_keys=False) + "\n"


# ---------------------------------------------------------------- argument types

def _positive(text):
    v = float(text)
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"expected a positive finite number, got {text!r}")
    return v


def _finite(text):
    v = float(text)
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"expected a finite number, got {text!r}")
    return v


def _kappa(text):
    if text.strip().lower() in ("inf", "+inf", "infinity", "friedrichs"):
        return spc.FRIEDRICHS
    return _finite(text)


def _float_list(text):
    try:
        vals = [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc
    if not vals or not all(v > 0 and math.isfinite(v) for v in vals):
        raise argparse.ArgumentTypeError("expected a comma-separated list of positive numbers")
    return vals


def _count(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("expected a positive integer")
    return v


def _threads(args) -> int:
    env = os.environ.get("SPEC2D_THREADS")
    if env:
        return max(1, int(env))
    if args.threads:
        return args.threads
    return os.cpu_count() or 1


# ---------------------------------------------------------------- commands

def cmd_point_levels(args) -> Table:
    Z = args.Z
    if args.kappa is not None:
        if args.kappa is spc.FRIEDRICHS:
            raise Spec2DError("the Friedrichs extension has no point levels")
        kappas = [args.kappa]
    else:
        if args.steps < 2:
            raise Spec2DError("--steps must be at least 2")
        kappas = list(np.linspace(args.kappa_min, args.kappa_max, args.steps))
    unit = "Z^2" if args.natural else "energy"
    cols = ["kappa", "j", "epsilon", "k", "status"]
    units = ["", "", unit, "Z" if not args.natural else "", ""]
    if args.asymptotes:
        cols += ["asymptote"]
        units += [unit]
    table = Table("point-levels", cols, units,
                  params={"Z": Z, "j_max": args.j_max, "natural": args.natural})

    def one(kappa):
        try:
            tab = spc.point_levels(spc.SpectralParams(Z, float(kappa)), args.j_max, solver_tol=args.tol)
            out = []
            for lv in tab.levels:
                eps, k = lv.epsilon, lv.k
                if args.natural:
                    eps, k = eps / Z ** 2, k
                row = [float(kappa), lv.j, eps, k, "ok"]
                if args.asymptotes:
                    # the large-|kappa| formulas have no meaning at kappa = 0
                    asy = (spc.point_level_asymptotics(Z, float(kappa), lv.j)["leading"]
                           if kappa != 0 else float("nan"))
                    row.append(asy / Z ** 2 if args.natural else asy)
                out.append(row)
            return out
        except Spec2DError as exc:
            row = [float(kappa), -1, float("nan"), float("nan"), f"error: {type(exc).__name__}"]
            return [row + ([float("nan")] if args.asymptotes else [])]

    with ThreadPoolExecutor(max_workers=_threads(args)) as pool:
        for rows in pool.map(one, kappas):
            table.rows.extend(rows)
            table.ok &= all(r[4] == "ok" for r in rows)
    if args.gnuplot:
        with open(args.gnuplot, "w", encoding="utf-8") as fh:
            fh.write(gnuplot_script(args.out or "point_levels.csv", args.j_max))
    return table


def gnuplot_script(data_path: str, j_max: int) -> str:
    """Script plotting -epsilon_j against kappa on a logarithmic vertical axis."""
    lines = [
        "set datafile separator ','",
        "set key off",
        "set logscale y",
        "set xlabel 'kappa'",
        "set ylabel '-epsilon'",
    ]
    plots = [f"'{data_path}' every ::1 using 1:($2=={j} ? -$3 : 1/0) with lines" for j in range(j_max)]
    plots += [f"{1.0 / (2 * N - 1) ** 2!r} with lines dashtype 2" for N in range(1, j_max + 1)]
    lines.append("plot " + ", \\\n     ".join(plots))
    return "\n".join(lines) + "\n"


def cmd_green(args) -> Table:
    kappa = spc.FRIEDRICHS if args.kappa is None else args.kappa
    params = spc.SpectralParams(args.Z, kappa)
    z = complex(args.z_re, args.z_im)
    rhos = np.geomspace(args.rho_min, args.rho_max, args.points)
    table = Table("green", ["rho1", "rho2", "dphi", "re", "im", "re_swapped", "im_swapped", "tail_bound"],
                  ["length", "length", "rad", "", "", "", "", ""],
                  params={"Z": args.Z, "kappa": "friedrichs" if params.is_friedrichs else params.kappa,
                          "z_re": args.z_re, "z_im": args.z_im, "m_max": args.m_max})
    p1 = (args.rho1, 0.0)
    for r in rhos:
        p2 = (float(r), args.dphi)
        g = spc.green_full(params, z, p1, p2, m_max=args.m_max)
        gs = spc.green_full(params, z, p2, p1, m_max=args.m_max)
        table.rows.append([args.rho1, float(r), args.dphi, g.value.real, g.value.imag,
                           gs.value.real, gs.value.imag, g.tail_bound])
    return table


def cmd_spectrum(args) -> Table:
    kappa = spc.FRIEDRICHS if args.kappa is None else args.kappa
    params = spc.SpectralParams(args.Z, kappa)
    table = Table("spectrum", ["kind", "m", "n", "N", "energy", "multiplicity"],
                  ["", "", "", "", "energy", ""],
                  params={"Z": args.Z, "kappa": "friedrichs" if params.is_friedrichs else params.kappa})
    for m in range(0, args.m_max + 1):
        for n in range(0, args.n_max + 1):
            bs = spc.eigenvalue(params, m, n)
            # a point interaction replaces the whole m = 0 channel by its point levels
            if params.is_friedrichs:
                mult = bs.multiplicity
            elif m == 0:
                continue
            else:
                mult = bs.multiplicity - 1
            table.rows.append(["coulomb", m, n, bs.N, bs.lam, mult])
    if not params.is_friedrichs:
        tab = spc.point_levels(params, args.n_max + 1, solver_tol=args.tol)
        for lv in tab.levels:
            table.rows.append(["point", 0, lv.j, 0, lv.epsilon, 1])
    table.rows.sort(key=lambda r: (r[4], r[1], r[2]))
    return table


def cmd_transform_check(args) -> Table:
    rep = mr.transform_report(args.Z)
    table = Table("transform-check", ["metric", "value", "threshold", "pass"], ["", "", "", ""],
                  params={"Z": args.Z})
    for name, val, thr in [("parseval_defect", rep.parseval_defect, 1e-5),
                           ("bound_state_leakage", rep.bound_state_leakage, 1e-6),
                           ("roundtrip_error", rep.roundtrip_error, 1e-6)]:
        table.rows.append([name, val, thr, bool(val < thr)])
    table.ok = all(r[3] for r in table.rows)
    return table


def _grid_from_args(args) -> Optional[sl.RadialGrid]:
    if args.grid_h is None and args.grid_R is None:
        return None
    R = args.grid_R if args.grid_R is not None else 20.0
    h = args.grid_h if args.grid_h is not None else 1e-3 * R
    return sl.RadialGrid(h=R / round(R / h), R=R)


def cmd_slab_converge(args) -> Table:
    grid = _grid_from_args(args)
    recs = sl.convergence_study(args.eta, args.a, grid=grid, n_modes=args.modes, threads=_threads(args))
    cols = ["a", "eta", "slab_vs_coulomb", "effective_vs_coulomb", "slab_vs_effective",
            "theorem_rhs", "proposition_rhs", "admissible", "respects_bounds", "fit_c1", "fit_c2"]
    table = Table("slab-converge", cols, ["Z^-1 length", "Z^2"] + [""] * (len(cols) - 2),
                  params={"eta": args.eta, "modes": args.modes,
                          "grid_h": (grid or sl.RadialGrid(0.005, 20.0)).h,
                          "grid_R": (grid or sl.RadialGrid(0.005, 20.0)).R})
    for r in recs:
        table.rows.append([r.a, r.xi, r.resolvent_diff, r.effective_diff, r.slab_effective_diff,
                           r.theorem_rhs, r.proposition_rhs, r.admissible, r.respects_bounds,
                           r.fit_c1, r.fit_c2])
    table.ok = all(r.respects_bounds for r in recs)
    return table


def cmd_constants(args) -> Table:
    c1, c2 = sl.constants("loggamma"), sl.constants("agm")
    table = Table("constants", ["name", "value", "value_agm_route"], ["", "", ""])
    for name in ("C_I", "C_II", "C_III"):
        table.rows.append([name, getattr(c1, name), getattr(c2, name)])
    table.rows.append(["kato", sl.kato_constant(), sl._gamma_quarter("agm") ** 4 / (4 * math.pi ** 2)])
    table.rows.append(["int_W", sl.W_INTEGRAL, sl.w_integral(200.0) + sl.w_tail_moment() / 200.0])
    return table


def cmd_verify(args) -> Table:
    from .verify import run_suite
    suites = ["specfun", "spectral", "momentum", "slab"] if args.suite == "all" else [args.suite]
    table = Table("verify", ["suite", "invariant", "measured", "threshold", "pass"], [""] * 5,
                  params={"suite": args.suite, "seed": args.seed})
    for s in suites:
        for name, val, thr, ok in run_suite(s, seed=args.seed):
            table.rows.append([s, name, val, thr, bool(ok)])
    table.ok = all(r[4] for r in table.rows)
    return table


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", default=None, help="output file (default: stdout)")
    common.add_argument("--tol", type=_positive, default=1e-12, help="solver tolerance")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized checks")
    common.add_argument("--threads", type=_count, default=None,
                        help="worker count (SPEC2D_THREADS overrides; default: CPU count)")

    p = argparse.ArgumentParser(prog="spec2d", description="2D Coulomb point-interaction spectra and slab limit")
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("point-levels", parents=[common], help="point levels over a kappa range")
    q.add_argument("--Z", type=_positive, default=1.0)
    q.add_argument("--kappa", type=_kappa, default=None, help="single kappa (overrides the range)")
    q.add_argument("--kappa-min", type=_finite, default=-5.0)
    q.add_argument("--kappa-max", type=_finite, default=10.0)
    q.add_argument("--steps", type=int, default=61)
    q.add_argument("--j-max", type=_count, default=4, help="number of levels j = 0 .. j_max-1")
    q.add_argument("--asymptotes", action="store_true", help="append the large-|kappa| leading formula")
    q.add_argument("--natural", action="store_true", help="energies in units of Z^2")
    q.add_argument("--gnuplot", default=None, help="also write a gnuplot script to this path")
    q.set_defaults(func=cmd_point_levels)

    q = sub.add_parser("green", parents=[common], help="samples of the full-plane Green function")
    q.add_argument("--Z", type=_positive, default=1.0)
    q.add_argument("--kappa", type=_kappa, default=None, help="kappa or 'friedrichs' (default)")
    q.add_argument("--z-re", type=_finite, default=-0.5)
    q.add_argument("--z-im", type=_finite, default=0.0)
    q.add_argument("--rho1", type=_positive, default=1.0)
    q.add_argument("--rho-min", type=_positive, default=0.1)
    q.add_argument("--rho-max", type=_positive, default=10.0)
    q.add_argument("--dphi", type=_finite, default=1.0)
    q.add_argument("--points", type=_count, default=9)
    q.add_argument("--m-max", type=_count, default=64)
    q.set_defaults(func=cmd_green)

    q = sub.add_parser("spectrum", parents=[common], help="discrete spectrum listing")
    q.add_argument("--Z", type=_positive, default=1.0)
    q.add_argument("--kappa", type=_kappa, default=None)
    q.add_argument("--m-max", type=int, default=3)
    q.add_argument("--n-max", type=int, default=3)
    q.set_defaults(func=cmd_spectrum)

    q = sub.add_parser("transform-check", parents=[common], help="unitarity diagnostics of the m = 0 transform")
    q.add_argument("--Z", type=_positive, default=1.0)
    q.set_defaults(func=cmd_transform_check)

    q = sub.add_parser("slab-converge", parents=[common], help="slab versus planar resolvent differences")
    q.add_argument("--a", type=_float_list, default=[0.4, 0.2, 0.1, 0.05])
    q.add_argument("--eta", type=_finite, default=-0.5)
    q.add_argument("--modes", type=_count, default=4)
    q.add_argument("--grid-h", type=_positive, default=None)
    q.add_argument("--grid-R", type=_positive, default=None)
    q.set_defaults(func=cmd_slab_converge)

    q = sub.add_parser("constants", parents=[common], help="explicit constants of the slab bounds")
    q.set_defaults(func=cmd_constants)

    q = sub.add_parser("verify", parents=[common], help="run invariant suites and report")
    q.add_argument("--suite", choices=("specfun", "spectral", "momentum", "slab", "all"), default="all")
    q.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        table = args.func(args)
    except Spec2DError as exc:
        print(f"spec2d: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    text = render(table, args.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if table.ok else 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
