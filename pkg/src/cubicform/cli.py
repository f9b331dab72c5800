"""Command line front end: analyze, check and localize.

Surfaces come from the built-in catalog ("catalog:NAME" plus KEY=VALUE
arguments) or from a small INI file with a [surface] section (kind plus
parameters) and optional [tolerances] / [run] sections.  Reports are JSON
with every index serialized as an exact rational string.

Exit codes: 0 all checks pass, 1 invalid or non-immersed input, 2 identity
failure, 3 degenerate (non-generic) input.
"""

from __future__ import annotations

import argparse
import configparser
import json
import math
import sys
from fractions import Fraction

from . import __version__
from .forms import NonGenericError, fundamental_quantities, split_cubic
from .index import (
    ellipnode_index,
    godron_asymptotic_index,
    godron_tau_index,
    hyperbonode_index,
    invariants_rho_sigma,
    node_winding_index,
)
from .locus import (
    classify_point,
    find_godrons,
    find_nodes,
    trace_flecnodal,
    trace_parabolic,
)
from .normalize import normalize_ellipnode_frame, normalize_hyperbonode_frame
from .surface import CATALOG_NAMES, SurfaceError, catalog, eval_monge_jet
from .svg import render_svg
from .topology import verify_global

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_FAILED = 2
EXIT_DEGENERATE = 3

_NODE_TOL = 1e-7


# ---------------------------------------------------------------------------
# surface sources

def _number(text):
    try:
        return float(text)
    except ValueError:
        raise SurfaceError(f"not a number: {text!r}") from None


def _param_pairs(items):
    out = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise SurfaceError(f"expected KEY=VALUE parameter, got {item!r}")
        out[key.strip()] = _number(value)
    return out


def _load_surface_file(path):
    """INI surface description -> (kind, params, tolerances, run defaults)."""
    cp = configparser.ConfigParser()
    cp.optionxform = str  # keys are case sensitive (R vs r)
    try:
        read = cp.read(path)
    except configparser.Error as exc:
        raise SurfaceError(f"cannot parse surface file {path}: {exc}") from None
    if not read:
        raise SurfaceError(f"cannot read surface file {path}")
    if not cp.has_section("surface"):
        raise SurfaceError(f"{path}: missing [surface] section")
    sect = dict(cp.items("surface"))
    kind = sect.pop("kind", None)
    if kind is None:
        raise SurfaceError(f"{path}: [surface] needs kind = <catalog name>")
    params = {k: _number(v) for k, v in sect.items()}
    tols = {}
    if cp.has_section("tolerances"):
        for k, v in cp.items("tolerances"):
            tols[k] = _number(v)
            if tols[k] <= 0.0:
                raise SurfaceError(f"{path}: tolerance {k} must be positive")
    run = {}
    if cp.has_section("run"):
        for k, v in cp.items("run"):
            if k not in ("grid", "seed_grid"):
                raise SurfaceError(f"{path}: unknown [run] key {k}")
            run[k] = int(v)
    return kind, params, tols, run


def _resolve_surface(args):
    """--surface plus KEY=VALUE overrides -> (spec, tolerances, run defaults)."""
    source = args.surface
    params = _param_pairs(args.params)
    tols, run = {}, {}
    if source.startswith("catalog:"):
        name = source[len("catalog:"):]
    else:
        name, file_params, tols, run = _load_surface_file(source)
        file_params.update(params)
        params = file_params
    return catalog(name, params), tols, run


def _build_spec(args):
    """Resolve the surface and the grid/tolerance settings for analysis."""
    spec, tols, run = _resolve_surface(args)
    grid = args.grid if args.grid is not None else run.get("grid", 64)
    seed = args.seed_grid if args.seed_grid is not None else run.get("seed_grid")
    if grid < 16:
        raise SurfaceError("grid resolution must be at least 16")
    if seed is not None and seed < 16:
        raise SurfaceError("seed grid resolution must be at least 16")
    tol_parabolic = args.tol_parabolic if args.tol_parabolic is not None else (
        tols.get("parabolic", 1e-9))
    if tol_parabolic <= 0.0:
        raise SurfaceError("parabolic tolerance must be positive")
    return spec, grid, seed, tol_parabolic


# ---------------------------------------------------------------------------
# report assembly

def _rat(x):
    return None if x is None else str(Fraction(x))


def _point_record(pt):
    d = pt.diagnostics
    winding = d.get("winding")
    return {
        "kind": pt.kind,
        "chart": pt.chart,
        "param": [float(pt.param[0]), float(pt.param[1])],
        "base": [float(c) for c in pt.base],
        "sign": pt.sign,
        "index": _rat(pt.index),
        "rho": float(d["rho"]) if "rho" in d else None,
        "sigma": int(d["sigma"]) if "sigma" in d else None,
        "winding": _rat(winding),
        "flags": list(pt.flags),
    }


def _degenerate(flags):
    return any("degenerate" in f or "non-generic" in f for f in flags)


def _analysis_report(spec, grid, seed, tol_parabolic, winding):
    """Run the full pipeline; returns (report dict, artifacts for rendering)."""
    artifacts = {}
    if spec.closed:
        rep = verify_global(
            spec, grid=grid, compute_winding=winding, artifacts=artifacts,
            tol_parabolic=tol_parabolic, seed_grid=seed,
        )
        points = list(artifacts["points"]) + list(artifacts["godrons"])
        chi = {
            "surface": rep["chi_surface"],
            "elliptic": rep["chi_elliptic"],
            "hyperbolic": rep["chi_hyperbolic"],
        }
        regions = [
            {"sign": s, "chi": c, "cells": n} for s, c, n in rep["regions"]
        ]
        identities = rep.get("identities")
        status = rep["status"]
        flags = rep["flags"]
        sums = {
            "ellipnode_index": _rat(rep["sum_ellipnode_index"]),
            "hyperbonode_index": _rat(rep["sum_hyperbonode_index"]),
            "godron_sign": int(rep["sum_godron_sign"]),
        }
        counts = {
            "ellipnodes": rep["ellipnodes"],
            "hyperbonodes": rep["hyperbonodes"],
            "godrons": rep["godrons"],
        }
        mismatches = rep.get("winding_mismatches")
    else:
        trace = trace_parabolic(spec, grid=grid, tol=tol_parabolic)
        godrons, gflags = find_godrons(spec, trace)
        nodes, nflags = find_nodes(spec, grid=seed or grid,
                                   compute_winding=winding)
        artifacts.update(parabolic=trace, godrons=godrons, points=nodes)
        flags = list(trace.flags) + list(gflags) + list(nflags)
        flags += [f for pt in godrons + nodes for f in pt.flags]
        points = nodes + godrons
        chi = None
        regions = []
        identities = None
        sums = {
            "ellipnode_index": _rat(sum(
                (p.index for p in nodes if p.kind == "ellipnode"), Fraction(0))),
            "hyperbonode_index": _rat(sum(
                (p.index for p in nodes if p.kind == "hyperbonode"), Fraction(0))),
            "godron_sign": sum(g.sign for g in godrons if g.sign is not None),
        }
        counts = {
            "ellipnodes": len([p for p in nodes if p.kind == "ellipnode"]),
            "hyperbonodes": len([p for p in nodes if p.kind == "hyperbonode"]),
            "godrons": len(godrons),
        }
        mismatches = None
        if winding:
            mismatches = [
                [pt.kind, pt.chart, list(map(float, pt.param))]
                for pt in nodes
                if pt.diagnostics.get("winding") not in (None, pt.index)
            ]
        status = "non-generic input" if _degenerate(flags) else (
            "failed" if mismatches else "local patch")

    report = {
        "surface": dict(spec.describe(), name=getattr(spec, "name", None)),
        "closed": bool(spec.closed),
        "grid": grid,
        "status": status,
        "chi": chi,
        "regions": regions,
        "counts": counts,
        "sums": sums,
        "identities": identities,
        "points": sorted(
            (_point_record(pt) for pt in points),
            key=lambda r: (r["kind"], r["chart"], r["param"]),
        ),
        "warnings": list(flags),
    }
    if mismatches is not None:
        report["winding_mismatches"] = [list(map(str, m)) for m in mismatches]
    return report, artifacts


def _exit_code(status):
    if status in ("verified", "local patch"):
        return EXIT_OK
    if status == "non-generic input":
        return EXIT_DEGENERATE
    return EXIT_FAILED


def _write_report(report, path):
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------
# commands

def cmd_analyze(args, with_svg=True):
    spec, grid, seed, tol_parabolic = _build_spec(args)
    report, artifacts = _analysis_report(
        spec, grid, seed, tol_parabolic, args.winding)
    svg_path = getattr(args, "svg", None) if with_svg else None
    if svg_path:
        flecnodal = trace_flecnodal(spec, grid=grid)
        render_svg(
            spec, svg_path, grid=min(grid, 96),
            parabolic=artifacts.get("parabolic"),
            flecnodal=flecnodal,
            points=list(artifacts.get("points", [])) + list(artifacts.get("godrons", [])),
        )
    _write_report(report, args.report)
    if args.report not in (None, "-"):
        c = report["counts"]
        print(f"{report['status']}: {c['ellipnodes']} ellipnodes, "
              f"{c['hyperbonodes']} hyperbonodes, {c['godrons']} godrons "
              f"-> {args.report}")
    return _exit_code(report["status"])


def cmd_check(args):
    spec, grid, seed, tol_parabolic = _build_spec(args)
    report, _ = _analysis_report(spec, grid, seed, tol_parabolic, args.winding)
    if args.report:
        _write_report(report, args.report)
    c = report["counts"]
    print(f"surface: {report['surface'].get('name') or report['surface']['kind']}")
    print(f"points: {c['ellipnodes']} ellipnodes, {c['hyperbonodes']} hyperbonodes, "
          f"{c['godrons']} godrons")
    if report["chi"] is not None:
        chi = report["chi"]
        print(f"chi: surface={chi['surface']} elliptic={chi['elliptic']} "
              f"hyperbolic={chi['hyperbolic']}")
    if report["identities"] is not None:
        for name, ok in report["identities"].items():
            print(f"identity {name}: {'ok' if ok else 'FAILED'}")
    for w in report["warnings"]:
        print(f"warning: {w}")
    print(f"status: {report['status']}")
    return _exit_code(report["status"])


def _print_form(label, form):
    coeffs = " ".join(_fmt_float(c) for c in form.a)
    print(f"{label:<3}= [{coeffs}]")


def _fmt_float(x):
    v = float(x)
    if v == 0.0:
        v = 0.0  # normalise -0
    return format(v, ".12g")


def _kernel_angle(f):
    rows = ((f(2, 0), f(1, 1)), (f(1, 1), f(0, 2)))
    row = max(rows, key=lambda r: r[0] * r[0] + r[1] * r[1])
    return math.atan2(-row[0], row[1])


def _localize_godron(spec, mj):
    """Godron data in the kernel-adapted frame: normal-form rho and sign."""
    theta = _kernel_angle(mj.f.f)
    rot = eval_monge_jet(spec, mj.param, order=4, chart=mj.chart,
                         frame_angle=theta)
    f = rot.f.f
    lam, f30, f21, f40 = f(0, 2), f(3, 0), f(2, 1), f(4, 0)
    scale = max(abs(lam), 1e-300)
    g = f30  # dH along the kernel direction, up to a positive factor
    print(f"kernel direction: angle {_fmt_float(theta)} rad in the chart frame")
    print(f"dH(kernel) ~ {_fmt_float(g)}")
    if abs(g) > 1e-6 * scale:
        print("parabolic point, kernel transverse to the parabolic curve "
              "(not a godron)")
        return EXIT_OK
    if abs(f21) <= 1e-9 * scale:
        print("degenerate godron: parabolic curve has no quadratic contact")
        return EXIT_DEGENERATE
    rho = lam * f40 / (3.0 * f21 * f21)
    print(f"godron: normal-form rho = {_fmt_float(rho)}")
    if abs(rho - 1.0) <= 1e-9:
        print("degenerate godron: rho = 1")
        return EXIT_DEGENERATE
    sign = 1 if rho > 1.0 else -1
    print(f"sign = {sign:+d}")
    print(f"index of the cubic-form field on the elliptic side  = "
          f"{godron_tau_index(sign)}")
    print(f"index of the asymptotic field on the hyperbolic side = "
          f"{godron_asymptotic_index(sign)}")
    return EXIT_OK


def cmd_localize(args):
    spec, _, _ = _resolve_surface(args)
    chart = spec.charts()[0]
    at = tuple(float(t) for t in args.at.split(","))
    if len(at) != 2:
        raise SurfaceError("--at expects U,V")
    mj = eval_monge_jet(spec, at, order=4, chart=chart)
    pf = fundamental_quantities(mj.f)
    name = getattr(spec, "name", None) or spec.describe()["kind"]
    print(f"surface {name}  chart {chart}  at ({_fmt_float(at[0])}, "
          f"{_fmt_float(at[1])})")
    print(f"base point: ({', '.join(_fmt_float(c) for c in mj.base)})")
    print("derivatives f(i,j), 2 <= i+j <= 4:")
    for total in (2, 3, 4):
        row = "  ".join(
            f"f{i}{total - i}={_fmt_float(mj.f.f(i, total - i))}"
            for i in range(total, -1, -1)
        )
        print(f"  {row}")
    _print_form("Q", pf.Q)
    _print_form("C", pf.C)
    print(f"H0 = {_fmt_float(pf.H0)}")
    _print_form("dH", pf.dH)
    _print_form("W", pf.W)
    cls = classify_point(mj)
    print(f"classification: {cls}")
    if cls == "parabolic":
        return _localize_godron(spec, mj)

    _, wminus = split_cubic(pf.Q, pf.C)
    wm = max(abs(c) for c in wminus.a) / max(max(abs(c) for c in pf.C.a), 1e-30)
    if wm > _NODE_TOL:
        print(f"not a node: |Wminus| / |C| = {_fmt_float(wm)}")
        return EXIT_OK
    kind = "hyperbonode" if cls == "hyperbolic" else "ellipnode"
    print(f"node: {kind}")
    if kind == "hyperbonode":
        nf = normalize_hyperbonode_frame(mj)
        rho, sigma = invariants_rho_sigma(nf)
        print(f"rho = {_fmt_float(rho)}  sigma = {sigma:+d}")
        closed_form = Fraction(hyperbonode_index(nf))
        k = 1
    else:
        nf = normalize_ellipnode_frame(mj)
        closed_form = ellipnode_index(nf)
        k = 3
    print(f"index (closed form) = {closed_form}")
    u0, u1, v0, v1 = spec.domain(chart)
    radius = min(0.01 * min(u1 - u0, v1 - v0), 0.05)
    winding = node_winding_index(spec, chart, at, k, radius=radius)
    print(f"index (winding)     = {winding}")
    if winding != closed_form:
        print("MISMATCH between closed form and winding route")
        return EXIT_FAILED
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing

def _add_common(sub, svg):
    sub.add_argument(
        "--surface", required=True,
        metavar="SRC",
        help="catalog:NAME (one of: %s) or a surface file" % ", ".join(CATALOG_NAMES),
    )
    sub.add_argument("params", nargs="*", metavar="KEY=VALUE",
                     help="surface parameters, override file values")
    sub.add_argument("--grid", type=int, default=None,
                     help="trace/decomposition resolution (>= 16, default 64)")
    sub.add_argument("--seed-grid", type=int, default=None,
                     help="node search seed resolution (default: --grid)")
    sub.add_argument("--tol-parabolic", type=float, default=None,
                     help="parabolic curve polish tolerance (default 1e-9)")
    sub.add_argument("--report", metavar="PATH", default=None,
                     help="write the JSON report here ('-' = stdout)")
    sub.add_argument("--winding", action="store_true",
                     help="also compute winding-number indices and compare")
    if svg:
        sub.add_argument("--svg", metavar="PATH", default=None,
                         help="write an SVG map of the parameter domain")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="cubicform",
        description="Characteristic points of smooth surfaces: fundamental "
                    "cubic form, fractional indices, global identities.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("analyze", help="full pipeline, JSON report + SVG")
    _add_common(p, svg=True)
    p.set_defaults(func=cmd_analyze)

    p = subs.add_parser("check", help="analyze without SVG, exit-code oriented")
    _add_common(p, svg=False)
    p.set_defaults(func=cmd_check)

    p = subs.add_parser("localize", help="pointwise forms and indices")
    p.add_argument("--surface", required=True, metavar="SRC",
                   help="catalog:NAME or a surface file (Monge patch fixtures)")
    p.add_argument("params", nargs="*", metavar="KEY=VALUE")
    p.add_argument("--at", default="0,0", metavar="U,V",
                   help="chart point to expand at (default 0,0)")
    p.set_defaults(func=cmd_localize)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SurfaceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NonGenericError as exc:
        print(f"error: genericity violation: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
