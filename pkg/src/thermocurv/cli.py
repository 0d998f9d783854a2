"""Command-line front end: point evaluation, grid scans, divergence-line
reports and identity checks, with CSV/JSON output.

Exit codes: 0 success, 1 check-suite failure, 2 usage/parse/domain error.
Output is deterministic for fixed inputs regardless of thread count.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

from .catalog import GridAxis, UnknownPotentialError, entry_names, get_entry
from .davies import conjugacy_scan, find_davies_points, fit_divergence_exponent
from ._roots import NoBracketError, ToleranceNotMetError
from .geometry import StatePoint, curvature_from_m_jet, metric_m
from .jets import DomainError
from .potentials import (ParseError, eval_jet, eval_scalar,
                         load_potential_file, parse_potential)
from .responses import (cap_difference_residual, kappa_difference_residual,
                        metric_from_responses, ratio_identity_residual,
                        responses_at, NotApplicableError)

COLUMNS = ["S", "X", "T", "Y", "M_SS", "M_SX", "M_XX", "detGM", "detGF",
           "RM", "RF", "CX", "CY", "alpha", "kappaT", "kappaS", "gamma",
           "flags"]

CHECK_THRESHOLD = 1e-8


def _fmt(value: float) -> str:
    """17 significant digits; round-trips any double."""
    return f"{value:.17g}"


def _jsonable(value: float):
    return value if math.isfinite(value) else None


def _load_spec(args):
    """Resolve --catalog/--potential-file into (spec, catalog entry or None)."""
    if args.catalog and args.potential_file:
        raise ValueError("give either --catalog or --potential-file, not both")
    if args.catalog:
        entry = get_entry(args.catalog)
        return entry.spec, entry
    if args.potential_file:
        return load_potential_file(args.potential_file), None
    raise ValueError("a potential is required (--catalog or --potential-file)")


def _coord_index(spec, name: str) -> int:
    if name in spec.coords:
        return spec.coords.index(name)
    if name == "S":
        return 0
    if name == "X":
        return 1
    raise ValueError(
        f"unknown coordinate {name!r}; potential uses {spec.coords}")


def _parse_at(spec, text: str) -> StatePoint:
    vals: dict[int, float] = {}
    for item in text.split(","):
        name, sep, raw = item.partition("=")
        if not sep:
            raise ValueError(f"--at expects NAME=VALUE pairs, got {item!r}")
        vals[_coord_index(spec, name.strip())] = float(raw)
    if sorted(vals) != [0, 1]:
        raise ValueError("--at must set both coordinates exactly once")
    return StatePoint(vals[0], vals[1])


def _parse_grid_axis(text: str) -> tuple[str, GridAxis]:
    name, sep, rest = text.partition("=")
    if not sep:
        raise ValueError(f"--grid expects NAME=LO:HI:COUNT[:SPACING], got {text!r}")
    parts = rest.split(":")
    if len(parts) not in (3, 4):
        raise ValueError(f"--grid expects NAME=LO:HI:COUNT[:SPACING], got {text!r}")
    lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    spacing = parts[3] if len(parts) == 4 else "linear"
    if spacing not in ("linear", "log"):
        raise ValueError(f"grid spacing must be linear or log, got {spacing!r}")
    if count < 1:
        raise ValueError("grid count must be >= 1")
    if count > 1 and not lo < hi:
        raise ValueError(f"grid needs lo < hi, got {lo} >= {hi}")
    if spacing == "log" and lo <= 0.0:
        raise ValueError("log spacing requires lo > 0")
    return name.strip(), GridAxis(lo, hi, count, spacing)


def _axis_values(axis: GridAxis) -> list[float]:
    if axis.count == 1:
        return [axis.lo]
    if axis.spacing == "log":
        ratio = (axis.hi / axis.lo) ** (1.0 / (axis.count - 1))
        return [axis.lo * ratio ** k for k in range(axis.count)]
    step = (axis.hi - axis.lo) / (axis.count - 1)
    return [axis.lo + step * k for k in range(axis.count)]


def _compute_row(spec, point: StatePoint, eps=None) -> list:
    nan = math.nan
    try:
        jet = eval_jet(spec, point)
    except DomainError:
        return [point.s, point.x] + [nan] * 15 + ["err:domain"]
    curv = curvature_from_m_jet(jet, eps=eps)
    flags = list(curv.flags)
    try:
        rs = responses_at(jet, point, eps=eps)
        resp = [rs.c_x, rs.c_y, rs.alpha, rs.kappa_t, rs.kappa_s, rs.gamma]
        flags += [f for f in rs.flags if f not in flags]
    except ValueError:
        resp = [nan] * 6
        flags.append("err:responses")
        if jet.s <= 0.0:
            flags.append("neg:T")
    return [point.s, point.x, jet.s, jet.x, jet.ss, jet.sx, jet.xx,
            curv.det_gm, curv.det_gf, curv.r_m, curv.r_f, *resp,
            ";".join(flags)]


def _open_out(path):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline=""), True


def _write_rows(args, spec, rows) -> None:
    coords_map = {"S": spec.coords[0], "X": spec.coords[1]}
    out, close = _open_out(args.out)
    try:
        if args.format == "csv":
            writer = csv.writer(out)
            writer.writerow(COLUMNS)
            for row in rows:
                writer.writerow([_fmt(v) for v in row[:-1]] + [row[-1]])
        else:
            doc = {
                "potential": spec.name,
                "coords": coords_map,
                "columns": COLUMNS,
                "rows": [[_jsonable(v) for v in row[:-1]] + [row[-1]]
                         for row in rows],
            }
            json.dump(doc, out, indent=2)
            out.write("\n")
    finally:
        if close:
            out.close()
    if close and args.format == "csv":
        sidecar = {"potential": spec.name, "coords": coords_map,
                   "columns": COLUMNS}
        with open(args.out + ".meta.json", "w", encoding="utf-8") as fh:
            json.dump(sidecar, fh, indent=2)
            fh.write("\n")


def _cmd_eval(args) -> int:
    spec, _ = _load_spec(args)
    point = _parse_at(spec, args.at)
    row = _compute_row(spec, point)
    if "err:domain" in row[-1]:
        raise DomainError("domain", tuple(point), f"point outside {spec.name!r} domain")
    if args.format == "csv":
        _write_rows(args, spec, [row])
        return 0
    doc = {
        "potential": spec.name,
        "coords": {"S": spec.coords[0], "X": spec.coords[1]},
        **{col: _jsonable(v) for col, v in zip(COLUMNS[:-1], row[:-1])},
        "flags": row[-1].split(";") if row[-1] else [],
    }
    out, close = _open_out(args.out)
    try:
        json.dump(doc, out, indent=2)
        out.write("\n")
    finally:
        if close:
            out.close()
    return 0


def _resolve_grid(args, spec, entry) -> tuple[list[float], list[float]]:
    axes: dict[int, GridAxis] = {}
    for text in args.grid or []:
        name, axis = _parse_grid_axis(text)
        axes[_coord_index(spec, name)] = axis
    if 0 not in axes or 1 not in axes:
        if entry is not None:
            default = entry.default_grid
        else:
            default = (GridAxis(0.5, 4.0, 8), GridAxis(0.5, 4.0, 8))
        axes.setdefault(0, default[0])
        axes.setdefault(1, default[1])
    return _axis_values(axes[0]), _axis_values(axes[1])


def _cmd_scan(args) -> int:
    spec, entry = _load_spec(args)
    svals, xvals = _resolve_grid(args, spec, entry)
    points = [StatePoint(s, x) for s in svals for x in xvals]
    workers = args.threads or os.cpu_count() or 1
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda p: _compute_row(spec, p), points))
    else:
        rows = [_compute_row(spec, p) for p in points]
    _write_rows(args, spec, rows)
    return 0


def _fit_doc(fit) -> dict:
    doc = {"kind": fit.kind, "slope": _jsonable(fit.slope),
           "r2": _jsonable(fit.r_squared)}
    if fit.limit is not None:
        doc["value"] = _jsonable(fit.limit)
    return doc


def _parse_sweep(text: str) -> tuple[str, GridAxis]:
    name, sep, rest = text.partition("=")
    parts = rest.split(":")
    if not sep or len(parts) not in (2, 3, 4):
        raise ValueError(f"--sweep expects NAME=LO:HI[:N[:SPACING]], got {text!r}")
    lo, hi = float(parts[0]), float(parts[1])
    count = int(parts[2]) if len(parts) >= 3 else 200
    spacing = parts[3] if len(parts) == 4 else "linear"
    if not lo < hi or count < 2:
        raise ValueError(f"sweep needs lo < hi and at least 2 samples: {text!r}")
    return name.strip(), GridAxis(lo, hi, count, spacing)


def _cmd_davies(args) -> int:
    spec, _ = _load_spec(args)
    fix_name, sep, fix_raw = args.fix.partition("=")
    if not sep:
        raise ValueError(f"--fix expects NAME=VALUE, got {args.fix!r}")
    fixed_idx = _coord_index(spec, fix_name.strip())
    fixed_value = float(fix_raw)
    sweep_name, axis = _parse_sweep(args.sweep)
    sweep_idx = _coord_index(spec, sweep_name)
    if sweep_idx == fixed_idx:
        raise ValueError("--fix and --sweep must name different coordinates")
    count = axis.count

    locus = find_davies_points(
        spec, args.which, fixed=spec.coords[fixed_idx],
        fixed_value=fixed_value, sweep=(axis.lo, axis.hi), count=count,
        spacing=axis.spacing)

    direction = (1.0, 0.0) if sweep_idx == 0 else (0.0, 1.0)
    points_doc = []
    for pt in locus.points:
        fits = {}
        for which_r, key in (("rf", "fit_RF"), ("rm", "fit_RM")):
            try:
                fit = fit_divergence_exponent(
                    spec, pt, which_r, which_line=args.which,
                    direction=direction)
            except DomainError:
                fit = fit_divergence_exponent(
                    spec, pt, which_r, which_line=args.which,
                    direction=(-direction[0], -direction[1]))
            fits[key] = _fit_doc(fit)
        points_doc.append({"S": pt.s, "X": pt.x, **fits})

    turning: list[float] = []
    if sweep_idx == 0:
        if args.which == "cx":
            scan = conjugacy_scan(spec, "fixed-x", fixed_value=fixed_value,
                                  sweep=(axis.lo, axis.hi), count=count,
                                  spacing=axis.spacing)
            turning = list(scan.turning_points)
        else:
            for pt in locus.points:
                y0 = eval_jet(spec, pt).x
                scan = conjugacy_scan(spec, "fixed-y", fixed_value=y0,
                                      sweep=(axis.lo, axis.hi), count=count,
                                      spacing=axis.spacing, x_guess=pt.x)
                turning.extend(scan.turning_points)

    doc = {"which": args.which, "potential": spec.name,
           "fixed": {spec.coords[fixed_idx]: fixed_value},
           "points": points_doc, "turning_points": turning}
    out, close = _open_out(args.out)
    try:
        json.dump(doc, out, indent=2)
        out.write("\n")
    finally:
        if close:
            out.close()
    return 0


def _cmd_check(args) -> int:
    spec, entry = _load_spec(args)
    svals, xvals = _resolve_grid(args, spec, entry)

    def compile_ref(expr):
        ref_spec = parse_potential(expr, spec.coords, spec.params, name="reference")
        return lambda s, x: eval_scalar(ref_spec, (s, x))

    rm_ref = compile_ref(args.ref_rm) if args.ref_rm else (
        entry.reference_rm if entry is not None else None)
    rf_ref = compile_ref(args.ref_rf) if args.ref_rf else (
        entry.reference_rf if entry is not None else None)

    maxima = {"identity:capacities": 0.0, "identity:susceptibilities": 0.0,
              "identity:ratio": 0.0, "det:response-form": 0.0,
              "det:metric-ratio": 0.0, "metric:response-form": 0.0}
    if rm_ref is not None:
        maxima["golden:RM"] = 0.0
    if rf_ref is not None:
        maxima["golden:RF"] = 0.0
    checked = 0

    for s in svals:
        for x in xvals:
            point = StatePoint(s, x)
            if entry is not None and not entry.in_domain(s, x):
                continue
            try:
                jet = eval_jet(spec, point)
                rs = responses_at(jet, point)
            except (DomainError, ValueError):
                continue
            curv = curvature_from_m_jet(jet)
            if curv.flags or not rs.ok or rs.t <= 0.0:
                continue
            checked += 1
            maxima["identity:capacities"] = max(
                maxima["identity:capacities"], abs(cap_difference_residual(rs)))
            maxima["identity:susceptibilities"] = max(
                maxima["identity:susceptibilities"],
                abs(kappa_difference_residual(rs)))
            maxima["identity:ratio"] = max(
                maxima["identity:ratio"], abs(ratio_identity_residual(rs)))
            det_gm = curv.det_gm
            r20a = det_gm - rs.t / (x * rs.kappa_t * rs.c_x)
            r20b = det_gm - rs.t / (x * rs.kappa_s * rs.c_y)
            maxima["det:response-form"] = max(
                maxima["det:response-form"],
                abs(r20a) / max(abs(det_gm), 1.0),
                abs(r20b) / max(abs(det_gm), 1.0))
            r22 = curv.det_gf + rs.gamma * det_gm
            maxima["det:metric-ratio"] = max(
                maxima["det:metric-ratio"], abs(r22) / max(abs(curv.det_gf), 1.0))
            try:
                gm = metric_from_responses(rs)
                direct = metric_m(jet)
                for a, b in zip(gm[:3], direct[:3]):
                    maxima["metric:response-form"] = max(
                        maxima["metric:response-form"],
                        abs(a - b) / max(abs(b), 1.0))
            except NotApplicableError:
                pass
            for key, ref, computed in (("golden:RM", rm_ref, curv.r_m),
                                       ("golden:RF", rf_ref, curv.r_f)):
                if ref is None:
                    continue
                want = ref(s, x)
                maxima[key] = max(maxima[key],
                                  abs(computed - want) / max(abs(want), 1.0))

    failed = [k for k, v in maxima.items() if v > CHECK_THRESHOLD]
    print(f"potential: {spec.name}   points checked: {checked}")
    for key in sorted(maxima):
        status = "FAIL" if key in failed else "pass"
        print(f"  {status}  {key:26s} max residual {maxima[key]:.3e}")
    if checked == 0:
        print("no usable grid points", file=sys.stderr)
        return 2
    print("CHECK " + ("FAILED" if failed else "PASSED"))
    return 1 if failed else 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="thermocurv",
        description=("Hessian thermodynamic metrics, curvature scalars, "
                     "response functions and divergence-line analysis for "
                     "two-parameter potentials."))
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--catalog", metavar="NAME",
                       help=f"built-in potential ({', '.join(entry_names())})")
        p.add_argument("--potential-file", metavar="PATH",
                       help="potential-definition JSON file")
        p.add_argument("--format", choices=("csv", "json"), default=None)
        p.add_argument("--out", metavar="PATH", default=None,
                       help="output path (default stdout)")
        p.add_argument("--threads", type=int, default=None,
                       help="worker threads for grid evaluation")

    p_eval = sub.add_parser("eval", help="evaluate one state point")
    add_common(p_eval)
    p_eval.add_argument("--at", required=True, metavar="S=..,X=..",
                        help="coordinate values, e.g. S=1,Q=0.5")
    p_eval.set_defaults(func=_cmd_eval, default_format="json")

    p_scan = sub.add_parser("scan", help="evaluate a coordinate grid")
    add_common(p_scan)
    p_scan.add_argument("--grid", action="append", metavar="NAME=LO:HI:N[:SPACING]",
                        help="one axis per coordinate (repeat)")
    p_scan.set_defaults(func=_cmd_scan, default_format="csv")

    p_dav = sub.add_parser("davies", help="locate divergence lines and fit exponents")
    add_common(p_dav)
    p_dav.add_argument("--which", choices=("cx", "cy"), default="cx")
    p_dav.add_argument("--fix", required=True, metavar="NAME=VALUE")
    p_dav.add_argument("--sweep", required=True, metavar="NAME=LO:HI[:N]")
    p_dav.set_defaults(func=_cmd_davies, default_format="json")

    p_check = sub.add_parser("check", help="run identity/determinant residual suite")
    add_common(p_check)
    p_check.add_argument("--grid", action="append", metavar="NAME=LO:HI:N[:SPACING]")
    p_check.add_argument("--ref-rm", metavar="EXPR", default=None,
                         help="closed-form reference for RM (overrides catalog)")
    p_check.add_argument("--ref-rf", metavar="EXPR", default=None,
                         help="closed-form reference for RF (overrides catalog)")
    p_check.set_defaults(func=_cmd_check, default_format="json")
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.format is None:
        args.format = args.default_format
    try:
        return args.func(args)
    except BrokenPipeError:
        return 0
    except (ParseError, DomainError, UnknownPotentialError, ValueError,
            OSError, json.JSONDecodeError, NoBracketError,
            ToleranceNotMetError) as exc:
        message = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {message}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
