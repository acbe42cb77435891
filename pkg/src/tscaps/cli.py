"""Command-line front end.

Exit codes: 0 ok, 1 verification false, 2 usage / parse / domain error,
3 internal inconsistency.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import io as _stdio
import math
import sys

import numpy as np

from . import io
from .arrangement import (ARRANGEMENT_NAMES, Rgc_bounds, build_tiling, cell_metrics, covering_cell_lower_bound,
                          named_arrangement, parse_name, rgc_upper_bound)
from .core import override_tolerances, tolerances
from .covering import COVERING_NAMES, Delta_bound, named_covering, verify_ts_covering
from .errors import GeometryError, ParseError, UnknownName
from .highdim import jung_radius, rgs_bounds
from .molnar import decompose
from .optimizer import SearchProblem, optimize_arrangement, probe_conjecture
from .packing import PACKING_NAMES, delta_bound, lune_grid, named_packing, rstam_upper, verify_packing, verify_ts

OK, FALSE, USAGE, INTERNAL = 0, 1, 2, 3


class Failed(Exception):
    """Carries an exit code and a message for the user."""

    def __init__(self, code, msg):
        super().__init__(msg)
        self.code = code


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------

def _config(args) -> dict:
    t = tolerances()
    return {"command": args.verb, "seed": args.seed, "degrees": args.degrees,
            "tolerances": dataclasses.asdict(t)}


def _ang(x, args):
    return math.degrees(x) if args.degrees and x is not None else x


def _emit(args, record: dict | None = None, obj: str | None = None, table: list | None = None):
    fmt = args.format
    if fmt == "obj":
        if obj is None:
            raise Failed(USAGE, f"{args.verb}: OBJ output is not available here")
        text = obj
    elif fmt == "csv":
        if table is None:
            raise Failed(USAGE, f"{args.verb}: CSV output is not available here")
        buf = _stdio.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        for row in table:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
        text = buf.getvalue()
    else:
        if record is None:
            record = {"table": table}
        record = dict(record)
        record["config"] = _config(args)
        text = io.dumps(record)
    if args.out:
        io.write_text(args.out, text)
    else:
        sys.stdout.write(text)


def _summary(M, args) -> dict:
    return {
        "min_inradius": _ang(M.min_inradius, args),
        "max_circumradius": _ang(M.max_circumradius, args),
        "argmin_inradius": M.argmin_inradius,
        "argmax_circumradius": M.argmax_circumradius,
        "units": "deg" if args.degrees else "rad",
    }


def _int_range(text: str) -> list:
    try:
        if ".." in text:
            a, b = text.split("..")
            return list(range(int(a), int(b) + 1))
        return [int(text)]
    except ValueError:
        raise Failed(USAGE, f"bad integer range {text!r}") from None


def _float_range(text: str, steps: int) -> list:
    try:
        if ".." in text:
            a, b = (float(x) for x in text.split(".."))
            return list(np.linspace(a, b, steps))
        return [float(text)]
    except ValueError:
        raise Failed(USAGE, f"bad range {text!r}") from None


# ---------------------------------------------------------------------------
# Verbs
# ---------------------------------------------------------------------------

def cmd_construct(args) -> int:
    name = args.name
    key, n = parse_name(name, args.n)
    if key == "lune_grid":
        if args.alpha_deg is None or args.k is None:
            raise Failed(USAGE, "lune_grid needs --alpha-deg and --k")
        P, w = lune_grid(math.radians(args.alpha_deg), args.k)
        rep = verify_ts(P, w)
        _emit(args, io.packing_to_dict(P, w, rep), io.caps_obj(P.centers, P.radius))
        return OK if rep.is_ts else INTERNAL
    if key in {p.split("(")[0] for p in PACKING_NAMES}:
        label = name if n is None else f"{key}({n})"
        P, w = named_packing(label)
        rep = verify_ts(P, w)
        _emit(args, {"name": label, **io.packing_to_dict(P, w, rep)}, io.caps_obj(P.centers, P.radius))
        # a configuration without a witness claims nothing
        return OK if (rep.is_ts or w is None) else INTERNAL
    if key in COVERING_NAMES:
        caps, T = named_covering(key)
        rep = verify_ts_covering(caps, T)
        _emit(args, {"name": key, **io.covering_to_dict(caps, T, rep)}, io.tiling_obj(T))
        return OK if rep.is_ts_covering else INTERNAL
    circles = named_arrangement(name, args.n)
    T = build_tiling(circles)
    M = cell_metrics(T, seed=args.seed)
    rec = {"name": name if args.n is None else f"{key}({args.n})", **io.tiling_to_dict(T, M),
           "summary": _summary(M, args)}
    _emit(args, rec, io.tiling_obj(T))
    return OK


def cmd_verify(args) -> int:
    data = io.read_json(args.input)
    if args.kind == "covering":
        caps, T, assignment = io.covering_from_dict(data)
        rep = verify_ts_covering(caps, T, assignment)
        rec = io.covering_to_dict(caps, T, rep)
        ok = rep.is_ts_covering
    else:
        P, w = io.packing_from_dict(data)
        if args.kind == "packing":
            rep = verify_packing(P)
            ok = rep.is_packing
        else:
            rep = verify_ts(P, w)
            ok = bool(rep.is_ts)
        rec = io.packing_to_dict(P, w, rep)
    _emit(args, rec)
    return OK if ok else FALSE


BOUND_FAMILIES = ("delta", "Delta", "rstam-upper", "rgc-upper", "Rgc", "rgs", "jung", "covering-cell")


def cmd_bounds(args) -> int:
    fam = args.family
    rows = []
    deg = args.degrees
    if fam in ("delta", "Delta"):
        f = delta_bound if fam == "delta" else Delta_bound
        for r in _float_range(args.rho or "0.01..0.78", args.steps):
            rows.append([_ang(r, args), f(r)])
        header = ["rho", "density"]
    elif fam == "rstam-upper":
        for k in _int_range(args.k or "5..12"):
            rows.append([k, _ang(rstam_upper(k), args)])
        header = ["k", "radius"]
    elif fam == "rgc-upper":
        for n in _int_range(args.n or "5..16"):
            rows.append([n, _ang(rgc_upper_bound(n), args)])
        header = ["n", "radius"]
    elif fam == "Rgc":
        for n in _int_range(args.n or "4..16"):
            b = Rgc_bounds(n)
            rows.append([n, _ang(b.lower, args), _ang(b.upper, args), b.upper_clamped])
        header = ["n", "lower", "upper", "upper_clamped"]
    elif fam == "rgs":
        d = args.d or 4
        for n in _int_range(args.n or f"{d + 1}..16"):
            b = rgs_bounds(n, d)
            rows.append([n, _ang(b.exact, args), _ang(b.lower, args), _ang(b.upper, args)])
        header = ["n", "exact", "lower", "upper"]
    elif fam == "jung":
        d = args.d or 3
        for D in _float_range(args.D or "0.1..1.9", args.steps):
            rows.append([_ang(D, args), _ang(jung_radius(D, d), args)])
        header = ["diameter", "radius"]
    elif fam == "covering-cell":
        for R in _float_range(args.R or "0.1..1.5", args.steps):
            rows.append([_ang(R, args), covering_cell_lower_bound(R)])
        header = ["R", "cells"]
    else:
        raise Failed(USAGE, f"unknown bound family {fam!r}; choose from {', '.join(BOUND_FAMILIES)}")
    rec = {"family": fam, "units": "deg" if deg else "rad", "columns": header, "rows": rows}
    _emit(args, rec, table=[header] + rows)
    return OK


def cmd_arrange(args) -> int:
    if args.named:
        circles = named_arrangement(args.named, args.n)
    elif args.circles:
        circles = io.circles_from_dict(io.read_json(args.circles))
    else:
        raise Failed(USAGE, "arrange needs --named or --circles")
    T = build_tiling(circles)
    M = cell_metrics(T, seed=args.seed)
    table = [["cell", "sides", "inradius", "circumradius"]] + [
        [i, c.sides, _ang(M.inradius[i], args), _ang(M.circumradius[i], args)] for i, c in enumerate(T.cells)]
    _emit(args, {**io.tiling_to_dict(T, M), "summary": _summary(M, args)}, io.tiling_obj(T), table)
    return OK


def _points(path):
    data = io.read_json(path)
    pts = data.get("points", data.get("centers")) if isinstance(data, dict) else data
    if pts is None:
        raise ParseError("expected 'points' (or 'centers')")
    return io._vectors(pts, "points")


def cmd_decompose(args) -> int:
    pts = _points(args.points)
    rho = args.rho if args.mode == "refined" else None
    if args.mode == "refined" and rho is None:
        raise Failed(USAGE, "refined mode needs --rho")
    D = decompose(pts, rho=rho, strict=not args.lenient)
    rec = io.decomposition_to_dict(D)
    if args.mode == "delaunay":
        rec.pop("mcells", None)
    stage = {"delaunay": D.dcells, "molnar": D.mcells, "refined": D.refined}[args.mode]
    _emit(args, {"mode": args.mode, **rec}, io.regions_obj(stage))
    return OK


def cmd_optimize(args) -> int:
    kw = dict(restarts=args.restarts, seed=args.seed, verbose=True)
    if args.max_iters:
        kw["max_iters"] = args.max_iters
    if args.target == "probe":
        res = probe_conjecture(args.n, **kw)
        rec = {**io.search_result_to_dict(res.best), "conjectured": res.conjectured, "improved": res.improved}
        best = res.best
    else:
        if args.target == "ts":
            problem = SearchProblem("max_ts_radius", args.k, **kw)
        else:
            kind = {"min-inradius": "max_min_inradius", "max-circumradius": "min_max_circumradius"}[args.objective]
            problem = SearchProblem(kind, args.n, **kw)
        best = optimize_arrangement(problem)
        rec = io.search_result_to_dict(best)
    rec["value_display"] = _ang(best.value, args)
    rec["units"] = "deg" if args.degrees else "rad"
    _emit(args, rec, io.tiling_obj(build_tiling(best.circles)) if len(best.circles) > 1 else None)
    return OK if best.certified else INTERNAL


def cmd_export(args) -> int:
    data = io.read_json(args.input)
    if not isinstance(data, dict):
        raise ParseError("expected a JSON object")
    if "dcells" in data:
        from .molnar import Region

        stage = args.stage if args.stage in data else "dcells"
        regions = [Region(np.asarray(c["coords"], dtype=float), ()) for c in data[stage]]
        text = io.regions_obj(regions)
    elif "tiling" in data and "centers" in data:
        text = io.tiling_obj(build_tiling(io.circles_from_dict(data["tiling"])))
    elif "circles" in data:
        text = io.tiling_obj(build_tiling(io.circles_from_dict(data)))
    elif "centers" in data and "radius" in data:
        P, _ = io.packing_from_dict(data)
        text = io.caps_obj(P.centers, P.radius)
    else:
        raise ParseError("nothing exportable in this file")
    if args.out:
        io.write_text(args.out, text)
    else:
        sys.stdout.write(text)
    return OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol-angle", type=float, default=None)
    common.add_argument("--tol-area", type=float, default=None)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--degrees", action="store_true", help="report angles in degrees (presentation only)")
    common.add_argument("--format", choices=("json", "csv", "obj"), default="json")
    common.add_argument("--out", default=None, help="output file (default: standard output)")

    p = argparse.ArgumentParser(prog="tscaps", description="Totally separable cap packings and coverings.")
    sub = p.add_subparsers(dest="verb", required=True)

    c = sub.add_parser("construct", parents=[common], help="emit a named configuration")
    c.add_argument("name", help="; ".join([", ".join(ARRANGEMENT_NAMES), ", ".join(PACKING_NAMES),
                                           ", ".join(COVERING_NAMES), "lune_grid"]))
    c.add_argument("--n", type=int)
    c.add_argument("--k", type=int)
    c.add_argument("--alpha-deg", type=float)
    c.set_defaults(func=cmd_construct)

    v = sub.add_parser("verify", parents=[common], help="verify a packing, TS-packing or TS-covering file")
    v.add_argument("kind", choices=("packing", "ts", "covering"))
    v.add_argument("input")
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("bounds", parents=[common], help="tabulate a bound")
    b.add_argument("family", choices=BOUND_FAMILIES)
    b.add_argument("--rho")
    b.add_argument("--k")
    b.add_argument("--n")
    b.add_argument("--d", type=int)
    b.add_argument("--D")
    b.add_argument("--R")
    b.add_argument("--steps", type=int, default=50)
    b.set_defaults(func=cmd_bounds)

    a = sub.add_parser("arrange", parents=[common], help="tile by great circles and measure cells")
    a.add_argument("--named")
    a.add_argument("--circles", help="JSON file with a 'circles' list")
    a.add_argument("--n", type=int)
    a.set_defaults(func=cmd_arrange)

    d = sub.add_parser("decompose", parents=[common], help="Delaunay / Molnar / refined decomposition")
    d.add_argument("--mode", choices=("delaunay", "molnar", "refined"), default="molnar")
    d.add_argument("--points", required=True)
    d.add_argument("--rho", type=float)
    d.add_argument("--lenient", action="store_true", help="tag unclassified pieces instead of failing")
    d.set_defaults(func=cmd_decompose)

    o = sub.add_parser("optimize", parents=[common], help="search for optimal arrangements")
    o.add_argument("target", choices=("arrangement", "ts", "probe"))
    o.add_argument("--n", type=int, default=4)
    o.add_argument("--k", type=int, default=6)
    o.add_argument("--objective", choices=("min-inradius", "max-circumradius"), default="min-inradius")
    o.add_argument("--restarts", type=int, default=64)
    o.add_argument("--max-iters", type=int)
    o.set_defaults(func=cmd_optimize)

    e = sub.add_parser("export", parents=[common], help="convert a JSON record to OBJ")
    e.add_argument("input")
    e.add_argument("--stage", choices=("dcells", "mcells", "refined"), default="refined")
    e.set_defaults(func=cmd_export)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits 2 on usage errors
    try:
        with override_tolerances(angle=args.tol_angle, area=args.tol_area):
            return args.func(args)
    except Failed as e:
        print(f"tscaps: {e}", file=sys.stderr)
        return e.code
    except (ParseError, UnknownName, GeometryError, OSError) as e:
        print(f"tscaps: {type(e).__name__}: {e}", file=sys.stderr)
        return USAGE
    except Exception as e:  # anything else is our bug
        print(f"tscaps: internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return INTERNAL


if __name__ == "__main__":
    sys.exit(main())
