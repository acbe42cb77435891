"""JSON records and OBJ export.

Floats are written with ``repr``, which round-trips doubles exactly, and no
timestamps are stored, so identical runs produce identical bytes.
"""
from __future__ import annotations

import json
import math

import numpy as np

from .core import GreatCircle, SphericalCap, unit
from .errors import ParseError
from .molnar import bridges

ARC_SEGMENTS = 64


def _clean(x):
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, np.ndarray):
        return _clean(x.tolist())
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return None
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return x


def dumps(obj) -> str:
    return json.dumps(_clean(obj), indent=2) + "\n"


def loads(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"malformed JSON: {e}") from None


def read_json(path: str):
    with open(path, encoding="utf-8") as f:
        return loads(f.read())


def write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)


def _vectors(rows, what: str) -> np.ndarray:
    try:
        A = np.asarray(rows, dtype=float)
    except (TypeError, ValueError):
        raise ParseError(f"{what} must be a list of [x, y, z] triples") from None
    if A.ndim != 2 or A.shape[1] < 3 or not np.all(np.isfinite(A)):
        raise ParseError(f"{what} must be a list of finite [x, y, z] triples")
    if np.any(np.linalg.norm(A, axis=1) == 0):
        raise ParseError(f"{what} contains a zero vector")
    return A


# ---------------------------------------------------------------------------
# Records
# ---------------------------------------------------------------------------

def tiling_to_dict(T, M=None) -> dict:
    d = {
        "circles": [{"pole": list(c.pole)} for c in T.circles],
        "vertices": T.vertices,
        "edges": [{"u": e.u, "v": e.v, "circle": e.circle, "mid": e.mid} for e in T.edges],
        "cells": [{"vertex_indices": list(c.vertex_indices), "circle_indices": list(c.circle_indices),
                   "lune": c.is_lune, "area": c.area} for c in T.cells],
        "euler": T.euler(),
        "simple": T.is_simple(),
    }
    if M is not None:
        d["metrics"] = {
            "inradius": M.inradius, "incenter": M.incenter,
            "circumradius": M.circumradius, "circumcenter": M.circumcenter,
            "min_inradius": M.min_inradius, "max_circumradius": M.max_circumradius,
        }
    return d


def circles_from_dict(d) -> list:
    rows = d.get("circles") if isinstance(d, dict) else d
    if rows is None:
        raise ParseError("expected a 'circles' list")
    poles = [r["pole"] if isinstance(r, dict) else r for r in rows]
    return [GreatCircle(tuple(p)) for p in _vectors(poles, "circles")]


def packing_to_dict(P, witness=None, report=None) -> dict:
    d = {"radius": P.radius, "centers": P.centers}
    if witness is not None:
        d["witness"] = {
            "poles": witness.poles,
            "pairs": [[i, j, k] for (i, j), k in sorted(witness.pairs.items())],
        }
    if report is not None:
        d["report"] = {
            "is_packing": report.is_packing, "is_ts": report.is_ts, "density": report.density,
            "min_distance": report.min_distance, "failures": [list(f) for f in report.failures],
        }
        if witness is None and report.witness is not None:
            d["witness"] = packing_to_dict(P, report.witness)["witness"]
    return d


def packing_from_dict(d):
    from .packing import CapPacking, SeparationWitness

    if not isinstance(d, dict) or "radius" not in d or "centers" not in d:
        raise ParseError("packing JSON needs 'radius' and 'centers'")
    try:
        r = float(d["radius"])
    except (TypeError, ValueError):
        raise ParseError("radius must be a number") from None
    P = CapPacking(_vectors(d["centers"], "centers"), r)
    w = d.get("witness")
    witness = None
    if w:
        circles = [GreatCircle(tuple(p)) for p in _vectors(w["poles"], "witness poles")]
        pairs = {(int(i), int(j)): int(k) for i, j, k in w.get("pairs", [])}
        witness = SeparationWitness(circles, pairs)
    return P, witness


def covering_to_dict(caps, tiling, report=None) -> dict:
    d = {
        "radius": caps[0].radius,
        "centers": [c.center for c in caps],
        "tiling": {"circles": [{"pole": list(c.pole)} for c in tiling.circles]},
    }
    if report is not None:
        d["assignment"] = [[i, j] for i, j in sorted(report.assignment.items())]
        d["report"] = {"is_ts_covering": report.is_ts_covering, "density": report.density,
                       "uncovered_cells": report.uncovered_cells}
    return d


def covering_from_dict(d):
    from .arrangement import build_tiling

    if not isinstance(d, dict) or "tiling" not in d or "centers" not in d or "radius" not in d:
        raise ParseError("covering JSON needs 'radius', 'centers' and 'tiling'")
    r = float(d["radius"])
    caps = [SphericalCap(tuple(c), r) for c in _vectors(d["centers"], "centers")]
    T = build_tiling(circles_from_dict(d["tiling"]))
    assignment = None
    if "assignment" in d:
        assignment = {int(i): int(j) for i, j in d["assignment"]}
    return caps, T, assignment


def decomposition_to_dict(D) -> dict:
    out = {
        "points": D.points,
        "dcells": [{"vertices": list(c.vertices), "coords": c.coords, "circumcenter": c.center,
                    "circumradius": c.radius, "separating_side": c.separating_side} for c in D.dcells],
        "mcells": [{"coords": c.coords, "labels": [list(l) for l in c.labels]} for c in D.mcells],
    }
    if D.refined:
        out["rho"] = D.rho
        out["refined"] = [{"coords": c.coords, "labels": [list(l) for l in c.labels], "kind": c.kind,
                           "source": c.source, "area": c.area} for c in D.refined]
    out["bridge_count"] = len(bridges(D.dcells))
    return out


def highdim_to_dict(A, E, radii=None) -> dict:
    d = {
        "d": A.d,
        "poles": A.poles,
        "cells": [{"signs": list(c.signs), "vertices": c.vertices} for c in E.cells],
        "simple": E.simple,
    }
    if radii is not None:
        d["metrics"] = {"circumradius": radii, "max_circumradius": max(radii), "cells": len(E.cells)}
    return d


def search_result_to_dict(R) -> dict:
    p = R.problem
    d = {
        "problem": {"kind": p.kind, "n": p.n, "restarts": p.restarts, "max_iters": p.max_iters,
                    "seed": p.seed},
        "circles": [{"pole": list(c.pole)} for c in R.circles],
        "value": R.value,
        "certificate": R.certificate,
        "certified": R.certified,
        "flagged": R.flagged,
        "history": {"restarts": len(R.history), "best": max(R.history) if R.history else None,
                    "values": R.history},
    }
    if R.centers is not None:
        d["centers"] = R.centers
    return d


# ---------------------------------------------------------------------------
# OBJ
# ---------------------------------------------------------------------------

def slerp_arc(a, b, via=None, segments: int = ARC_SEGMENTS) -> np.ndarray:
    """Points along the great-circle arc a -> b (through ``via`` if given), endpoints included."""
    a, b = unit(a), unit(b)
    if via is None:
        half = segments // 2
        return np.vstack([_slerp(a, unit(a + b), half)[:-1], _slerp(unit(a + b), b, segments - half)])
    via = unit(via)
    half = segments // 2
    return np.vstack([_slerp(a, via, half)[:-1], _slerp(via, b, segments - half)])


def _slerp(a, b, k):
    w = math.acos(max(-1.0, min(1.0, float(a @ b))))
    t = np.linspace(0.0, 1.0, k + 1)
    if w < 1e-15:
        return np.repeat(a[None], k + 1, axis=0)
    return (np.sin((1 - t) * w)[:, None] * a + np.sin(t * w)[:, None] * b) / math.sin(w)


def _obj(faces: list, polylines: list) -> str:
    lines = ["# spherical cells, counterclockwise seen from outside the sphere"]
    n = 0
    out_f, out_l = [], []
    for loop in faces:
        for p in loop:
            lines.append("v %r %r %r" % tuple(float(x) for x in p))
        out_f.append("f " + " ".join(str(n + i + 1) for i in range(len(loop))))
        n += len(loop)
    for line in polylines:
        for p in line:
            lines.append("v %r %r %r" % tuple(float(x) for x in p))
        out_l.append("l " + " ".join(str(n + i + 1) for i in range(len(line))))
        n += len(line)
    return "\n".join(lines + out_f + out_l) + "\n"


def tiling_obj(T) -> str:
    """Cells as faces and the edge graph as polylines, arcs sampled with 64 segments."""
    faces = []
    for cell in T.cells:
        loop = []
        s = len(cell.vertex_indices)
        for i in range(s):
            e = T.edges[cell.edge_indices[i]]
            a = T.vertices[cell.vertex_indices[i]]
            b = T.vertices[cell.vertex_indices[(i + 1) % s]]
            loop.append(slerp_arc(a, b, e.mid)[:-1])
        faces.append(np.vstack(loop))
    lines = [slerp_arc(T.vertices[e.u], T.vertices[e.v], e.mid) for e in T.edges]
    return _obj(faces, lines)


def regions_obj(regions) -> str:
    """Polygons with geodesic sides (D-, M- or refined cells)."""
    faces = []
    for r in regions:
        V = np.asarray(r.coords)
        s = len(V)
        faces.append(np.vstack([slerp_arc(V[i], V[(i + 1) % s])[:-1] for i in range(s)]))
    return _obj(faces, [])


def caps_obj(centers, radius: float, segments: int = ARC_SEGMENTS) -> str:
    """Cap boundaries as closed polylines."""
    lines = []
    for c in np.asarray(centers, dtype=float):
        c = unit(c)
        a = np.zeros(3)
        a[int(np.argmin(np.abs(c)))] = 1.0
        t1 = unit(a - (a @ c) * c)
        t2 = np.cross(c, t1)
        th = np.linspace(0.0, 2 * math.pi, segments + 1)
        lines.append(math.cos(radius) * c + math.sin(radius) * (np.cos(th)[:, None] * t1 + np.sin(th)[:, None] * t2))
    return _obj([], lines)
