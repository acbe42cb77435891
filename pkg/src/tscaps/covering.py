"""TS-coverings: congruent caps that injectively cover the cells of a tiling."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .arrangement import Tiling, build_tiling, cell_metrics, named_arrangement
from .core import HALF_PI, SphericalCap, Tolerances, tolerances
from .errors import BadParams, MixedRadii, OutOfDomain, UnknownName


@dataclass
class CoveringReport:
    is_ts_covering: bool
    density: float
    uncovered_cells: list = field(default_factory=list)
    assignment: dict = field(default_factory=dict)  # cell index -> cap index


def _centers_radius(caps, tol: Tolerances):
    if hasattr(caps, "centers") and hasattr(caps, "radius"):
        return np.asarray(caps.centers, dtype=float), float(caps.radius)
    caps = list(caps)
    if not caps:
        raise BadParams("no caps given")
    r = caps[0].radius
    if any(abs(c.radius - r) > tol.angle for c in caps):
        raise MixedRadii("caps must all have the same radius")
    return np.array([c.center for c in caps]), float(r)


def coverage_matrix(centers: np.ndarray, radius: float, tiling: Tiling, tol: Tolerances | None = None) -> np.ndarray:
    """cells x caps boolean: the cap contains every vertex of the cell.

    Vertex containment suffices because caps of radius at most pi/2 are
    spherically convex.  Lunes are never covered by such a cap.
    """
    tol = tol or tolerances()
    lim = math.cos(radius + tol.angle)
    M = np.zeros((len(tiling.cells), len(centers)), dtype=bool)
    for i, cell in enumerate(tiling.cells):
        if cell.is_lune:
            continue
        V = tiling.vertices[list(cell.vertex_indices)]
        M[i] = np.all(V @ centers.T >= lim, axis=0)
    return M


def covering_density(m: int, radius: float) -> float:
    return m * (1 - math.cos(radius)) / 2


def verify_ts_covering(caps, tiling: Tiling, assignment: dict | None = None,
                       tol: Tolerances | None = None) -> CoveringReport:
    tol = tol or tolerances()
    centers, r = _centers_radius(caps, tol)
    if r > HALF_PI + tol.angle:
        raise OutOfDomain("cap radius must not exceed pi/2")
    M = coverage_matrix(centers, r, tiling, tol)
    dens = covering_density(len(centers), r)
    ncell = len(tiling.cells)
    if assignment is not None:
        used = {}
        bad = []
        for i in range(ncell):
            j = assignment.get(i)
            if j is None or not (0 <= j < len(centers)) or not M[i, j] or j in used:
                bad.append(i)
            else:
                used[j] = i
        return CoveringReport(not bad, dens, bad, dict(assignment))
    match = maximum_bipartite_matching(csr_matrix(M.astype(np.int8)), perm_type="column")
    found = {i: int(j) for i, j in enumerate(match) if j >= 0}
    uncovered = [i for i in range(ncell) if i not in found]
    return CoveringReport(not uncovered, dens, uncovered, found)


def Delta_bound(rho: float) -> float:
    """Lower bound on the density of a TS-covering by caps of radius rho."""
    if not 0.0 < rho < HALF_PI:
        raise OutOfDomain("need 0 < rho < pi/2")
    return math.pi * (1 - math.cos(rho)) / (4 * math.atan(1 / math.cos(rho)) - math.pi)


def circumcap_covering(tiling: Tiling, radius: float | None = None):
    """Caps at the cell circumcenters, radius = largest circumradius unless given."""
    M = cell_metrics(tiling)
    r = M.max_circumradius if radius is None else radius
    return [SphericalCap(tuple(c), r) for c in M.circumcenter]


def named_covering(name: str):
    """(caps, tiling) for the two reference TS-coverings."""
    key = name.strip().lower()
    if key == "octant8":
        T = build_tiling(named_arrangement("orthogonal3"))
        return circumcap_covering(T, math.acos(1 / math.sqrt(3))), T
    if key == "cuboctahedral14":
        T = build_tiling(named_arrangement("cube_poles4"))
        return circumcap_covering(T, math.pi / 4), T
    raise UnknownName(name)


COVERING_NAMES = ("octant8", "cuboctahedral14")
