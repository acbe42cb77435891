"""Great-sphere arrangements on S^{d-1}, their cells and covering bounds."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .core import HALF_PI, maximin, smallest_enclosing_cap, tolerances, triangle_metrics
from .errors import BadParams, CoincidentCircles, DegenerateArrangement, OutOfDomain, TooLarge

MAX_D = 5
MAX_N = 16


@dataclass
class GreatSphereArrangement:
    poles: np.ndarray  # (n, d)

    def __post_init__(self):
        P = np.atleast_2d(np.asarray(self.poles, dtype=float))
        if P.shape[1] < 3:
            raise BadParams("dimension d must be at least 3")
        P = P / np.linalg.norm(P, axis=1, keepdims=True)
        eps = math.sin(tolerances().angle)
        for i, j in itertools.combinations(range(len(P)), 2):
            if 1 - abs(float(P[i] @ P[j])) <= 0.5 * eps * eps:
                raise CoincidentCircles(f"great spheres {i} and {j} coincide")
        self.poles = P

    @property
    def d(self) -> int:
        return self.poles.shape[1]

    @property
    def n(self) -> int:
        return self.poles.shape[0]


@dataclass
class SignCell:
    signs: tuple
    vertices: np.ndarray
    witness: np.ndarray  # interior point


@dataclass
class CellEnumeration:
    cells: list
    vertices: np.ndarray
    degeneracies: list = field(default_factory=list)  # vertices on more than d-1 spheres

    @property
    def simple(self) -> bool:
        return not self.degeneracies


def cell_count_bound(n: int, d: int) -> int:
    return 2 * sum(math.comb(n - 1, i) for i in range(d))


def orthogonal(d: int) -> GreatSphereArrangement:
    return GreatSphereArrangement(np.eye(d))


def enumerate_cells(A: GreatSphereArrangement, max_n: int = MAX_N, max_d: int = MAX_D) -> CellEnumeration:
    """Cells of the arrangement as sign vectors with vertex lists and interior points."""
    P = A.poles
    n, d = P.shape
    if d > max_d or n > max_n:
        raise TooLarge(f"n={n}, d={d} exceeds limits n<={max_n}, d<={max_d}")
    if n < d or np.linalg.matrix_rank(P, tol=1e-9) < d:
        raise DegenerateArrangement("poles must span R^d (n >= d, no common antipodal pair)")
    tol = tolerances()
    zero = math.sin(tol.merge)

    verts: list = []
    for sub in itertools.combinations(range(n), d - 1):
        _, s, vt = np.linalg.svd(P[list(sub)])
        if s[-1] <= 1e-9:
            continue  # the d-1 spheres do not meet in a single antipodal pair
        v = vt[-1]
        for x in (v, -v):
            if not any(float(x @ y) > 1 - 0.5 * zero * zero for y in verts):
                verts.append(x)
    V = np.array(verts)
    D = V @ P.T
    S = np.where(np.abs(D) <= zero, 0, np.sign(D)).astype(int)
    degeneracies = [k for k in range(len(V)) if int(np.sum(S[k] == 0)) > d - 1]

    table: dict = {}
    for k in range(len(V)):
        z = np.nonzero(S[k] == 0)[0]
        for combo in itertools.product((1, -1), repeat=len(z)):
            sig = S[k].copy()
            sig[z] = combo
            table.setdefault(tuple(int(x) for x in sig), []).append(k)

    cells = []
    for sig, ks in sorted(table.items()):
        verts_k = V[ks]
        w = verts_k.sum(axis=0)
        sg = np.array(sig)
        if np.linalg.norm(w) > 0 and np.all(sg * (P @ w) > 0):
            w = w / np.linalg.norm(w)
        else:
            value, x = maximin(sg[:, None] * P)
            if x is None or value <= zero:
                continue  # this completion is not a full-dimensional cell
            w = x
        cells.append(SignCell(sig, verts_k, w))
    bound = cell_count_bound(n, d)
    if len(cells) > bound:
        raise DegenerateArrangement(f"{len(cells)} cells exceed the bound {bound}")
    return CellEnumeration(cells, V, degeneracies)


def cell_circumradius(c: SignCell, seed: int = 0) -> float:
    return smallest_enclosing_cap(c.vertices, seed=seed)[1]


def cell_diameter(c: SignCell) -> float:
    G = np.clip(c.vertices @ c.vertices.T, -1, 1)
    return float(np.arccos(np.min(G)))


class CoverByCells(NamedTuple):
    N: int
    R: float
    glazyrin: bool


def covering_by_cells(A: GreatSphereArrangement) -> CoverByCells:
    """Number of cells and the largest cell circumradius, with the Glazyrin audit."""
    E = enumerate_cells(A)
    R = max(cell_circumradius(c) for c in E.cells)
    return CoverByCells(len(E.cells), R, glazyrin_check(len(E.cells), R, A.d))


class RgsBounds(NamedTuple):
    exact: float | None
    lower: float | None
    upper: float | None
    upper_clamped: bool


def rgs_bounds(n: int, d: int) -> RgsBounds:
    if d < 3 or n < 2:
        raise OutOfDomain("need d >= 3 and n >= 2")
    if n < d:
        return RgsBounds(HALF_PI, None, None, False)
    exact = math.acos(1 / math.sqrt(d)) if n == d else None
    lower = math.asin(d / cell_count_bound(n, d)) if n > d > 3 else None
    upper, clamped = None, False
    if n > d:
        arg = 4 / n ** (1 / d) * math.sqrt((2 * d - 2) / d)
        upper, clamped = (HALF_PI, True) if arg >= 1 else (math.asin(arg), False)
    return RgsBounds(exact, lower, upper, clamped)


def glazyrin_check(N: int, R: float, d: int) -> bool:
    return d < N * math.sin(R)


def jung_radius(D: float, d: int) -> float:
    arg = math.sqrt((2 * d - 2) / d) * math.sin(D / 2)
    if arg > 1 + 1e-15 or D < 0:
        raise OutOfDomain("diameter too large for the spherical Jung bound")
    return math.asin(min(arg, 1.0))


class DeltaNet(NamedTuple):
    points: np.ndarray
    audit_gap: float  # largest audited distance to the net
    existence_bound: float  # (4 / sin delta)^d, informational


def _uniform(rng, m, d):
    x = rng.standard_normal((m, d))
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def delta_net(d: int, delta: float, seed: int = 0, samples: int = 20000, audit: int = 50000) -> DeltaNet:
    """Greedy delta-net: sample points join when farther than delta from the net."""
    if not 0.0 < delta < HALF_PI + 1e-12:
        raise OutOfDomain("need 0 < delta <= pi/2")
    rng = np.random.default_rng(seed)
    c = math.cos(delta)
    net: list = []

    def absorb(X):
        for x in X:
            if not net or float(np.max(np.asarray(net) @ x)) < c:
                net.append(x)

    absorb(_uniform(rng, samples, d))
    A = _uniform(rng, audit, d)
    while True:
        far = np.max(A @ np.asarray(net).T, axis=1) < c
        if not far.any():
            break
        absorb(A[far])
    N = np.asarray(net)
    gap = float(np.arccos(np.clip(np.max(A @ N.T, axis=1).min(), -1, 1)))
    return DeltaNet(N, gap, (4 / math.sin(delta)) ** d)


# ---------------------------------------------------------------------------
# Monte-Carlo check that regular inscribed simplices have maximal volume
# ---------------------------------------------------------------------------

def _cap_frame(d: int) -> tuple[np.ndarray, np.ndarray]:
    c = np.zeros(d)
    c[-1] = 1.0
    return c, np.eye(d)[:-1]


def regular_inscribed_simplex(d: int, r: float) -> np.ndarray:
    """d vertices at distance r from e_d forming a regular simplex."""
    c, T = _cap_frame(d)
    # regular simplex in R^{d-1}: centered standard basis of R^d projected
    E = np.eye(d) - 1.0 / d
    _, _, vt = np.linalg.svd(E)
    W = E @ vt[: d - 1].T
    W /= np.linalg.norm(W, axis=1, keepdims=True)  # mutual inner products -1/(d-1)
    return np.array([math.cos(r) * c + math.sin(r) * (w @ T) for w in W])


def sample_cap(rng, d: int, r: float, m: int) -> np.ndarray:
    """Uniform points in the cap of radius r around e_d on S^{d-1}."""
    c, T = _cap_frame(d)
    out = []
    need = m
    while need > 0:
        theta = rng.uniform(0, r, 2 * need + 16)
        keep = rng.uniform(0, 1, len(theta)) <= (np.sin(theta) / math.sin(min(r, HALF_PI))) ** (d - 2)
        theta = theta[keep][:need]
        w = _uniform(rng, len(theta), d - 1) @ T
        out.append(np.cos(theta)[:, None] * c + np.sin(theta)[:, None] * w)
        need -= len(theta)
    return np.vstack(out)


def cap_volume(d: int, r: float) -> float:
    if d == 3:
        return 2 * math.pi * (1 - math.cos(r))
    if d == 4:
        return math.pi * (2 * r - math.sin(2 * r))
    raise BadParams("cap volume implemented for d in {3, 4}")


def _inside(V: np.ndarray, X: np.ndarray) -> np.ndarray | None:
    if abs(np.linalg.det(V)) < 1e-14:
        return None
    lam = X @ np.linalg.inv(V)
    return np.all(lam >= 0, axis=1)


class BoroczkyResult(NamedTuple):
    passed: bool
    regular_volume: float
    max_volume: float
    max_excess: float  # d = 3: largest vol - regular; d = 4: the same in standard errors
    trials: int


def simplex_area(V: np.ndarray) -> float:
    try:
        return triangle_metrics(*V).area
    except ValueError:
        return 0.0


def boroczky_mc_check(d: int, cap_radius: float, trials: int, seed: int = 0,
                      samples: int = 10 ** 6, k_sigma: float = 3.0) -> BoroczkyResult:
    """No random simplex in the cap beats the regular inscribed one.

    d = 3 uses exact areas; d = 4 estimates volumes from a shared uniform
    sample of the cap, so the regular and random estimates share their noise.
    """
    if d not in (3, 4):
        raise BadParams("d must be 3 or 4")
    if not 0.0 < cap_radius < HALF_PI:
        raise OutOfDomain("need 0 < cap_radius < pi/2")
    rng = np.random.default_rng(seed)
    reg = regular_inscribed_simplex(d, cap_radius)
    if d == 3:
        vreg = simplex_area(reg)
        worst = 0.0
        for _ in range(trials):
            worst = max(worst, simplex_area(sample_cap(rng, 3, cap_radius, 3)))
        return BoroczkyResult(worst <= vreg + 1e-12, vreg, worst, worst - vreg, trials)
    X = sample_cap(rng, d, cap_radius, samples)
    vol = cap_volume(d, cap_radius)
    in_reg = _inside(reg, X)
    vreg = vol * float(in_reg.mean())
    worst = 0.0
    excess = -math.inf
    for _ in range(trials):
        V = sample_cap(rng, d, cap_radius, d)
        ins = _inside(V, X)
        if ins is None:
            continue
        v = vol * float(ins.mean())
        diff = ins.astype(float) - in_reg.astype(float)
        se = vol * float(diff.std()) / math.sqrt(samples)
        worst = max(worst, v)
        excess = max(excess, (v - vreg) / max(se, 1e-300))
    return BoroczkyResult(excess <= k_sigma, vreg, worst, excess, trials)
