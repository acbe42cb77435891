"""Derivative-free search over great-circle arrangements.

Objectives are evaluated in closed form from the poles.  The inradius of a
cell with sign vector s is arcsin of the distance from the origin to
conv{s_i p_i}; the nearest point is the affine min-norm point of at most
three signed poles, so one pass over all signed pairs and triples yields the
inradius of every cell at once (a candidate belongs to a cell iff no other
circle is closer to its center).  Circumradii use the same identity applied
to the vertex set of each cell.

Extremal arrangements are often degenerate (three circles through a point),
where the objective is discontinuous.  The search therefore keeps a list of
concurrency groups: a poll may snap a nearly concurrent triple onto a common
point, and every later poll is projected back onto all groups.
"""
from __future__ import annotations

import itertools
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from .arrangement import build_tiling, cell_metrics, named_arrangement
from .core import GreatCircle
from .errors import BadParams

KINDS = ("max_min_inradius", "min_max_circumradius", "max_ts_radius")
TINY = 1e-10  # cells whose inradius sine is below this are treated as merged away


@dataclass
class SearchProblem:
    kind: str
    n: int  # circles, or caps for max_ts_radius
    restarts: int = 64
    max_iters: int = 600
    step0: float = 0.4
    min_step: float = 1e-9
    random_dirs: int = 6
    seed: int = 0
    workers: int = 1
    families: tuple | None = None  # circle counts for max_ts_radius; default: the
    # three smallest families with at least k cells
    verbose: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise BadParams(f"unknown problem kind {self.kind!r}")
        if self.kind == "max_ts_radius":
            if not 2 <= self.n <= 12:
                raise BadParams("max_ts_radius needs 2 <= k <= 12")
        elif not 2 <= self.n <= 16:
            raise BadParams("arrangement search needs 2 <= n <= 16")
        if self.restarts < 1:
            raise BadParams("need at least one restart")


@dataclass
class SearchResult:
    problem: SearchProblem
    circles: list
    value: float  # radians
    certificate: float  # recomputed by an independent metric pass
    certified: bool
    history: list = field(default_factory=list)  # best value per restart
    flagged: bool = False  # no accepted move in any restart
    centers: np.ndarray | None = None  # cap centers for max_ts_radius

    @property
    def poles(self) -> np.ndarray:
        return np.array([c.vec for c in self.circles])


# ---------------------------------------------------------------------------
# Closed-form objectives
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _signed_subsets(n: int):
    pairs = np.array(list(itertools.combinations(range(n), 2)), dtype=np.intp).reshape(-1, 2)
    triples = np.array(list(itertools.combinations(range(n), 3)), dtype=np.intp).reshape(-1, 3)
    s2 = np.array([[1, 1], [1, -1]], dtype=float)
    s3 = np.array([[1, a, b] for a in (1, -1) for b in (1, -1)], dtype=float)
    I2 = np.repeat(pairs, len(s2), axis=0)
    S2 = np.tile(s2, (len(pairs), 1))
    I3 = np.repeat(triples, len(s3), axis=0)
    S3 = np.tile(s3, (len(triples), 1))
    return I2, S2, I3, S3


def _triangle_min_norm(A, B, C):
    """Affine min-norm point of three points (batched) and its barycentric weights."""
    n = np.cross(B - A, C - A)
    nn = np.einsum("...d,...d->...", n, n)
    ok = nn > 1e-24
    nn_safe = np.where(ok, nn, 1.0)
    h = np.einsum("...d,...d->...", A, n) / nn_safe
    q = h[..., None] * n
    la = np.einsum("...d,...d->...", np.cross(B - q, C - q), n) / nn_safe
    lb = np.einsum("...d,...d->...", np.cross(C - q, A - q), n) / nn_safe
    lc = 1.0 - la - lb
    lam_ok = ok & (la >= -1e-12) & (lb >= -1e-12) & (lc >= -1e-12)
    return q, lam_ok


def _candidates(P: np.ndarray):
    """Incenter candidates for a batch of pole sets P (B, n, 3).

    Returns (q (B, K, 3), usable (B, K), signs of each candidate's cell (B, K, n)).
    """
    n = P.shape[1]
    I2, S2, I3, S3 = _signed_subsets(n)
    W2 = P[:, I2, :] * S2[None, :, :, None]
    q2 = 0.5 * (W2[:, :, 0] + W2[:, :, 1])
    ok2 = np.ones(q2.shape[:2], dtype=bool)
    if len(I3):
        W3 = P[:, I3, :] * S3[None, :, :, None]
        q3, ok3 = _triangle_min_norm(W3[:, :, 0], W3[:, :, 1], W3[:, :, 2])
        q = np.concatenate([q2, q3], axis=1)
        ok = np.concatenate([ok2, ok3], axis=1)
    else:
        q, ok = q2, ok2
    r = np.linalg.norm(q, axis=-1)
    ok &= r > TINY
    u = q / np.where(r > 0, r, 1.0)[..., None]
    D = np.einsum("bkd,bnd->bkn", u, P)
    ok &= np.all(np.abs(D) >= r[..., None] - 1e-12, axis=-1)
    return r, ok, D


def min_inradius_batch(P: np.ndarray) -> np.ndarray:
    """Minimum cell inradius for each pole set in the batch."""
    P = np.asarray(P, dtype=float)
    if P.ndim == 2:
        P = P[None]
    r, ok, _ = _candidates(P)
    val = np.where(ok, r, np.inf).min(axis=1)
    val = np.where(np.isfinite(val), val, 0.0)
    return np.arcsin(np.clip(val, 0.0, 1.0))


def cell_inradii(P: np.ndarray) -> dict:
    """Sign vector -> inradius for every cell of one arrangement."""
    P = np.asarray(P, dtype=float)
    r, ok, D = _candidates(P[None])
    out: dict = {}
    for k in np.nonzero(ok[0])[0]:
        sig = np.sign(D[0, k])
        if sig[np.nonzero(sig)[0][0]] < 0:
            sig = -sig
        key = tuple(int(x) for x in sig)
        out[key] = max(out.get(key, 0.0), math.asin(min(1.0, float(r[0, k]))))
    return out


def kth_inradius(P: np.ndarray, k: int) -> float:
    """k-th largest cell inradius, counting each antipodal cell pair twice."""
    if len(P) == 1:
        return math.pi / 2 if k <= 2 else 0.0
    vals = sorted(cell_inradii(P).values(), reverse=True)
    doubled = [v for v in vals for _ in (0, 1)]
    return doubled[k - 1] if len(doubled) >= k else 0.0


def _cells_from_vertices(P: np.ndarray, zero: float = 1e-10):
    n = len(P)
    pairs = list(itertools.combinations(range(n), 2))
    X = np.cross(P[[a for a, _ in pairs]], P[[b for _, b in pairs]])
    X /= np.linalg.norm(X, axis=1, keepdims=True)
    V = np.vstack([X, -X])
    D = V @ P.T
    S = np.where(np.abs(D) <= zero, 0, np.sign(D)).astype(np.int8)
    cells: dict = {}
    for k in range(len(V)):
        z = np.nonzero(S[k] == 0)[0]
        for combo in itertools.product((1, -1), repeat=len(z)):
            sig = S[k].copy()
            sig[z] = combo
            cells.setdefault(sig.tobytes(), []).append(k)
    return V, cells


@lru_cache(maxsize=None)
def _pad_subsets(s: int):
    return (np.array(list(itertools.combinations(range(s), 2)), dtype=np.intp).reshape(-1, 2),
            np.array(list(itertools.combinations(range(s), 3)), dtype=np.intp).reshape(-1, 3))


def cell_circumradii(P: np.ndarray, keyed: bool = False):
    """Circumradius of every cell (and of a few spurious sign completions at
    concurrency points, which only ever add vertices of neighbouring cells)."""
    P = np.asarray(P, dtype=float)
    V, cells = _cells_from_vertices(P)
    keys = list(cells)
    groups = list(cells.values())
    # dedupe vertices that coincide (concurrent circles) inside a cell
    smax = max(len(g) for g in groups)
    idx = np.array([g + [g[0]] * (smax - len(g)) for g in groups], dtype=np.intp)
    W = V[idx]  # (cells, smax, 3)
    I2, I3 = _pad_subsets(smax)
    q2 = 0.5 * (W[:, I2[:, 0]] + W[:, I2[:, 1]])
    r2 = np.linalg.norm(q2, axis=-1)
    best = r2.min(axis=1)
    if len(I3):
        q3, ok3 = _triangle_min_norm(W[:, I3[:, 0]], W[:, I3[:, 1]], W[:, I3[:, 2]])
        r3 = np.where(ok3, np.linalg.norm(q3, axis=-1), np.inf)
        best = np.minimum(best, r3.min(axis=1))
    # a cell with all vertices on one great circle (a lune) gives best ~ 0, i.e. pi/2
    R = np.arccos(np.clip(best, -1.0, 1.0))
    return (keys, R) if keyed else R


def max_circumradius(P: np.ndarray) -> float:
    """Largest cell circumradius of one arrangement."""
    return float(cell_circumradii(P).max())



# ---------------------------------------------------------------------------
# Configuration handling
# ---------------------------------------------------------------------------

def regauge(P: np.ndarray) -> np.ndarray:
    """Rotate so pole 0 is north and pole 1 has azimuth 0."""
    P = np.array(P, dtype=float)
    z = P[0] / np.linalg.norm(P[0])
    ref = P[1] - (P[1] @ z) * z if len(P) > 1 else np.zeros(3)
    if np.linalg.norm(ref) < 1e-12:
        a = np.zeros(3)
        a[int(np.argmin(np.abs(z)))] = 1.0
        ref = a - (a @ z) * z
    x = ref / np.linalg.norm(ref)
    y = np.cross(z, x)
    R = np.array([x, y, z])
    return P @ R.T


def _frame(p):
    a = np.zeros(3)
    a[int(np.argmin(np.abs(p)))] = 1.0
    t1 = a - (a @ p) * p
    t1 /= np.linalg.norm(t1)
    return t1, np.cross(p, t1)


def project_groups(P: np.ndarray, groups, sweeps: int = 50) -> np.ndarray | None:
    """Make every group of circles pass through one common point.

    Returns None when a pole collapses onto a group's common point.
    """
    if not groups:
        return P
    P = P.copy()
    for _ in range(sweeps):
        worst = 0.0
        for g in groups:
            g = list(g)
            _, s, vt = np.linalg.svd(P[g])
            x = vt[-1]
            d = P[g] @ x
            worst = max(worst, float(np.max(np.abs(d))))
            Q = P[g] - d[:, None] * x[None, :]
            nq = np.linalg.norm(Q, axis=1, keepdims=True)
            if nq.min() < 1e-9:
                return None
            P[g] = Q / nq
        if worst < 1e-15:
            break
    return P


def _settle(P, groups):
    Q = project_groups(P, groups)
    return None if Q is None else regauge(Q)


def concurrency_groups(P: np.ndarray, tol: float = 1e-9) -> list:
    """Groups of at least three circles through a common point."""
    n = len(P)
    groups: list = []
    for a, b in itertools.combinations(range(n), 2):
        x = np.cross(P[a], P[b])
        x /= np.linalg.norm(x)
        g = frozenset(i for i in range(n) if abs(P[i] @ x) <= tol)
        if len(g) >= 3 and g not in groups:
            groups.append(g)
    return groups


def _merge_group(groups: list, new: frozenset, P: np.ndarray) -> list:
    out = []
    cur = set(new)
    for g in groups:
        if len(g & cur) >= 2:
            cur |= g
        else:
            out.append(g)
    out.append(frozenset(cur))
    return out


def _triple_defects(P: np.ndarray, groups):
    n = len(P)
    T = np.array(list(itertools.combinations(range(n), 3)), dtype=np.intp)
    if len(T) == 0:
        return T, np.zeros(0)
    det = np.abs(np.einsum("kd,kd->k", P[T[:, 0]], np.cross(P[T[:, 1]], P[T[:, 2]])))
    for g in groups:
        inside = np.isin(T, list(g)).all(axis=1)
        det[inside] = np.inf
    return T, det


# ---------------------------------------------------------------------------
# Pattern search
# ---------------------------------------------------------------------------

def _coincident(B: np.ndarray) -> np.ndarray:
    G = np.abs(np.einsum("bid,bjd->bij", B, B))
    n = B.shape[1]
    G[:, np.arange(n), np.arange(n)] = 0.0
    return (G > math.cos(1e-7)).any(axis=(1, 2))


def _score_fn(problem: SearchProblem):
    if problem.kind == "max_min_inradius":
        raw = min_inradius_batch
    elif problem.kind == "min_max_circumradius":
        raw = lambda B: -np.array([max_circumradius(P) for P in B])
    else:
        k = problem.n
        raw = lambda B: np.array([kth_inradius(P, k) for P in B])

    def score(B):
        B = np.asarray(B, dtype=float)
        bad = _coincident(B)
        out = np.full(len(B), -np.inf)
        if (~bad).any():
            out[~bad] = raw(B[~bad])
        return out

    return score


def _polls(P, step, rng, ndirs):
    n = len(P)
    out = []
    for i in range(1, n):
        if i == 1:
            t = np.array([0.0, 0.0, 1.0]) - P[1][2] * P[1]
            nt = np.linalg.norm(t)
            dirs = [t / nt] if nt > 1e-12 else list(_frame(P[1]))
        else:
            dirs = list(_frame(P[i]))
        for t in dirs:
            for sgn in (1.0, -1.0):
                Q = P.copy()
                Q[i] = math.cos(step) * P[i] + sgn * math.sin(step) * t
                out.append(Q)
    for _ in range(ndirs):
        G = rng.standard_normal((n, 3))
        G[0] = 0.0
        G -= np.einsum("nd,nd->n", G, P)[:, None] * P
        if n > 1:
            t = np.array([0.0, 0.0, 1.0]) - P[1][2] * P[1]
            nt = np.linalg.norm(t)
            G[1] = (G[1] @ t) / nt ** 2 * t if nt > 1e-12 else G[1]
        G *= step / max(np.linalg.norm(G), 1e-300)
        ang = np.linalg.norm(G, axis=1)
        Q = P.copy()
        for i in range(n):
            if ang[i] > 0:
                Q[i] = math.cos(ang[i]) * P[i] + math.sin(ang[i]) * G[i] / ang[i]
        out.append(Q)
    return out


def pattern_search(score, P0: np.ndarray, problem: SearchProblem, rng: np.random.Generator, groups=None):
    """Maximize ``score`` from P0.  Returns (poles, score, groups, accepted moves)."""
    groups = list(groups or [])
    P = _settle(np.asarray(P0, dtype=float), groups)
    if P is None:
        P, groups = regauge(np.asarray(P0, dtype=float)), []
    val = float(score(P[None])[0])
    step = problem.step0
    accepted = 0
    it = 0
    while step > problem.min_step and it < problem.max_iters:
        it += 1
        cands = [Q for Q in (_settle(Q, groups) for Q in _polls(P, step, rng, problem.random_dirs))
                 if Q is not None]
        cand_groups = [groups] * len(cands)
        if len(P) >= 3:
            T, det = _triple_defects(P, groups)
            for t in np.argsort(det)[:3]:
                if not np.isfinite(det[t]) or det[t] > 0.5:
                    break
                g2 = _merge_group(groups, frozenset(int(x) for x in T[t]), P)
                Q = _settle(P, g2)
                if Q is not None:
                    cands.append(Q)
                    cand_groups.append(g2)
        vals = score(np.array(cands))
        b = int(np.argmax(vals))
        if vals[b] > val + 1e-15:
            P, val, groups = cands[b], float(vals[b]), cand_groups[b]
            accepted += 1
        else:
            step *= 0.5
    return P, val, groups, accepted


def _embed(P0: np.ndarray, groups):
    """Tangent coordinates around P0 in the gauge (pole 0 fixed, pole 1 on its meridian)."""
    n = len(P0)
    axes = []
    for i in range(1, n):
        if i == 1:
            t = np.array([0.0, 0.0, 1.0]) - P0[1][2] * P0[1]
            nt = np.linalg.norm(t)
            axes.append((1, [t / nt] if nt > 1e-12 else [_frame(P0[1])[0]]))
        else:
            axes.append((i, list(_frame(P0[i]))))

    def make(x):
        P = P0.copy()
        k = 0
        for i, ts in axes:
            v = sum(x[k + j] * t for j, t in enumerate(ts))
            k += len(ts)
            a = float(np.linalg.norm(v))
            if a > 0:
                P[i] = math.cos(a) * P0[i] + math.sin(a) * v / a
        return _settle(P, groups)

    return make, sum(len(ts) for _, ts in axes)


def _keyed_metric(problem: SearchProblem):
    """(keys, values, sense) of the per-cell quantity behind the objective."""
    if problem.kind == "min_max_circumradius":
        return lambda P: cell_circumradii(P, keyed=True), -1.0

    def inr(P):
        d = cell_inradii(P)
        return list(d), np.array(list(d.values()))

    return inr, 1.0


def polish(P: np.ndarray, problem: SearchProblem, score, groups=(), iters: int = 3) -> np.ndarray:
    """Refine a kink of a max-min (or min-max) objective by SLSQP on its epigraph.

    The active cells are frozen at the start point; the caller's hard score
    decides whether the result is kept.
    """
    from scipy.optimize import minimize

    groups = list(groups)
    metric, sense = _keyed_metric(problem)
    k = problem.n if problem.kind == "max_ts_radius" else None
    best = float(score(P[None])[0])
    for _ in range(iters):
        make, dim = _embed(P, groups)
        keys, v0 = metric(P)
        if len(keys) == 0:
            break
        if k is not None:
            # the top ceil(k/2) antipodal cell pairs carry the k caps
            order = np.argsort(-v0, kind="stable")[: (k + 1) // 2]
            keys = [keys[i] for i in order]
            v0 = v0[order]
        where = {key: i for i, key in enumerate(keys)}
        fallback = float(v0.max()) if sense < 0 else 0.0

        def vals(x):
            Q = make(x)
            out = np.full(len(keys), fallback)
            if Q is None:
                return out
            ks, v = metric(Q)
            for key, r in zip(ks, v):
                if key in where:
                    out[where[key]] = r
            return out

        t0 = float(v0.max()) if sense < 0 else float(v0.min())
        z0 = np.concatenate([np.zeros(dim), [t0]])
        # maximize sense * t subject to sense * (value_c - t) >= 0
        res = minimize(lambda z: -sense * z[-1], z0, method="SLSQP",
                       jac=lambda z: -sense * np.eye(len(z))[-1],
                       constraints=[{"type": "ineq", "fun": lambda z: sense * (vals(z[:-1]) - z[-1])}],
                       options={"maxiter": 50, "ftol": 1e-13})
        Q = make(res.x[:-1])
        if Q is None:
            break
        qv = float(score(Q[None])[0])
        if qv <= best + 1e-15:
            break
        P, best = Q, qv
    return P


def _random_poles(rng, n):
    X = rng.standard_normal((n, 3))
    return X / np.linalg.norm(X, axis=1, keepdims=True)


def _one_restart(args):
    problem, m, seed_seq, start = args
    rng = np.random.default_rng(seed_seq)
    score = _score_fn(problem)
    if start is None:
        P0 = _random_poles(rng, m)
        groups = []
    else:
        P0 = np.asarray(start, dtype=float)
        groups = concurrency_groups(P0)
    if m == 1:
        P = P0[:1] / np.linalg.norm(P0[0])
        return P, float(score(P[None])[0]), 0
    S0 = _settle(P0, groups)
    init = float(score(S0[None])[0]) if S0 is not None else -np.inf
    coarse = problem
    if problem.kind != "max_min_inradius":
        # pattern search only brings us near a kink; SLSQP converges from there
        coarse = replace(problem, min_step=max(problem.min_step, 1e-3))
    P, val, groups, accepted = pattern_search(score, P0, coarse, rng, groups)
    if val > -np.inf:
        Q = polish(P, problem, score, groups)
        qv = float(score(Q[None])[0])
        if qv > val + 1e-15:
            P, val = Q, qv
            accepted += 1
    return P, val, accepted if val > init + 1e-15 else 0


def _run(problem: SearchProblem, m: int, starts: list):
    seqs = np.random.SeedSequence([problem.seed, m]).spawn(len(starts))
    jobs = [(problem, m, s, st) for s, st in zip(seqs, starts)]
    if problem.workers > 1:
        with ProcessPoolExecutor(problem.workers) as ex:
            results = list(ex.map(_one_restart, jobs))
    else:
        results = []
        for i, job in enumerate(jobs):
            results.append(_one_restart(job))
            if problem.verbose:
                print(f"restart {i}: {results[-1][1]:.12f}", file=sys.stderr)
    return results


def _best(results):
    # by value, then by restart index for determinism
    b = max(range(len(results)), key=lambda i: (results[i][1], -i))
    return results[b]


def _value(problem, score):
    return -score if problem.kind == "min_max_circumradius" else score


def optimize_arrangement(problem: SearchProblem, starts: list | None = None) -> SearchResult:
    """Multi-start pattern search for the best n-circle arrangement."""
    if problem.kind == "max_ts_radius":
        return optimize_ts_packing(problem)
    # explicit seeds run first, followed by the random restarts
    starts = list(starts or []) + [None] * problem.restarts
    results = _run(problem, problem.n, starts)
    P, score, _ = _best(results)
    circles = [GreatCircle(tuple(p)) for p in P]
    value = _value(problem, score)
    M = cell_metrics(build_tiling(circles))
    cert = M.min_inradius if problem.kind == "max_min_inradius" else M.max_circumradius
    history = [_value(problem, r[1]) for r in results]
    flagged = all(r[2] == 0 for r in results)
    return SearchResult(problem, circles, value, cert, abs(cert - value) <= 1e-9, history, flagged)


def ts_centers(P: np.ndarray, k: int) -> np.ndarray:
    """Incenters of the k best cells of the arrangement (antipodal cells both used)."""
    if len(P) == 1:
        p = P[0] / np.linalg.norm(P[0])
        return np.array([p, -p])[:k]
    circles = [GreatCircle(tuple(p)) for p in P]
    T = build_tiling(circles)
    M = cell_metrics(T)
    order = sorted(range(len(T.cells)), key=lambda i: (-M.inradius[i], i))
    return np.array([M.incenter[i] for i in order[:k]])


def optimize_ts_packing(problem: SearchProblem) -> SearchResult:
    """Best TS-packing of k caps among incaps of cells of great-circle tilings."""
    from .packing import CapPacking, SeparationWitness, verify_ts

    k = problem.n
    all_results = []
    best = None
    families = problem.families
    if families is None:
        fit = [m for m in range(1, 7) if (2 if m == 1 else m * m - m + 2) >= k]
        families = tuple(fit[:3])
    for m in families:
        if (2 if m == 1 else m * m - m + 2) < k:
            continue
        restarts = 1 if m == 1 else problem.restarts
        res = _run(problem, m, [None] * restarts)
        all_results += res
        cand = _best(res)
        if best is None or cand[1] > best[1] + 1e-12:
            best = cand
    P, value, _ = best
    circles = [GreatCircle(tuple(p)) for p in P]
    centers = ts_centers(P, k)
    if len(P) == 1:
        cert = math.pi / 2
    else:
        M = cell_metrics(build_tiling(circles))
        cert = sorted(M.inradius, reverse=True)[k - 1]
    rep = verify_ts(CapPacking(centers, value), SeparationWitness(circles))
    history = [r[1] for r in all_results]
    flagged = all(r[2] == 0 for r in all_results)
    ok = abs(cert - value) <= 1e-9 and bool(rep.is_ts)
    return SearchResult(problem, circles, value, cert, ok, history, flagged, centers)


CONJECTURE = {
    6: ("tetrahedral6", math.atan(1 / 3)),
    9: ("octahedral9", math.atan(math.sqrt((2 - math.sqrt(2)) / 12))),
    15: ("icosahedral15", math.acos(math.sqrt((210 + 12 * math.sqrt(5)) / 241))),
}


@dataclass
class ProbeResult:
    n: int
    conjectured: float
    best: SearchResult
    improved: bool  # some configuration beat the conjectured value by more than 1e-6


def probe_conjecture(n: int, restarts: int = 200, seed: int = 0, **kw) -> ProbeResult:
    """Search for n-circle arrangements beating the reflection arrangement."""
    if n not in CONJECTURE:
        raise BadParams("the conjecture concerns n in {6, 9, 15}")
    name, rho = CONJECTURE[n]
    seed_poles = np.array([c.vec for c in named_arrangement(name)])
    problem = SearchProblem("max_min_inradius", n, restarts=restarts, seed=seed, **kw)
    res = optimize_arrangement(problem, starts=[seed_poles])
    return ProbeResult(n, rho, res, res.value > rho + 1e-6)
