import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import cells_by_sampling
from tscaps.arrangement import build_tiling, cell_metrics
from tscaps.core import GreatCircle
from tscaps.errors import BadParams, CoincidentCircles, DegenerateArrangement, OutOfDomain, TooLarge
from tscaps.highdim import (GreatSphereArrangement, boroczky_mc_check, cap_volume, cell_circumradius, cell_count_bound,
                            cell_diameter, covering_by_cells, delta_net, enumerate_cells, glazyrin_check,
                            jung_radius, orthogonal, regular_inscribed_simplex, rgs_bounds, sample_cap, simplex_area)


def test_orthogonal_d3_matches_octants():
    E = enumerate_cells(orthogonal(3))
    assert len(E.cells) == 8 and E.simple
    for c in E.cells:
        assert cell_circumradius(c) == pytest.approx(math.acos(1 / math.sqrt(3)))


def test_orthogonal_d4():
    E = enumerate_cells(orthogonal(4))
    assert len(E.cells) == 16
    for c in E.cells:
        assert len(c.vertices) == 4
        G = c.vertices @ c.vertices.T
        assert np.allclose(G, np.eye(4), atol=1e-12)  # regular simplex with edges pi/2
        assert cell_circumradius(c) == pytest.approx(math.pi / 3)
    R = covering_by_cells(orthogonal(4))
    assert R.N == 16 and R.R == pytest.approx(math.pi / 3) and R.glazyrin


@pytest.mark.parametrize("d", [3, 4, 5])
def test_orthogonal_circumradius(d):
    E = enumerate_cells(orthogonal(d))
    assert len(E.cells) == 2 ** d
    assert max(cell_circumradius(c) for c in E.cells) == pytest.approx(math.acos(1 / math.sqrt(d)))


def test_orthogonal_is_locally_optimal():
    base = covering_by_cells(orthogonal(4)).R
    rng = np.random.default_rng(0)
    for k in range(4):
        P = np.eye(4)
        P[k] += 1e-3 * rng.standard_normal(4)
        assert covering_by_cells(GreatSphereArrangement(P)).R > base


def test_random_d3_five_circles():
    P = np.random.default_rng(5).standard_normal((5, 3))
    E = enumerate_cells(GreatSphereArrangement(P))
    assert len(E.cells) == 22 == cell_count_bound(5, 3)
    assert {c.signs for c in E.cells} == cells_by_sampling(P)


@settings(max_examples=15)
@given(st.integers(4, 7), st.integers(0, 10 ** 6))
def test_random_d4_counts(n, seed):
    P = np.random.default_rng(seed).standard_normal((n, 4))
    E = enumerate_cells(GreatSphereArrangement(P))
    assert E.simple
    assert len(E.cells) == cell_count_bound(n, 4)
    signs = {c.signs for c in E.cells}
    assert all(tuple(-s for s in sg) in signs for sg in signs)
    for c in E.cells:
        assert np.all(np.array(c.signs) * (P @ c.witness) > 0)


def test_d4_cells_match_sampling():
    P = np.random.default_rng(3).standard_normal((6, 4))
    E = enumerate_cells(GreatSphereArrangement(P))
    assert {c.signs for c in E.cells} == cells_by_sampling(P, n=1_000_000)


def test_agrees_with_arrangement_module():
    P = np.random.default_rng(8).standard_normal((5, 3))
    T = build_tiling([GreatCircle(tuple(p)) for p in P])
    E = enumerate_cells(GreatSphereArrangement(T.poles))  # same pole orientation
    M = cell_metrics(T)
    by_sign = {T.sign_vector(c): r for c, r in zip(T.cells, M.circumradius)}
    for c in E.cells:
        assert cell_circumradius(c) == pytest.approx(by_sign[c.signs], abs=1e-9)


def test_degenerate_and_limits():
    # three spheres through a common point of S^2 plus one more: concurrence is reported
    P = np.array([[1, 0, 0], [0, 1, 0], [1, 1, 0], [0, 0, 1]], dtype=float)
    E = enumerate_cells(GreatSphereArrangement(P))
    assert not E.simple
    assert len(E.cells) < cell_count_bound(4, 3)
    with pytest.raises(DegenerateArrangement):
        enumerate_cells(GreatSphereArrangement(np.eye(4)[:3]))
    with pytest.raises(TooLarge):
        enumerate_cells(GreatSphereArrangement(np.random.default_rng(0).standard_normal((17, 3))))
    with pytest.raises(CoincidentCircles):
        GreatSphereArrangement([[1, 0, 0, 0], [-1, 0, 0, 0]])
    with pytest.raises(BadParams):
        GreatSphereArrangement([[1, 0], [0, 1]])


def test_rgs_bounds():
    b = rgs_bounds(4, 4)
    assert math.degrees(b.exact) == pytest.approx(60.0)
    b = rgs_bounds(20, 4)
    assert b.lower == pytest.approx(math.asin(4 / (2 * (1 + 19 + 171 + 969))))
    assert b.lower < b.upper
    b = rgs_bounds(1000, 3)
    assert b.upper == pytest.approx(math.asin(4 * 1000 ** (-1 / 3) * math.sqrt(4 / 3)))
    assert math.sin(b.upper) == pytest.approx(0.4619, abs=5e-5)
    assert rgs_bounds(5, 4).upper_clamped
    with pytest.raises(OutOfDomain):
        rgs_bounds(5, 2)


def test_glazyrin():
    assert glazyrin_check(8, math.acos(1 / math.sqrt(3)), 3)
    assert 8 * math.sin(math.acos(1 / math.sqrt(3))) == pytest.approx(6.53, abs=0.005)
    assert not glazyrin_check(3, math.pi / 6, 3)
    assert glazyrin_check(16, math.pi / 3, 4)


def test_jung():
    assert jung_radius(0.0, 3) == 0.0
    assert jung_radius(math.pi / 2, 3) == pytest.approx(math.acos(1 / math.sqrt(3)))
    E = enumerate_cells(orthogonal(3))
    c = E.cells[0]
    assert jung_radius(cell_diameter(c), 3) == pytest.approx(cell_circumradius(c))
    n, d = 10 ** 6, 4
    delta = math.asin(4 / n ** (1 / d))
    assert jung_radius(2 * delta, d) == pytest.approx(rgs_bounds(n, d).upper)
    with pytest.raises(OutOfDomain):
        jung_radius(math.pi, 3)


def test_delta_net():
    N = delta_net(3, math.pi / 2, seed=0)
    assert len(N.points) <= 6 and N.audit_gap <= math.pi / 2
    N = delta_net(3, 0.5, seed=1)
    assert N.audit_gap <= 0.5
    assert len(N.points) <= N.existence_bound


@pytest.mark.parametrize("delta", [0.8, 0.9, 1.0])
def test_delta_net_cells_have_small_diameter(delta):
    net = delta_net(3, delta, seed=2)
    E = enumerate_cells(GreatSphereArrangement(net.points), max_n=40)
    assert max(cell_diameter(c) for c in E.cells) <= 2 * delta
    # Jung turns the diameter into a covering radius
    R = max(cell_circumradius(c) for c in E.cells)
    assert R <= jung_radius(2 * delta, 3) + 1e-12


def test_regular_simplex_and_sampling():
    for d in (3, 4):
        V = regular_inscribed_simplex(d, 0.8)
        e = np.zeros(d)
        e[-1] = 1
        assert np.allclose(V @ e, math.cos(0.8))
        G = V @ V.T
        off = G[~np.eye(d, dtype=bool)]
        assert np.allclose(off, off[0])
    X = sample_cap(np.random.default_rng(0), 3, 0.7, 200000)
    # fraction in the half-radius cap matches the area ratio
    frac = np.mean(X[:, -1] >= math.cos(0.35))
    assert frac == pytest.approx(cap_volume(3, 0.35) / cap_volume(3, 0.7), abs=5e-3)
    assert cap_volume(4, math.pi) == pytest.approx(2 * math.pi ** 2)


def test_boroczky_d3_octant():
    r = math.acos(1 / math.sqrt(3))
    assert simplex_area(regular_inscribed_simplex(3, r)) == pytest.approx(math.pi / 2)
    res = boroczky_mc_check(3, r, 2000, seed=0)
    assert res.passed and res.regular_volume == pytest.approx(math.pi / 2)
    V = regular_inscribed_simplex(3, r)
    assert simplex_area(np.array([V[0], V[0], V[1]])) == 0.0


def test_boroczky_d4_small():
    res = boroczky_mc_check(4, 1.0, 100, seed=0, samples=100000)
    assert res.passed and res.max_volume <= res.regular_volume * 1.05
    with pytest.raises(BadParams):
        boroczky_mc_check(5, 1.0, 10)
    with pytest.raises(OutOfDomain):
        boroczky_mc_check(3, math.pi / 2, 10)
