import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import cells_by_sampling, max_inscribed_qp
from tscaps.arrangement import (Rgc_bounds, build_tiling, cell_metrics, covering_cell_lower_bound, named_arrangement,
                                prism_inradius, rgc_upper_bound)
from tscaps.core import GreatCircle
from tscaps.errors import BadParams, CoincidentCircles, FewerThanTwoCircles, OutOfDomain, UnknownName


def _random_circles(n, seed):
    P = np.random.default_rng(seed).standard_normal((n, 3))
    return [GreatCircle(tuple(p)) for p in P]


def _check_tiling(T, n):
    assert T.euler() == 2
    assert sum(c.area for c in T.cells) == pytest.approx(4 * math.pi, abs=n * 1e-9)
    assert len(T.cells) <= n * n - n + 2
    s = sum(c.sides for c in T.cells) / len(T.cells)
    assert 2 <= s <= 4
    # every edge bounds exactly two cells
    count = np.zeros(len(T.edges), dtype=int)
    for c in T.cells:
        for e in c.edge_indices:
            count[e] += 1
    assert np.all(count == 2)


def test_two_orthogonal_circles():
    T = build_tiling(named_arrangement("orthogonal2"))
    assert (len(T.vertices), len(T.edges), len(T.cells)) == (2, 4, 4)
    assert all(c.is_lune for c in T.cells)
    M = cell_metrics(T)
    assert M.min_inradius == pytest.approx(math.pi / 4)


def test_octants():
    T = build_tiling(named_arrangement("orthogonal3"))
    assert (len(T.vertices), len(T.edges), len(T.cells)) == (6, 12, 8)
    M = cell_metrics(T)
    assert M.min_inradius == pytest.approx(math.asin(1 / math.sqrt(3)))
    assert M.max_circumradius == pytest.approx(math.acos(1 / math.sqrt(3)))
    _check_tiling(T, 3)


def test_four_generic_circles():
    T = build_tiling(named_arrangement("cube_poles4"))
    assert (len(T.vertices), len(T.edges), len(T.cells)) == (12, 24, 14)
    assert T.is_simple()
    assert sum(c.sides == 3 for c in T.cells) >= 8
    # every circle carries six sides
    per_circle = np.bincount([e.circle for e in T.edges], minlength=4)
    assert np.all(per_circle == 6)
    assert cell_metrics(T).max_circumradius == pytest.approx(math.pi / 4, abs=1e-12)


def test_optimal4():
    T = build_tiling(named_arrangement("optimal4"))
    M = cell_metrics(T)
    assert M.min_inradius == pytest.approx(math.asin(1 / math.sqrt(5)))
    assert math.degrees(M.min_inradius) == pytest.approx(26.57, abs=0.005)
    assert not T.is_simple()  # three circles share an antipodal pair
    assert M.min_inradius <= M.max_circumradius


@pytest.mark.parametrize("name, value", [
    ("tetrahedral6", math.atan(1 / 3)),
    ("octahedral9", math.atan(math.sqrt((2 - math.sqrt(2)) / 12))),
    ("icosahedral15", math.acos(math.sqrt((210 + 12 * math.sqrt(5)) / 241))),
])
def test_reflection_mosaics(name, value):
    circles = named_arrangement(name)
    assert len(circles) == int(name[-2:].lstrip("l"))
    T = build_tiling(circles)
    assert cell_metrics(T).min_inradius == pytest.approx(value, abs=1e-10)
    _check_tiling(T, len(circles))


def test_mosaic_degrees():
    assert math.degrees(math.atan(1 / 3)) == pytest.approx(18.43, abs=0.01)
    assert math.degrees(math.atan(math.sqrt((2 - math.sqrt(2)) / 12))) == pytest.approx(12.46, abs=0.01)
    assert math.degrees(math.acos(math.sqrt((210 + 12 * math.sqrt(5)) / 241))) == pytest.approx(7.56, abs=0.01)


def test_prism():
    T = build_tiling(named_arrangement("prism(6)"))
    r = cell_metrics(T).min_inradius
    # frozen from the QP oracle on the triangle cells
    assert math.degrees(r) == pytest.approx(17.1720378505, abs=1e-9)
    assert r == pytest.approx(prism_inradius(6))
    assert named_arrangement("prism", 6)[0].same_as(named_arrangement("prism(6)")[0])


def test_pencil_is_all_lunes():
    T = build_tiling(named_arrangement("pencil(5)"))
    assert len(T.cells) == 10 and all(c.is_lune for c in T.cells)
    assert cell_metrics(T).min_inradius == pytest.approx(math.pi / 10)
    assert len(T.degeneracy_report) >= 1


def test_named_errors():
    with pytest.raises(UnknownName):
        named_arrangement("dodecahedral")
    with pytest.raises(BadParams):
        named_arrangement("prism")
    with pytest.raises(BadParams):
        named_arrangement("pencil(1)")


def test_build_errors():
    with pytest.raises(CoincidentCircles):
        build_tiling([GreatCircle((0, 0, 1)), GreatCircle((0, 0, -3))])
    with pytest.raises(FewerThanTwoCircles):
        build_tiling([GreatCircle((0, 0, 1))])


@pytest.mark.parametrize("n", range(2, 9))
def test_random_arrangements_are_simple(n):
    for seed in range(3):
        circles = _random_circles(n, 10 * n + seed)
        T = build_tiling(circles)
        assert T.is_simple()
        assert len(T.cells) == n * n - n + 2
        _check_tiling(T, n)


def test_cells_match_sampling():
    circles = _random_circles(5, 3)
    T = build_tiling(circles)
    sampled = cells_by_sampling([c.vec for c in circles])
    assert {T.sign_vector(c) for c in T.cells} == sampled


@settings(max_examples=20)
@given(st.integers(2, 6), st.integers(0, 10 ** 6))
def test_antipodal_symmetry(n, seed):
    T = build_tiling(_random_circles(n, seed))
    M = cell_metrics(T)
    by_sign = {T.sign_vector(c): i for i, c in enumerate(T.cells)}
    for s, i in by_sign.items():
        j = by_sign[tuple(-x for x in s)]
        assert M.inradius[i] == pytest.approx(M.inradius[j], abs=1e-9)
        assert M.circumradius[i] == pytest.approx(M.circumradius[j], abs=1e-9)


def test_cell_inradius_against_qp():
    T = build_tiling(_random_circles(5, 11))
    M = cell_metrics(T)
    for c, r in zip(T.cells, M.inradius):
        if not c.is_lune:
            assert r == pytest.approx(max_inscribed_qp(T.vertices[list(c.vertex_indices)]), abs=1e-8)


def test_rgc_upper_bound():
    assert rgc_upper_bound(5) == pytest.approx(math.acos(1 / (math.sqrt(2) * math.sin(5 * math.pi / 16))))
    vals = [rgc_upper_bound(n) for n in range(5, 200)]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    assert rgc_upper_bound(10 ** 7) < 1e-3
    for n in range(5, 51):
        assert prism_inradius(n) <= rgc_upper_bound(n)
    with pytest.raises(OutOfDomain):
        rgc_upper_bound(4)


def test_Rgc_bounds():
    b = Rgc_bounds(4)
    assert b.lower == pytest.approx(math.acos(1 / math.tan((1 + 1 / 7) * math.pi / 4)))
    assert b.lower <= math.pi / 4 <= b.upper == pytest.approx(math.pi / 2)
    assert b.upper_clamped
    assert Rgc_bounds(98).upper_clamped and not Rgc_bounds(99).upper_clamped
    assert Rgc_bounds(10 ** 6).upper == pytest.approx(math.asin(8 / (math.sqrt(3) * 100)), abs=1e-12)
    assert Rgc_bounds(10 ** 6).upper == pytest.approx(0.0462, abs=5e-5)
    for n in range(4, 300):
        b = Rgc_bounds(n)
        assert b.lower <= b.upper
    with pytest.raises(OutOfDomain):
        Rgc_bounds(3)


def test_covering_cell_lower_bound():
    assert covering_cell_lower_bound(math.acos(1 / math.sqrt(3))) <= 8
    assert covering_cell_lower_bound(math.pi / 2 - 1e-9) == pytest.approx(2, abs=1e-6)
    assert covering_cell_lower_bound(math.pi / 4) == pytest.approx(9.24, abs=0.005)
    assert covering_cell_lower_bound(math.pi / 4) <= 14
    with pytest.raises(OutOfDomain):
        covering_cell_lower_bound(0.0)
