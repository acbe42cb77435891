import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import matching_size
from tscaps.arrangement import build_tiling, cell_metrics, named_arrangement
from tscaps.core import GreatCircle, SphericalCap
from tscaps.covering import (Delta_bound, circumcap_covering, coverage_matrix, covering_density, named_covering,
                             verify_ts_covering)
from tscaps.errors import MixedRadii, OutOfDomain, UnknownName


def test_octant_covering():
    caps, T = named_covering("octant8")
    rep = verify_ts_covering(caps, T)
    assert rep.is_ts_covering and len(caps) == 8
    r = math.acos(1 / math.sqrt(3))
    assert rep.density == pytest.approx(4 * (1 - math.cos(r)))
    assert rep.density >= Delta_bound(r) - 1e-9


def test_cuboctahedral_covering():
    caps, T = named_covering("cuboctahedral14")
    assert len(caps) == 14 and len(T.cells) == 14
    rep = verify_ts_covering(caps, T)
    assert rep.is_ts_covering
    assert rep.density >= Delta_bound(math.pi / 4) - 1e-9
    # the matching agrees with a supplied assignment
    assert verify_ts_covering(caps, T, rep.assignment).is_ts_covering


def test_thirteen_caps_leave_a_cell():
    caps, T = named_covering("cuboctahedral14")
    rep = verify_ts_covering(caps[:13], T)
    assert not rep.is_ts_covering and len(rep.uncovered_cells) == 1


def test_bad_assignment():
    caps, T = named_covering("octant8")
    good = verify_ts_covering(caps, T).assignment
    clash = dict(good)
    clash[1] = clash[0]  # two cells on one cap
    rep = verify_ts_covering(caps, T, clash)
    assert not rep.is_ts_covering and rep.uncovered_cells
    missing = {k: v for k, v in good.items() if k != 3}
    assert verify_ts_covering(caps, T, missing).uncovered_cells == [3]


def test_lunes_need_hemispheres():
    T = build_tiling(named_arrangement("orthogonal2"))
    caps = [SphericalCap(tuple(c), math.pi / 2 - 0.01) for c in cell_metrics(T).circumcenter]
    assert not verify_ts_covering(caps, T).is_ts_covering


def test_errors():
    _, T = named_covering("octant8")
    with pytest.raises(MixedRadii):
        verify_ts_covering([SphericalCap((0, 0, 1), 0.2), SphericalCap((1, 0, 0), 0.3)], T)
    with pytest.raises(UnknownName):
        named_covering("cube6")


def test_density_formula():
    caps, _ = named_covering("cuboctahedral14")
    area = sum(2 * math.pi * (1 - math.cos(c.radius)) for c in caps)
    assert covering_density(14, math.pi / 4) == pytest.approx(area / (4 * math.pi))


def test_Delta_bound():
    assert Delta_bound(1e-4) == pytest.approx(math.pi / 2, abs=1e-3)
    assert Delta_bound(math.pi / 2 - 1e-4) == pytest.approx(1.0, abs=1e-3)
    vals = [Delta_bound(r) for r in np.linspace(0.01, math.pi / 2 - 0.01, 100)]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    with pytest.raises(OutOfDomain):
        Delta_bound(math.pi / 2)


@settings(max_examples=15)
@given(st.integers(3, 6), st.integers(0, 10 ** 6))
def test_circumcap_covering_always_verifies(n, seed):
    P = np.random.default_rng(seed).standard_normal((n, 3))
    T = build_tiling([GreatCircle(tuple(p)) for p in P])
    caps = circumcap_covering(T)
    rep = verify_ts_covering(caps, T)
    assert rep.is_ts_covering
    assert rep.density >= Delta_bound(caps[0].radius) - 1e-9


@settings(max_examples=15)
@given(st.integers(0, 10 ** 6), st.integers(6, 16), st.floats(0.5, 1.3))
def test_matching_vs_kuhn(seed, m, r):
    rng = np.random.default_rng(seed)
    T = build_tiling([GreatCircle(tuple(p)) for p in rng.standard_normal((4, 3))])
    C = rng.standard_normal((m, 3))
    C /= np.linalg.norm(C, axis=1, keepdims=True)
    caps = [SphericalCap(tuple(c), r) for c in C]
    rep = verify_ts_covering(caps, T)
    M = coverage_matrix(C, r, T)
    assert len(T.cells) - len(rep.uncovered_cells) == matching_size(M)
    assert rep.is_ts_covering == (matching_size(M) == len(T.cells))
