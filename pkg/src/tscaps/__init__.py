"""Totally separable cap packings and coverings on the sphere."""

from .core import GreatCircle, SphericalCap, Tolerances, maximin, override_tolerances, sdist, tolerances
from .metrics import SphericalPolygon, inradius_polygon, triangle_inradius
from .arrangement import Tiling, build_tiling, cell_metrics, named_arrangement
from .molnar import decompose, delaunay, molnar, refine
from .packing import CapPacking, SeparationWitness, named_packing, verify_packing, verify_ts
from .covering import named_covering, verify_ts_covering
from .highdim import GreatSphereArrangement, enumerate_cells
from .optimizer import SearchProblem, optimize_arrangement, optimize_ts_packing, probe_conjecture

__version__ = "0.1.0"
