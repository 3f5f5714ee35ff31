"""Phase-space (Wigner) calculus for the Klein-Gordon equation in the
Feshbach-Villars representation."""

from .grid import PhaseSpaceGrid, make_grid
from .states import FVState, evolve_free, from_fv, make_gaussian, superpose, to_fv
from .stats import (
    RouteMismatchError,
    average,
    coordinate_moment,
    fig2_curve,
    overlap,
    purity_functional,
    second_moment_corrected,
)
from .wigner import WignerComponents, evolve_components, fv_wigner_components, matrix_wigner

__all__ = [
    "PhaseSpaceGrid",
    "make_grid",
    "FVState",
    "make_gaussian",
    "superpose",
    "to_fv",
    "from_fv",
    "evolve_free",
    "WignerComponents",
    "fv_wigner_components",
    "matrix_wigner",
    "evolve_components",
    "average",
    "coordinate_moment",
    "second_moment_corrected",
    "overlap",
    "purity_functional",
    "fig2_curve",
    "RouteMismatchError",
]

__version__ = "0.1.0"
