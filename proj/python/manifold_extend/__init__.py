"""Periodically perforated grids and manifold-constrained extension operators.

The heavy lifting lives in the compiled ``_core`` module; this package
re-exports its public names. Fields cross the boundary as numpy copies,
grids stay opaque handles.
"""

from ._core import (
    HOLE,
    OUTSIDE,
    SOLID,
    ConstrainedResult,
    Field,
    Grid,
    Manifold,
    MicroCell,
    box_cell,
    build_grid,
    constant_field,
    disk_cell,
    epsilon_threshold,
    extend_constrained,
    extend_constrained_retracted,
    extend_unconstrained,
    fixture_field,
    lp_norm,
    manifold,
    measure_ratio_bound,
    random_field,
    w1p_seminorm,
    winding_number,
)

__all__ = [
    "HOLE",
    "OUTSIDE",
    "SOLID",
    "ConstrainedResult",
    "Field",
    "Grid",
    "Manifold",
    "MicroCell",
    "box_cell",
    "build_grid",
    "constant_field",
    "disk_cell",
    "epsilon_threshold",
    "extend_constrained",
    "extend_constrained_retracted",
    "extend_unconstrained",
    "fixture_field",
    "lp_norm",
    "manifold",
    "measure_ratio_bound",
    "random_field",
    "w1p_seminorm",
    "winding_number",
]
