"""Parabolic function-space toolkit on a discrete space-time torus."""

from parafields.lattice import (
    Field,
    GridSpec,
    SpatialField,
    Spectrum,
    forward,
    inverse,
    make_grid,
    restrict_to_cylinder,
    sample,
)

__version__ = "0.1.0"

__all__ = [
    "Field",
    "GridSpec",
    "SpatialField",
    "Spectrum",
    "forward",
    "inverse",
    "make_grid",
    "restrict_to_cylinder",
    "sample",
    "__version__",
]
