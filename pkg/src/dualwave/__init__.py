"""Dual-sector wave mechanics on periodic grids.

Fields live either in the (x, t) sector or in the conjugate (k, E) sector and
are mapped between the two by a symmetric unitary transform.
"""
from ._backend import BACKEND
from .fourier import DEFAULT_CONVENTION, MapConvention, apply_Tgen, apply_X, to_ke, to_xt
from .grid import Field, Grid, PhysParams, Sector, ValidationError, centered_grid, inner, make_grid, norm2
from .io import FormatError, dump_field, load_field
from .sector_ke import KeParams, evolve_ke
from .sector_xt import XtParams, evolve_xt

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "DEFAULT_CONVENTION", "MapConvention", "apply_Tgen", "apply_X", "to_ke", "to_xt",
    "Field", "Grid", "PhysParams", "Sector", "ValidationError", "centered_grid", "inner",
    "make_grid", "norm2", "FormatError", "dump_field", "load_field", "KeParams", "evolve_ke",
    "XtParams", "evolve_xt",
]
