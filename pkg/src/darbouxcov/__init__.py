"""Mechanical checks of Darboux covariance for Lax pairs.

Submodules
----------
diffring    differential polynomials in jet variables
lindop      linear differential operators, Bell polynomials, Darboux transform
covariance  jointly covariant third/second order pair in one potential
dressing    zero-seed dressing, dressing chains, grid residuals
freealg     free noncommutative polynomials with central parameters
zs          dense-matrix checks: ZS compatibility, Euler top, projector DT
cli         command line entry point
"""

__version__ = "0.1.0"

from . import covariance, diffring, dressing, freealg, lindop, zs  # noqa: F401
from .diffring import DiffExpr, d_t, d_x, int_x, jet, param, parse, render  # noqa: F401
from .lindop import LinDiffOp, bell, darboux_transform, ore_right_divide  # noqa: F401
