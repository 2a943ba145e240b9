"""Random multi-point MRC solver for acoustic scattering by soft obstacles."""

from . import basis, field, geometry, lsq, mrc, oracle, specfun
from .mrc import ScatterProblem, SolverConfig, SolverError, solve

__all__ = ["basis", "field", "geometry", "lsq", "mrc", "oracle", "specfun",
           "ScatterProblem", "SolverConfig", "SolverError", "solve"]
__version__ = "0.1.0"
