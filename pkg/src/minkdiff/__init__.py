"""Differential geometry of surfaces in three-dimensional normed spaces."""

__version__ = "0.1.0"

from .charts import SurfaceChart
from .errors import (EpsilonTooLarge, HypothesisViolated, InvalidArgument, MinkdiffError,
                     NoPath, NotAdmissible, NotImmersed, NumericFailure, OrientationError,
                     SpecError)
from .norm import Norm, NormSpec, admissibility_scan, make_norm
from .rng import SplitMix64
from .surface import CurvatureReport, curvature_field, curvatures

__all__ = [
    "EpsilonTooLarge", "HypothesisViolated", "InvalidArgument", "MinkdiffError", "NoPath",
    "NotAdmissible", "NotImmersed", "NumericFailure", "OrientationError", "SpecError",
    "Norm", "NormSpec", "SplitMix64", "SurfaceChart", "CurvatureReport", "admissibility_scan",
    "curvature_field", "curvatures", "make_norm",
]
