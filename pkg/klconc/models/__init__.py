"""Pydantic domain types for klconc."""

from .abstract import KLConcBaseModel
from .bounds import BOUND_CSV_HEADER, BoundEntry, BoundReport, ConstantsConfig, SubGammaParams
from .distribution import (
    Counts,
    Distribution,
    ShapeSpec,
    alpha_floor,
    default_shape_specs,
    default_shapes,
    dirichlet,
    geometric,
    two_level,
    uniform,
)
from .estimates import McEstimate
from .law import ExactLaw
from .run import RunConfig
from .verify import Failure, GridSpec, VerifyReport

__all__ = (
    "BOUND_CSV_HEADER",
    "BoundEntry",
    "BoundReport",
    "ConstantsConfig",
    "Counts",
    "Distribution",
    "ExactLaw",
    "Failure",
    "GridSpec",
    "KLConcBaseModel",
    "McEstimate",
    "RunConfig",
    "ShapeSpec",
    "SubGammaParams",
    "VerifyReport",
    "alpha_floor",
    "default_shape_specs",
    "default_shapes",
    "dirichlet",
    "geometric",
    "two_level",
    "uniform",
)
