"""Verification grid and report types."""
# pylint: disable=no-self-argument
import math
from typing import Any, Dict, Optional, Tuple

from pydantic import root_validator, validator

from .abstract import KLConcBaseModel
from .distribution import ShapeSpec, default_shape_specs
from .estimates import MAX_SEED

DEFAULT_SEEDS = (20240101,)


class GridSpec(KLConcBaseModel):
    """The parameter sweep a property is checked over.

    `n_values` are exact cells when the multinomial support fits under `cap`; `mc_n_values` are always Monte Carlo
    cells. `alpha_values` add one alpha-floor shape per value to the per-k shapes. `t_grid` overrides the default
    21-point grid over [0, agrawal_delta_bound(k, 0.01)].
    """

    n_values: Tuple[int, ...] = tuple(range(1, 13))
    mc_n_values: Tuple[int, ...] = (50, 200, 1000)
    k_values: Tuple[int, ...] = (2, 3, 4)
    alpha_values: Tuple[float, ...] = ()
    p_shapes: Tuple[ShapeSpec, ...] = tuple(default_shape_specs())
    t_grid: Optional[Tuple[float, ...]] = None
    t_points: int = 21
    cap: int = 10**7
    mc_samples: int = 20000
    seeds: Tuple[int, ...] = DEFAULT_SEEDS
    threads: int = 1
    f_n_max: int = 500
    grad_n_max: int = 2000
    binary_n_max: int = 2000
    binary_p_values: Tuple[float, ...] = tuple(round(0.05 * i, 2) for i in range(1, 20))
    chi2_factor: int = 10**4
    g_tail_n_max: int = 20000
    g_half_n_max: int = 10**6
    moment_max: int = 10

    @validator("n_values", "k_values", "p_shapes")
    def check_nonempty(cls, value, field):
        """The core axes of the grid are nonempty."""
        if not value:
            raise ValueError(f"{field.name} must not be empty")
        return value

    @validator("n_values", "mc_n_values")
    def check_n(cls, value):
        """Sample sizes are >= 1."""
        if any(n < 1 for n in value):
            raise ValueError("every n must be >= 1")
        return tuple(sorted(set(value)))

    @validator("k_values")
    def check_k(cls, value):
        """Alphabet sizes are >= 2."""
        if any(k < 2 for k in value):
            raise ValueError("every k must be >= 2")
        return tuple(sorted(set(value)))

    @validator("binary_p_values")
    def check_binary_p(cls, value):
        """Binary grid points lie strictly inside (0, 1)."""
        if any(not 0.0 < q < 1.0 for q in value):
            raise ValueError("binary_p_values must lie in (0, 1)")
        return value

    @validator("seeds")
    def check_seeds(cls, value):
        """At least one seed, each a 64-bit unsigned integer."""
        if not value:
            raise ValueError("seeds must not be empty")
        if any(not 0 <= seed <= MAX_SEED for seed in value):
            raise ValueError("seeds must lie in [0, 2**64 - 1]")
        return value

    @validator("cap", "mc_samples", "threads", "t_points", "moment_max")
    def check_positive(cls, value, field):
        """Counts and caps are positive."""
        if value < 1:
            raise ValueError(f"{field.name} must be >= 1")
        return value

    @root_validator(skip_on_failure=True)
    def check_alpha_pairs(cls, values):
        """Every alpha lies in (0, 1/k] for every k of the grid."""
        k_max = max(values["k_values"])
        for alpha in values["alpha_values"]:
            if not 0.0 < alpha <= 1.0 / k_max:
                raise ValueError(f"alpha {alpha} is outside (0, 1/{k_max}]")
        return values

    def shapes(self) -> Tuple[ShapeSpec, ...]:
        """The configured shapes plus one alpha-floor shape per alpha value."""
        return self.p_shapes + tuple(ShapeSpec(name="alpha-floor", param=alpha) for alpha in self.alpha_values)

    def is_enumerable(self, n: int, k: int) -> bool:
        """Whether the multinomial support C(n+k-1, k-1) fits under the cap."""
        return math.comb(n + k - 1, k - 1) <= self.cap


class Failure(KLConcBaseModel):
    """One violated cell: lhs should be <= rhs; slack = rhs - lhs is negative."""

    cell: Dict[str, Any]
    lhs: float
    rhs: float
    slack: float


class VerifyReport(KLConcBaseModel):
    """Outcome of checking one property over a grid."""

    property: str
    cells_checked: int
    cells_skipped: int = 0
    failures: Tuple[Failure, ...] = ()
    min_slack: float = math.inf
    notes: Tuple[str, ...] = ()

    @property
    def passed(self) -> bool:
        """A report passes exactly when it has no failures."""
        return not self.failures

    def to_dict(self) -> Dict[str, Any]:
        """JSON form, including the derived pass flag."""
        return {
            "property": self.property,
            "passed": self.passed,
            "cells_checked": self.cells_checked,
            "cells_skipped": self.cells_skipped,
            "min_slack": self.min_slack,
            "failures": [failure.dict() for failure in self.failures],
            "notes": list(self.notes),
        }
