"""Monte Carlo estimate type."""
# pylint: disable=no-self-argument
import math

from pydantic import validator

from .abstract import KLConcBaseModel

MAX_SEED = 2**64 - 1


class McEstimate(KLConcBaseModel):
    """A Monte Carlo estimate with its standard error, sample count and seed."""

    estimate: float
    std_error: float
    samples: int
    seed: int

    @validator("estimate")
    def check_estimate(cls, value):
        """Estimates are finite."""
        if not math.isfinite(value):
            raise ValueError(f"estimate must be finite, got {value}")
        return value

    @validator("std_error")
    def check_std_error(cls, value):
        """Standard errors are finite and >= 0."""
        if not math.isfinite(value) or value < 0:
            raise ValueError(f"std_error must be finite and nonnegative, got {value}")
        return value

    @validator("samples")
    def check_samples(cls, value):
        """At least one sample."""
        if value < 1:
            raise ValueError("samples must be >= 1")
        return value

    @validator("seed")
    def check_seed(cls, value):
        """Seeds are 64-bit unsigned integers."""
        if not 0 <= value <= MAX_SEED:
            raise ValueError(f"seed must be in [0, 2**64 - 1], got {value}")
        return value

    def within(self, target: float, n_std: float) -> bool:
        """Whether `target` lies within n_std standard errors of the estimate."""
        return abs(self.estimate - target) <= n_std * self.std_error
