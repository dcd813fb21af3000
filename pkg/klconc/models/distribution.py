"""Distribution and count types, plus the named p-shapes used by sweeps and the command line."""
# pylint: disable=no-self-argument
import math
from typing import List, Literal, Optional, Sequence, Tuple

import numpy as np
from pydantic import validator

from .abstract import KLConcBaseModel

SIMPLEX_TOLERANCE = 1e-12


class Distribution(KLConcBaseModel):
    """A point p of the simplex on k symbols.

    Zero masses are allowed here; operations whose guarantees need min_i p_i > 0 validate `alpha` themselves.
    """

    probs: Tuple[float, ...]

    @validator("probs", pre=True)
    def coerce_probs(cls, value):
        """Accept any sequence or numpy array of reals."""
        return tuple(float(item) for item in np.asarray(value, dtype=float).ravel())

    @validator("probs")
    def check_simplex(cls, value):
        """Enforce k >= 2, masses in [0, 1] and unit total."""
        if len(value) < 2:
            raise ValueError(f"a distribution needs at least 2 symbols, got {len(value)}")
        for index, mass in enumerate(value):
            if not 0.0 <= mass <= 1.0:
                raise ValueError(f"probs[{index}] = {mass!r} is outside [0, 1]")
        total = math.fsum(value)
        if abs(total - 1.0) > SIMPLEX_TOLERANCE:
            raise ValueError(f"probs sum to {total!r}, not 1 within {SIMPLEX_TOLERANCE}")
        return value

    @classmethod
    def from_weights(cls, weights: Sequence[float]) -> "Distribution":
        """Normalize nonnegative weights into a distribution."""
        array = np.asarray(weights, dtype=float)
        if np.any(array < 0) or not np.isfinite(array).all() or array.sum() <= 0:
            raise ValueError("weights must be finite, nonnegative and not all zero")
        return cls(probs=array / math.fsum(array))

    @property
    def k(self) -> int:
        """Alphabet size."""
        return len(self.probs)

    @property
    def alpha(self) -> float:
        """Minimum mass."""
        return min(self.probs)

    @property
    def array(self) -> np.ndarray:
        """The masses as a float64 array."""
        return np.asarray(self.probs, dtype=float)

    def support(self) -> "Distribution":
        """The distribution restricted to its nonzero masses (k shrinks accordingly)."""
        kept = tuple(mass for mass in self.probs if mass > 0.0)
        if len(kept) == self.k:
            return self
        if len(kept) == 1:
            # A point mass has a single symbol; keep a dummy zero symbol so k >= 2 still holds.
            return Distribution(probs=(1.0, 0.0))
        return Distribution.from_weights(kept)

    def to_dict(self):
        """Wire format: just the masses."""
        return {"p": list(self.probs)}


class Counts(KLConcBaseModel):
    """A multinomial outcome (X_1, ..., X_k) with n = sum of the counts."""

    counts: Tuple[int, ...]

    @validator("counts", pre=True)
    def coerce_counts(cls, value):
        """Accept any integer sequence or numpy array."""
        return tuple(int(item) for item in np.asarray(value).ravel())

    @validator("counts")
    def check_counts(cls, value):
        """Counts are nonnegative and at least one is positive."""
        if any(count < 0 for count in value):
            raise ValueError("counts must be nonnegative")
        if sum(value) < 1:
            raise ValueError("counts must sum to n >= 1")
        return value

    @property
    def n(self) -> int:
        """Sample size."""
        return sum(self.counts)

    @property
    def k(self) -> int:
        """Alphabet size."""
        return len(self.counts)

    @property
    def array(self) -> np.ndarray:
        """The counts as a float64 array."""
        return np.asarray(self.counts, dtype=float)

    def empirical(self) -> np.ndarray:
        """The empirical distribution p̂ = X / n."""
        return self.array / self.n


#
# Named shapes
#


def uniform(k: int) -> Distribution:
    """Uniform distribution on k symbols."""
    return Distribution(probs=np.full(k, 1.0 / k))


def geometric(k: int, ratio: float = 0.5) -> Distribution:
    """Geometrically decaying masses proportional to ratio**i."""
    return Distribution.from_weights(ratio ** np.arange(k, dtype=float))


def two_level(k: int, heavy: float = 2.0) -> Distribution:
    """The first ceil(k/2) symbols carry `heavy` times the mass of the rest."""
    weights = np.ones(k)
    weights[: (k + 1) // 2] = heavy
    return Distribution.from_weights(weights)


def dirichlet(k: int, seed: int = 0) -> Distribution:
    """A flat-Dirichlet draw from a seeded counter-based generator."""
    rng = np.random.Generator(np.random.Philox(seed))
    return Distribution.from_weights(rng.dirichlet(np.ones(k)))


def alpha_floor(k: int, alpha: float) -> Distribution:
    """k-1 symbols at mass alpha and the remainder on the last one, so that min p = alpha exactly."""
    if not 0.0 < alpha <= 1.0 / k:
        raise ValueError(f"alpha must lie in (0, 1/k] = (0, {1.0 / k}], got {alpha}")
    probs = [alpha] * (k - 1) + [1.0 - (k - 1) * alpha]
    return Distribution(probs=probs)


ShapeName = Literal["uniform", "geometric", "two-level", "dirichlet", "alpha-floor"]


class ShapeSpec(KLConcBaseModel):
    """A named p-shape with its single parameter (ratio, heavy factor, seed or alpha)."""

    name: ShapeName
    param: Optional[float] = None

    @property
    def label(self) -> str:
        """Short human-readable label used in reports."""
        if self.param is None:
            return self.name
        return f"{self.name}({self.param:g})"

    def build(self, k: int) -> Distribution:
        """Instantiate this shape on k symbols."""
        if self.name == "uniform":
            return uniform(k)
        if self.name == "geometric":
            return geometric(k, 0.5 if self.param is None else self.param)
        if self.name == "two-level":
            return two_level(k, 2.0 if self.param is None else self.param)
        if self.name == "dirichlet":
            return dirichlet(k, 0 if self.param is None else int(self.param))
        return alpha_floor(k, 1.0 / k if self.param is None else self.param)


def default_shape_specs() -> List[ShapeSpec]:
    """The eight shapes used per alphabet size by the default verification grid."""
    return [
        ShapeSpec(name="uniform"),
        ShapeSpec(name="geometric", param=0.5),
        ShapeSpec(name="geometric", param=0.8),
        ShapeSpec(name="two-level", param=2.0),
        ShapeSpec(name="two-level", param=4.0),
        ShapeSpec(name="dirichlet", param=0),
        ShapeSpec(name="dirichlet", param=1),
        ShapeSpec(name="dirichlet", param=2),
    ]


def default_shapes(k: int) -> List[Distribution]:
    """The default shapes instantiated on k symbols."""
    return [spec.build(k) for spec in default_shape_specs()]
