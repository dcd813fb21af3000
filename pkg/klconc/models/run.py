"""Parsed command-line invocation."""
# pylint: disable=no-self-argument
from typing import Dict, Literal, Optional, Tuple

from pydantic import root_validator, validator

from .abstract import KLConcBaseModel
from .bounds import ConstantsConfig
from .distribution import Distribution, ShapeSpec
from .estimates import MAX_SEED

Subcommand = Literal["exact", "bound", "mc", "verify", "threshold"]
OutputFormat = Literal["json", "csv", "table"]
Method = Literal["sanov", "agrawal", "main", "best"]
Estimator = Literal["tail", "moment", "log_mgf", "coverage"]


class RunConfig(KLConcBaseModel):
    """Everything a subcommand needs, validated before any computation starts."""

    subcommand: Subcommand
    n: Optional[int] = None
    k: Optional[int] = None
    p: Optional[Tuple[float, ...]] = None
    p_shape: Optional[str] = None
    shape_param: Optional[float] = None
    normalize: bool = False
    alpha: Optional[float] = None
    t: Optional[float] = None
    delta: Optional[float] = None
    method: Method = "best"
    estimator: Estimator = "tail"
    moments: Tuple[int, ...] = ()
    centered: bool = False
    m: Optional[int] = None
    seed: int = 0
    threads: int = 1
    unrestricted_t: bool = False
    properties: Tuple[str, ...] = ()
    cap: int = 10**7
    constants: Dict[str, float] = {}
    fmt: OutputFormat = "json"
    output: Optional[str] = None

    @validator("n")
    def check_n(cls, value):
        """n >= 1 when given."""
        if value is not None and value < 1:
            raise ValueError("--n must be >= 1")
        return value

    @validator("k")
    def check_k(cls, value):
        """k >= 2 when given."""
        if value is not None and value < 2:
            raise ValueError("--k must be >= 2")
        return value

    @validator("seed")
    def check_seed(cls, value):
        """--seed is a 64-bit unsigned integer."""
        if not 0 <= value <= MAX_SEED:
            raise ValueError(f"--seed must lie in [0, 2**64 - 1], got {value}")
        return value

    @validator("threads", "cap")
    def check_positive(cls, value, field):
        """Worker counts and caps are positive."""
        if value < 1:
            raise ValueError(f"--{field.name} must be >= 1")
        return value

    @validator("moments")
    def check_moments(cls, value):
        """Moment orders are >= 1."""
        if any(order < 1 for order in value):
            raise ValueError("--moment orders must be >= 1")
        return value

    @root_validator(skip_on_failure=True)
    def check_instance(cls, values):
        """p and --p-shape are exclusive, and each subcommand gets the flags it requires."""
        p, p_shape, k = values.get("p"), values.get("p_shape"), values.get("k")
        if p is not None and p_shape is not None:
            raise ValueError("--p and --p-shape are mutually exclusive")
        if p_shape is not None and k is None:
            raise ValueError("--p-shape requires --k")
        if p is not None:
            if k is not None and k != len(p):
                raise ValueError(f"--k {k} does not match the {len(p)} entries of --p")
            values["k"] = len(p)

        subcommand = values["subcommand"]
        required = {
            "exact": ("n",),
            "bound": ("n", "k", "t"),
            "mc": ("n", "m"),
            "threshold": ("n", "k", "delta"),
            "verify": (),
        }[subcommand]
        for name in required:
            if values.get(name) is None:
                raise ValueError(f"{subcommand} requires --{name}")
        if subcommand in ("exact", "mc") and p is None and p_shape is None:
            raise ValueError(f"{subcommand} requires --p or --p-shape")
        if subcommand == "mc":
            estimator = values["estimator"]
            if estimator in ("tail", "log_mgf") and values.get("t") is None:
                raise ValueError(f"--estimator {estimator} requires --t")
            if estimator == "moment" and not values.get("moments"):
                raise ValueError("--estimator moment requires --moment")
            if estimator == "coverage" and values.get("delta") is None:
                raise ValueError("--estimator coverage requires --delta")
            if values["m"] < 1:
                raise ValueError("--m must be >= 1")

        delta = values.get("delta")
        if delta is not None and not 0.0 < delta <= 1.0:
            raise ValueError("--delta must lie in (0, 1]")
        alpha = values.get("alpha")
        if alpha is not None and k is not None and not 0.0 <= alpha <= 1.0 / values["k"]:
            raise ValueError(f"--alpha must lie in [0, 1/k] = [0, {1.0 / values['k']}]")
        return values

    def distribution(self) -> Optional[Distribution]:
        """The instance distribution, or None when neither --p nor --p-shape was given."""
        if self.p is not None:
            return Distribution.from_weights(self.p) if self.normalize else Distribution(probs=self.p)
        if self.p_shape is not None:
            return ShapeSpec(name=self.p_shape, param=self.shape_param).build(self.k)
        return None

    def resolved_alpha(self) -> Optional[float]:
        """--alpha if given, otherwise min p of the instance distribution."""
        if self.alpha is not None:
            return self.alpha
        distribution = self.distribution()
        return None if distribution is None else distribution.alpha

    def constants_config(self) -> ConstantsConfig:
        """Defaults, then KLCONC_CONSTANTS, then --constant overrides."""
        return ConstantsConfig.from_env().with_overrides(self.constants)
