"""Sub-Gamma parameters, named constants and bound reports."""
# pylint: disable=no-self-argument
import json
import math
import os
from typing import Any, Dict, Mapping, Optional, Tuple

import structlog
from pydantic import root_validator, validator

from .abstract import KLConcBaseModel

logger = structlog.get_logger()

CONSTANTS_ENV_VAR = "KLCONC_CONSTANTS"

BOUND_CSV_HEADER = (
    "n",
    "k",
    "alpha",
    "t",
    "sanov",
    "agrawal",
    "agrawal_applicable",
    "main_rho",
    "best_name",
    "best_value",
)


class SubGammaParams(KLConcBaseModel):
    """Variance factor and scale of a sub-Gamma envelope psi(t) <= nu t^2 / (2 (1 - c t)), |t| < 1/c."""

    nu: float
    c: float

    @validator("nu", "c")
    def check_finite_nonnegative(cls, value, field):
        """Both parameters are finite and >= 0."""
        if not math.isfinite(value) or value < 0:
            raise ValueError(f"{field.name} must be finite and nonnegative, got {value}")
        return value

    def envelope(self, t: float) -> float:
        """The log-MGF envelope at t, or inf outside |t| < 1/c."""
        if self.c > 0 and abs(t) * self.c >= 1.0:
            return math.inf
        return self.nu * t * t / (2.0 * (1.0 - self.c * abs(t)))


class ConstantsConfig(KLConcBaseModel):
    """Every named constant used by the bounds.

    C_main and c_main are composed from the lemma constants whenever they are not given explicitly:
    c_main = max(3 c2, 6 cg, 6 cg'), C_main = max(3 C2 + 288 Cg, 3 C2 + 36 Cg').
    Cg' and cg' have no published numeric value; they default to Cg and cg.
    """

    C2: float = 14400.0
    c2: float = 240.0
    Cg: float = 1536.0 * 2048.0
    cg: float = 288.0
    Cg_prime: Optional[float] = None
    cg_prime: Optional[float] = None
    C_main: Optional[float] = None
    c_main: Optional[float] = None
    C_agrawal_delta: float = 400.0
    C_mardia: float = 1.0
    C_moment: float = 1.0

    @root_validator(skip_on_failure=True)
    def compose_main_constants(cls, values):
        """Fill in Cg', cg', C_main and c_main, then require every constant to be finite and >= 0."""
        if values.get("Cg_prime") is None:
            values["Cg_prime"] = values["Cg"]
        if values.get("cg_prime") is None:
            values["cg_prime"] = values["cg"]
        if values.get("c_main") is None:
            values["c_main"] = max(3 * values["c2"], 6 * values["cg"], 6 * values["cg_prime"])
        if values.get("C_main") is None:
            values["C_main"] = max(3 * values["C2"] + 288 * values["Cg"], 3 * values["C2"] + 36 * values["Cg_prime"])
        for name, value in values.items():
            if not math.isfinite(value) or value < 0:
                raise ValueError(f"constant {name} must be finite and nonnegative, got {value}")
        return values

    @property
    def cg_prime_is_policy(self) -> bool:
        """True when Cg' was not supplied and carries the Cg default."""
        return "Cg_prime" not in self.__fields_set__

    def with_overrides(self, overrides: Mapping[str, Any]) -> "ConstantsConfig":
        """Return a new config with `overrides` applied; derived constants are recomposed unless given."""
        unknown = set(overrides) - set(self.__fields__)
        if unknown:
            raise ValueError(f"unknown constant(s): {', '.join(sorted(unknown))}")
        data = self.dict(exclude_unset=True)
        data.update({name: float(value) for name, value in overrides.items()})
        return ConstantsConfig(**data)

    @classmethod
    def from_file(cls, path: str) -> "ConstantsConfig":
        """Load a JSON object holding any subset of the fields."""
        with open(path, "r", encoding="utf-8") as handle:
            data = json.load(handle)
        if not isinstance(data, dict):
            raise ValueError(f"{path} must hold a JSON object")
        logger.debug("Loaded constants overrides", path=path, overrides=data)
        return cls(**data)

    @classmethod
    def from_env(cls, environ: Optional[Mapping[str, str]] = None) -> "ConstantsConfig":
        """Defaults, overridden by the file named in KLCONC_CONSTANTS if it is set."""
        environ = os.environ if environ is None else environ
        path = environ.get(CONSTANTS_ENV_VAR)
        if not path:
            return cls()
        return cls.from_file(path)


class BoundEntry(KLConcBaseModel):
    """One tail bound evaluated at a threshold."""

    name: str
    value: float
    applicable: bool
    reason: Optional[str] = None

    @property
    def clamped(self) -> float:
        """The value as a probability, i.e. capped at 1."""
        return min(self.value, 1.0)


class BoundReport(KLConcBaseModel):
    """Every tail bound at one threshold, with the best applicable one."""

    n: int
    k: int
    alpha: float
    t: float
    entries: Tuple[BoundEntry, ...]
    best_name: str
    best_value: float
    notes: Tuple[str, ...] = ()

    def entry(self, name: str) -> BoundEntry:
        """Look up an entry by bound name."""
        for item in self.entries:
            if item.name == name:
                return item
        raise KeyError(name)

    def to_dict(self) -> Dict[str, Any]:
        """Full report including raw and clamped values."""
        return {
            "n": self.n,
            "k": self.k,
            "alpha": self.alpha,
            "t": self.t,
            "entries": [
                {
                    "name": item.name,
                    "value": item.value,
                    "clamped": item.clamped,
                    "applicable": item.applicable,
                    "reason": item.reason,
                }
                for item in self.entries
            ],
            "best": {"name": self.best_name, "value": self.best_value},
            "notes": list(self.notes),
        }

    def csv_row(self) -> Dict[str, Any]:
        """The flat row written by the CSV output format."""
        agrawal = self.entry("agrawal")
        main = self.entry("main")
        return {
            "n": self.n,
            "k": self.k,
            "alpha": self.alpha,
            "t": self.t,
            "sanov": self.entry("sanov").value,
            "agrawal": agrawal.value if agrawal.applicable else None,
            "agrawal_applicable": agrawal.applicable,
            "main_rho": main.value if main.applicable else None,
            "best_name": self.best_name,
            "best_value": self.best_value,
        }
