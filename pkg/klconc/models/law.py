"""The exact law of Z as a finite list of atoms."""
# pylint: disable=no-self-argument
import json
from typing import Any, Dict

import numpy as np
from pydantic import root_validator, validator
from scipy.special import logsumexp

from .abstract import KLConcBaseModel
from .distribution import Distribution

NORMALIZATION_TOLERANCE = 1e-10
# Merged atoms are more than this far apart.
MERGE_TOLERANCE = 1e-12


def _frozen_array(value) -> np.ndarray:
    array = np.array(value, dtype=float).ravel()
    array.setflags(write=False)
    return array


class ExactLaw(KLConcBaseModel):
    """Atoms (z, log_prob) of the exact distribution of Z_{n,k,p}, sorted ascending by z.

    `p` is the distribution the law was enumerated for, before any zero-mass symbols were dropped.
    """

    n: int
    p: Distribution
    z: np.ndarray
    log_prob: np.ndarray
    merged: bool = True

    @validator("z", "log_prob", pre=True)
    def freeze_arrays(cls, value):
        """Store atoms as read-only float64 arrays."""
        return _frozen_array(value)

    @validator("n")
    def check_n(cls, value):
        """n >= 1."""
        if value < 1:
            raise ValueError(f"n must be >= 1, got {value}")
        return value

    @root_validator(skip_on_failure=True)
    def check_atoms(cls, values):
        """Atoms are nonempty, aligned, sorted, nonnegative and normalized."""
        z, log_prob = values["z"], values["log_prob"]
        if z.shape != log_prob.shape or z.size == 0:
            raise ValueError("z and log_prob must be nonempty and of equal length")
        if np.any(z < 0):
            raise ValueError("z values must be nonnegative")
        gaps = np.diff(z)
        if np.any(gaps < 0):
            raise ValueError("atoms must be sorted ascending by z")
        if values.get("merged") and np.any(gaps <= MERGE_TOLERANCE):
            raise ValueError(f"merged atoms must be more than {MERGE_TOLERANCE} apart in z")
        total = float(np.exp(logsumexp(log_prob)))
        if abs(total - 1.0) > NORMALIZATION_TOLERANCE:
            raise ValueError(f"atom probabilities sum to {total!r}, not 1")
        return values

    @property
    def k(self) -> int:
        """Alphabet size of the underlying distribution."""
        return self.p.k

    @property
    def probs(self) -> np.ndarray:
        """Atom probabilities."""
        return np.exp(self.log_prob)

    def __len__(self):
        """Number of atoms."""
        return int(self.z.size)

    def to_dict(self) -> Dict[str, Any]:
        """{"n": ..., "p": [...], "atoms": [{"z": ..., "log_prob": ...}, ...]}."""
        return {
            "n": self.n,
            "p": list(self.p.probs),
            "atoms": [{"z": float(z), "log_prob": float(lp)} for z, lp in zip(self.z, self.log_prob)],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any], merged: bool = True) -> "ExactLaw":
        """Rebuild a law from its `to_dict()` form."""
        atoms = data["atoms"]
        return cls(
            n=data["n"],
            p=Distribution(probs=data["p"]),
            z=[float(atom["z"]) for atom in atoms],
            log_prob=[float(atom["log_prob"]) for atom in atoms],
            merged=merged,
        )

    @classmethod
    def from_json(cls, text: str) -> "ExactLaw":
        """Parse the canonical JSON form."""
        return cls.from_dict(json.loads(text))
