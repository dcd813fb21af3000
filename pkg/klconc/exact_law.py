"""Exact law of Z by enumeration of the multinomial support.

This is the oracle everything else is checked against: it either returns the law exactly or refuses with
SupportCapExceeded.
"""
import math
from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache
from typing import Iterator, List, Tuple

import numpy as np
import structlog
from scipy.special import gammaln, logsumexp, xlogy

from klconc.exceptions import DomainError, SupportCapExceeded
from klconc.models import Distribution, ExactLaw
from klconc.models.law import MERGE_TOLERANCE
from klconc.utils import ProgressBar

logger = structlog.get_logger()

DEFAULT_CAP = 10**7


def support_size(n: int, k: int) -> int:
    """Number of compositions of n into k nonnegative parts, C(n+k-1, k-1)."""
    return math.comb(n + k - 1, k - 1)


def _prefixes(total: int, depth: int) -> Iterator[List[int]]:
    """Lexicographic odometer over nonnegative integer vectors of length `depth` with sum <= total."""
    prefix = [0] * depth
    used = 0
    while True:
        yield prefix
        i = depth - 1
        while i >= 0:
            if used < total:
                prefix[i] += 1
                used += 1
                break
            used -= prefix[i]
            prefix[i] = 0
            i -= 1
        else:
            return


class _Tables:  # pylint: disable=too-few-public-methods
    """Per-symbol lookup tables over x = 0..n.

    z_terms[i][x] = x log(x / (n p_i)) and log_terms[i][x] = x log p_i - log x!, so that for a composition x,
    Z = 2 sum_i z_terms[i][x_i] and log P(x) = log n! + sum_i log_terms[i][x_i].
    """

    def __init__(self, n: int, probs: np.ndarray):
        x = np.arange(n + 1, dtype=float)
        self.n = n
        self.log_n_factorial = float(gammaln(n + 1.0))
        self.z_terms = [xlogy(x, x) - xlogy(x, n * mass) for mass in probs]
        self.log_terms = [xlogy(x, mass) - gammaln(x + 1.0) for mass in probs]

    def block(self, head: List[int]) -> Tuple[np.ndarray, np.ndarray]:
        """Z values and log-probabilities of every composition starting with `head`.

        The last two symbols vary jointly over all splits of what `head` leaves.
        """
        depth = len(head)
        rest = self.n - sum(head)
        z_head = sum(self.z_terms[i][x] for i, x in enumerate(head))
        log_head = self.log_n_factorial + sum(self.log_terms[i][x] for i, x in enumerate(head))
        first = np.arange(rest + 1)
        second = rest - first
        z = 2.0 * (z_head + self.z_terms[depth][first] + self.z_terms[depth + 1][second])
        log_prob = log_head + self.log_terms[depth][first] + self.log_terms[depth + 1][second]
        return z, log_prob


def _enumerate_slice(tables: _Tables, first_symbol: int, depth: int) -> Tuple[np.ndarray, np.ndarray]:
    """All compositions whose first symbol equals `first_symbol` (depth >= 1), in lexicographic order."""
    z_parts, log_parts = [], []
    for tail in _prefixes(tables.n - first_symbol, depth - 1):
        z, log_prob = tables.block([first_symbol] + tail)
        z_parts.append(z)
        log_parts.append(log_prob)
    return np.concatenate(z_parts), np.concatenate(log_parts)


def _merge(z: np.ndarray, log_prob: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Sort atoms by z and merge runs whose consecutive gaps are <= MERGE_TOLERANCE.

    Each run is represented by its smallest z; its probabilities are combined with log-sum-exp.
    """
    order = np.argsort(z, kind="stable")
    z, log_prob = z[order], log_prob[order]
    starts = np.flatnonzero(np.concatenate(([True], np.diff(z) > MERGE_TOLERANCE)))
    return z[starts], np.logaddexp.reduceat(log_prob, starts)


def enumerate_law(
    n: int, p: Distribution, outcome_cap: int = DEFAULT_CAP, threads: int = 1, verbosity: int = 0
) -> ExactLaw:
    """Enumerate every outcome of Multinomial(n, p) and return the exact law of Z.

    Symbols with p_i = 0 are dropped first, so no outcome has infinite Z. The work is split by the count of the
    first symbol; slices are concatenated in a fixed order, so the result does not depend on `threads`.
    """
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    probs = p.array[p.array > 0]
    k = probs.size
    size = support_size(n, k)
    if size > outcome_cap:
        logger.warning("Refusing to enumerate", n=n, k=k, support_size=size, cap=outcome_cap)
        raise SupportCapExceeded(size, outcome_cap)
    logger.debug("Enumerating law", n=n, k=k, support_size=size)

    if k == 1:
        return ExactLaw(n=n, p=p, z=[0.0], log_prob=[0.0])

    tables = _Tables(n, probs)
    depth = k - 2
    if depth == 0:
        z, log_prob = tables.block([])
    else:
        with ProgressBar(total=n + 1, desc="enumerate", unit="slice", verbosity=verbosity) as progress:
            with ThreadPoolExecutor(max_workers=threads) as executor:
                slices = []
                for part in executor.map(lambda head: _enumerate_slice(tables, head, depth), range(n + 1)):
                    slices.append(part)
                    progress.update(1)
        z = np.concatenate([part[0] for part in slices])
        log_prob = np.concatenate([part[1] for part in slices])

    z, log_prob = _merge(np.maximum(z, 0.0), log_prob)
    logger.debug("Enumerated law", n=n, k=k, support_size=size, atoms=int(z.size))
    return ExactLaw(n=n, p=p, z=z, log_prob=log_prob, merged=True)


@lru_cache(maxsize=1024)
def cached_law(n: int, p: Distribution, outcome_cap: int = DEFAULT_CAP) -> ExactLaw:
    """Memoized enumerate_law, for sweeps that revisit the same (n, p)."""
    return enumerate_law(n, p, outcome_cap)


def law_mean(law: ExactLaw) -> float:
    """E[Z]."""
    return float(np.sum(law.probs * law.z))


def law_moment(law: ExactLaw, m: int, centered: bool = False) -> float:
    """E[Z^m], or E[(Z - E[Z])^m] when `centered`."""
    if m < 1:
        raise DomainError(f"m must be >= 1, got {m}")
    probs = law.probs
    values = law.z - law_mean(law) if centered else law.z
    return float(np.sum(probs * values**m))


def law_variance(law: ExactLaw) -> float:
    """Var[Z]."""
    return law_moment(law, 2, centered=True)


def law_norm(law: ExactLaw, m: int) -> float:
    """The L^m norm E[Z^m]^(1/m), accumulated in log space."""
    if m < 1:
        raise DomainError(f"m must be >= 1, got {m}")
    positive = law.z > 0
    if not np.any(positive):
        return 0.0
    log_moment = logsumexp(law.log_prob[positive] + m * np.log(law.z[positive]))
    return float(np.exp(log_moment / m))


def law_tail(law: ExactLaw, t: float) -> float:
    """P(Z >= t), closed inequality."""
    if t <= 0:
        return 1.0
    index = int(np.searchsorted(law.z, t, side="left"))
    if index >= len(law):
        return 0.0
    return min(1.0, float(np.exp(logsumexp(law.log_prob[index:]))))


def law_log_mgf(law: ExactLaw, t: float, centered: bool = False) -> float:
    """log E[exp(t Z)], or log E[exp(t (Z - E[Z]))] when `centered`."""
    if t == 0:
        return 0.0
    shift = law_mean(law) if centered else 0.0
    return float(logsumexp(law.log_prob + t * (law.z - shift)))


def law_coverage(law: ExactLaw, center: float, eps: float) -> float:
    """P(|Z - center| <= eps)."""
    inside = np.abs(law.z - center) <= eps
    if not np.any(inside):
        return 0.0
    return min(1.0, float(np.exp(logsumexp(law.log_prob[inside]))))
