"""Numerically stable scalar kernels for the multinomial KL statistic.

All binomial masses are evaluated in log space and only exponentiated for the final weighted sum; sums over
alphabets and binomial supports use numpy's pairwise summation.
"""
import math
from functools import lru_cache
from typing import Optional, Tuple, Union

import numpy as np
import structlog
from scipy.special import gammaln, xlog1py, xlogy
from scipy.stats import binom

from klconc.exceptions import DomainError, InfiniteDivergenceError, NumericOverflowError
from klconc.models import Counts, Distribution

logger = structlog.get_logger()

ProbsLike = Union[Distribution, np.ndarray, Tuple[float, ...]]

# Above this n, bernstein_phi drops the binomial quantiles below TRUNCATION_TAIL on either side.
# The dropped mass stays under 1e-12 even after g_func scales it by n.
FULL_SUM_MAX_N = 10**6
TRUNCATION_TAIL = 1e-20
LOG_FLOAT_MAX = math.log(np.finfo(float).max)


def _as_probs(p: ProbsLike) -> np.ndarray:
    if isinstance(p, Distribution):
        return p.array
    return np.asarray(p, dtype=float)


def _check_unit_interval(name: str, value: float):
    if not 0.0 <= value <= 1.0:
        raise DomainError(f"{name} must lie in [0, 1], got {value}")


def phi(x: float) -> float:
    """x log(1/x) in nats, with phi(0) = phi(1) = 0."""
    _check_unit_interval("x", x)
    if x in (0.0, 1.0):
        return 0.0
    return float(-xlogy(x, x))


def binary_kl(p: float, q: float) -> float:
    """Binary divergence d(p || q) = p log(p/q) + (1-p) log((1-p)/(1-q)), with 0 log 0 = 0."""
    _check_unit_interval("p", p)
    if not 0.0 < q < 1.0:
        raise DomainError(f"q must lie in (0, 1), got {q}")
    value = xlogy(p, p) - xlogy(p, q) + xlog1py(1.0 - p, -p) - xlog1py(1.0 - p, -q)
    return max(0.0, float(value))


def kl_divergence(p_hat: ProbsLike, p: ProbsLike, strict: bool = False) -> float:
    """D(p_hat || p) in nats.

    Coordinates with p_hat_i = 0 contribute nothing. If p_hat_i > 0 where p_i = 0 the divergence is infinite:
    `math.inf` is returned, or InfiniteDivergenceError raised when `strict` is set.
    """
    p_hat, p = _as_probs(p_hat), _as_probs(p)
    if p_hat.shape != p.shape:
        raise DomainError(f"length mismatch: {p_hat.size} frequencies against {p.size} probabilities")
    if np.any(p_hat < 0) or abs(math.fsum(p_hat) - 1.0) > 1e-9:
        raise DomainError("p_hat must be a probability vector")
    support = p_hat > 0
    blocked = np.flatnonzero(support & (p == 0))
    if blocked.size:
        if strict:
            raise InfiniteDivergenceError(int(blocked[0]))
        return math.inf
    terms = p_hat[support] * np.log(p_hat[support] / p[support])
    return max(0.0, float(np.sum(terms)))


def _count_terms(counts: np.ndarray, expected: np.ndarray) -> float:
    """Sum of x log(x / e) over x > 0; inf if some x > 0 has e = 0."""
    support = counts > 0
    if np.any(expected[support] == 0):
        return math.inf
    return float(np.sum(counts[support] * np.log(counts[support] / expected[support])))


def z_statistic(x: Counts, p: ProbsLike, strict: bool = False) -> float:
    """Z = 2n D(p_hat || p), computed directly from the counts as 2 sum X_i log(X_i / (n p_i))."""
    probs = _as_probs(p)
    if x.k != probs.size:
        raise DomainError(f"length mismatch: {x.k} counts against {probs.size} probabilities")
    counts = x.array
    blocked = np.flatnonzero((counts > 0) & (probs == 0))
    if blocked.size:
        if strict:
            raise InfiniteDivergenceError(int(blocked[0]))
        return math.inf
    return max(0.0, 2.0 * _count_terms(counts, x.n * probs))


def reduced_distribution(p: ProbsLike) -> np.ndarray:
    """The conditional distribution (p_1, ..., p_{k-1}) / (1 - p_k) of the first k-1 symbols."""
    probs = _as_probs(p)
    if probs[-1] >= 1.0:
        raise DomainError("p_k must be < 1 to condition on the other symbols")
    return probs[:-1] / (1.0 - probs[-1])


def conditional_counts(x: Counts) -> np.ndarray:
    """Counts of the first k-1 symbols (they sum to n - X_k)."""
    return x.array[:-1]


def chain_decompose(x: Counts, p: ProbsLike) -> Tuple[float, float]:
    """Split Z into the binary part for symbol k and the conditional part over the remaining k-1 symbols.

    binary_part = 2n d(p_hat_k || p_k) and conditional_part = 2n (1 - p_hat_k) D(p_hat' || p'), where the primed
    quantities are conditioned on not observing symbol k. The conditional part is 0 when X_k = n.
    """
    probs = _as_probs(p)
    if x.k < 3:
        raise DomainError(f"chain_decompose needs k >= 3, got k = {x.k}")
    if x.k != probs.size:
        raise DomainError(f"length mismatch: {x.k} counts against {probs.size} probabilities")
    p_k = probs[-1]
    reduced = reduced_distribution(probs)
    n, x_k = x.n, x.counts[-1]
    binary_part = 2.0 * _count_terms(np.array([x_k, n - x_k], dtype=float), np.array([n * p_k, n * (1.0 - p_k)]))
    rest = n - x_k
    if rest == 0:
        return binary_part, 0.0
    conditional_part = 2.0 * _count_terms(conditional_counts(x), rest * reduced)
    return binary_part, conditional_part


def binomial_log_pmf(n: int, x: float, j: Optional[np.ndarray] = None) -> np.ndarray:
    """log P(J = j) for J ~ Bin(n, x), for j = 0..n unless `j` is given; exact -inf where the mass is 0."""
    if j is None:
        j = np.arange(n + 1, dtype=float)
    j = np.asarray(j, dtype=float)
    return gammaln(n + 1.0) - gammaln(j + 1.0) - gammaln(n - j + 1.0) + xlogy(j, x) + xlog1py(n - j, -x)


def bernstein_phi(n: int, x: float) -> float:
    """B_n(phi, x) = E[phi(J/n)] for J ~ Bin(n, x)."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    _check_unit_interval("x", x)
    if x in (0.0, 1.0):
        return 0.0
    if n > FULL_SUM_MAX_N:
        low = max(0, int(binom.ppf(TRUNCATION_TAIL, n, x)))
        high = min(n, int(binom.isf(TRUNCATION_TAIL, n, x)))
        j = np.arange(low, high + 1, dtype=float)
        logger.debug("Truncated Bernstein sum", n=n, x=x, low=low, high=high)
    else:
        j = np.arange(n + 1, dtype=float)
    freq = j / n
    values = -xlogy(freq, freq)
    return float(np.sum(np.exp(binomial_log_pmf(n, x, j)) * values))


@lru_cache(maxsize=65536)
def _g_cached(n: int, probs: Tuple[float, ...]) -> float:
    total = [n * (phi(mass) - bernstein_phi(n, mass)) for mass in probs if 0.0 < mass < 1.0]
    return float(np.sum(total)) if total else 0.0


def g_func(n: int, p: ProbsLike) -> float:
    """g(n) = n E[D(p_hat || p)] = sum_i n (phi(p_i) - B_n(phi, p_i)), with g(0) = 0."""
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    if n == 0:
        return 0.0
    return _g_cached(int(n), tuple(float(mass) for mass in _as_probs(p)))


def f_func(n: int, p: ProbsLike) -> float:
    """f(n) = E[D(p_hat || p)] = g(n) / n, with f(0) = 0."""
    if n == 0:
        return 0.0
    return g_func(n, p) / n


def _chi2_log_moment(df: int, m: int) -> float:
    if df < 1 or m < 0:
        raise DomainError(f"need df >= 1 and m >= 0, got df={df}, m={m}")
    return m * math.log(2.0) + float(gammaln(m + df / 2.0) - gammaln(df / 2.0))


def chi2_raw_moment(df: int, m: int) -> float:
    """E[(chi2_df)^m] = 2^m Gamma(m + df/2) / Gamma(df/2), which for integer m is prod_{j<m} (df + 2j)."""
    if _chi2_log_moment(df, m) > LOG_FLOAT_MAX:
        raise NumericOverflowError(f"E[chi2_{df}^{m}] exceeds the floating-point range")
    return float(math.prod(range(df, df + 2 * m, 2)))


def chi2_moment_norm(df: int, m: int) -> float:
    """The L^m norm E[(chi2_df)^m]^(1/m), evaluated in log space so it never overflows."""
    if m < 1:
        raise DomainError(f"m must be >= 1, got {m}")
    return math.exp(_chi2_log_moment(df, m) / m)
