"""Seeded, reproducible Monte Carlo estimates for instances too large to enumerate.

Draws come in fixed-size blocks. Block b always uses the Philox stream keyed by (seed, b), and blocks are
concatenated in block order, so every estimate is bit-identical whatever the number of worker threads.
"""
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Optional

import numpy as np
import structlog
from scipy.special import logsumexp, xlogy

from klconc.bounds import main_theorem_params, main_theorem_subgamma, subgamma_tail_eps
from klconc.core_math import LOG_FLOAT_MAX, g_func
from klconc.exceptions import DomainError, NumericOverflowError
from klconc.models import ConstantsConfig, Distribution, McEstimate, SubGammaParams
from klconc.models.estimates import MAX_SEED
from klconc.utils import ProgressBar

logger = structlog.get_logger()

BLOCK_SIZE = 4096
MIN_MGF_SAMPLES = 100


def block_generator(seed: int, block: int) -> np.random.Generator:
    """The counter-based generator owning block `block` of stream `seed`."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(block,))))


def _block_sizes(m: int, block_size: int):
    full, remainder = divmod(m, block_size)
    return [block_size] * full + ([remainder] if remainder else [])


def _run_blocks(work, m: int, threads: int, verbosity: int, block_size: int):
    sizes = _block_sizes(m, block_size)
    results = []
    with ProgressBar(total=len(sizes), desc="sample", unit="block", verbosity=verbosity) as progress:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            for result in executor.map(work, range(len(sizes)), sizes):
                results.append(result)
                progress.update(1)
    return np.concatenate(results)


def _check_samples(m: int):
    if m < 1:
        raise DomainError(f"m must be >= 1, got {m}")


def _check_seed(seed: int):
    if not 0 <= seed <= MAX_SEED:
        raise DomainError(f"seed must lie in [0, 2**64 - 1], got {seed}")


def sample_counts(
    n: int, p: Distribution, m: int, seed: int, threads: int = 1, verbosity: int = 0, block_size: int = BLOCK_SIZE
) -> np.ndarray:
    """m draws of Multinomial(n, p) as an (m, k) integer array."""
    _check_samples(m)
    _check_seed(seed)
    probs = p.array

    def work(block, size):
        return block_generator(seed, block).multinomial(n, probs, size=size)

    return _run_blocks(work, m, threads, verbosity, block_size)


def statistic_from_counts(counts: np.ndarray, p: Distribution) -> np.ndarray:
    """Z for each row of an (m, k) count array."""
    counts = np.asarray(counts, dtype=float)
    n = counts.sum(axis=1, keepdims=True)
    z = 2.0 * np.sum(xlogy(counts, counts) - xlogy(counts, n * p.array), axis=1)
    return np.maximum(z, 0.0)


def sample_statistic(
    n: int, p: Distribution, m: int, seed: int, threads: int = 1, verbosity: int = 0, block_size: int = BLOCK_SIZE
) -> np.ndarray:
    """m independent draws of Z_{n,k,p}; block b is drawn from the stream keyed by (seed, b)."""
    _check_samples(m)
    _check_seed(seed)
    probs = p.array

    def work(block, size):
        return statistic_from_counts(block_generator(seed, block).multinomial(n, probs, size=size), p)

    z = _run_blocks(work, m, threads, verbosity, block_size)
    logger.debug("Sampled statistic", n=n, k=p.k, samples=m, seed=seed, threads=threads)
    return z


def _draws(n, p, m, seed, threads, samples) -> np.ndarray:
    if samples is not None:
        return np.asarray(samples, dtype=float)
    return sample_statistic(n, p, m, seed, threads)


def _binomial_estimate(hits: np.ndarray, seed: int) -> McEstimate:
    m = hits.size
    fraction = float(np.mean(hits))
    return McEstimate(
        estimate=fraction, std_error=math.sqrt(max(fraction * (1.0 - fraction), 0.0) / m), samples=m, seed=seed
    )


def mc_tail(
    n: int, p: Distribution, t: float, m: int, seed: int, threads: int = 1, samples: Optional[np.ndarray] = None
) -> McEstimate:
    """Fraction of draws with Z >= t, with the binomial standard error."""
    z = _draws(n, p, m, seed, threads, samples)
    return _binomial_estimate(z >= t, seed)


def mc_moment(
    n: int,
    p: Distribution,
    q: int,
    centered: bool,
    m: int,
    seed: int,
    threads: int = 1,
    samples: Optional[np.ndarray] = None,
) -> McEstimate:
    """Sample mean of Z^q, or of (Z - E[Z])^q centered at the exact mean 2 g(n, p)."""
    if q < 1:
        raise DomainError(f"q must be >= 1, got {q}")
    z = _draws(n, p, m, seed, threads, samples)
    if centered and z.size < 2:
        raise DomainError("a centered moment needs at least 2 samples")
    values = (z - 2.0 * g_func(n, p)) ** q if centered else z**q
    std_error = float(np.std(values, ddof=1) / math.sqrt(values.size)) if values.size > 1 else 0.0
    return McEstimate(estimate=float(np.mean(values)), std_error=std_error, samples=int(values.size), seed=seed)


def mgf_regime(k: int, alpha: float, cfg: Optional[ConstantsConfig] = None) -> float:
    """The largest |t| the main envelope speaks about, 1 / (2 c_main)."""
    _, c = main_theorem_params(k, alpha, cfg)
    return math.inf if c == 0 else 1.0 / (2.0 * c)


def mc_log_mgf(  # pylint: disable=too-many-arguments
    n: int,
    p: Distribution,
    t: float,
    m: int,
    seed: int,
    threads: int = 1,
    samples: Optional[np.ndarray] = None,
    cfg: Optional[ConstantsConfig] = None,
    enforce_regime: bool = True,
) -> McEstimate:
    """log of the sample mean of exp(t (Z - 2 g(n, p))), with a delta-method standard error.

    The estimate is biased by O(1/m). By default |t| must not exceed 1 / (2 c_main); pass enforce_regime=False
    to estimate outside the regime of the main envelope.
    """
    if enforce_regime:
        limit = mgf_regime(p.k, p.alpha, cfg)
        if abs(t) > limit:
            raise DomainError(f"|t| = {abs(t)} exceeds 1/(2 c_main) = {limit}; pass enforce_regime=False to override")
    z = _draws(n, p, m, seed, threads, samples)
    if z.size < MIN_MGF_SAMPLES:
        raise DomainError(f"the log-MGF estimator needs at least {MIN_MGF_SAMPLES} samples, got {z.size}")
    if t == 0:
        return McEstimate(estimate=0.0, std_error=0.0, samples=int(z.size), seed=seed)
    exponents = t * (z - 2.0 * g_func(n, p))
    peak = float(np.max(exponents))
    if not math.isfinite(peak) or peak > LOG_FLOAT_MAX:
        raise NumericOverflowError(f"exp(t (Z - E[Z])) overflows at t = {t}")
    estimate = float(logsumexp(exponents) - math.log(z.size))
    scaled = np.exp(exponents - peak)
    std_error = float(np.std(scaled, ddof=1) / (math.sqrt(z.size) * np.mean(scaled)))
    return McEstimate(estimate=estimate, std_error=std_error, samples=int(z.size), seed=seed)


def mc_coverage(  # pylint: disable=too-many-arguments
    n: int,
    p: Distribution,
    delta: float,
    m: int,
    seed: int,
    params: Optional[SubGammaParams] = None,
    threads: int = 1,
    samples: Optional[np.ndarray] = None,
    cfg: Optional[ConstantsConfig] = None,
) -> McEstimate:
    """Frequency of |Z - 2 g(n, p)| <= subgamma_tail_eps(params, delta); params default to the main envelope."""
    if not 0.0 < delta < 1.0:
        raise DomainError(f"delta must lie in (0, 1), got {delta}")
    if params is None:
        params = main_theorem_subgamma(p.k, p.alpha, cfg)
    eps = subgamma_tail_eps(params, delta)
    z = _draws(n, p, m, seed, threads, samples)
    return _binomial_estimate(np.abs(z - 2.0 * g_func(n, p)) <= eps, seed)
