"""Closed-form concentration bounds for Z and the test-threshold solver.

Tail bounds return raw values (Sanov can exceed 1); BoundReport keeps both the raw and the clamped view.
Every bound with an unspecified leading constant takes it from ConstantsConfig.
"""
import math
from typing import NamedTuple, Optional, Tuple

import numpy as np
import structlog
from scipy.optimize import bisect
from scipy.special import gammaln

from klconc.core_math import LOG_FLOAT_MAX, ProbsLike, g_func
from klconc.exceptions import BoundNotApplicable, DomainError, NoSolutionError, NumericOverflowError
from klconc.models import BoundEntry, BoundReport, ConstantsConfig, SubGammaParams

logger = structlog.get_logger()

METHODS = ("sanov", "agrawal", "main")
ALPHA_TOLERANCE = 1e-12
SOLVER_XTOL = 1e-8
SOLVER_RTOL = 4 * np.finfo(float).eps
SOLVER_MAXITER = 200
BRACKET_DOUBLINGS = 64


def _constants(cfg: Optional[ConstantsConfig]) -> ConstantsConfig:
    return ConstantsConfig() if cfg is None else cfg


def _check_nk(n: int, k: int):
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    if k < 2:
        raise DomainError(f"k must be >= 2, got {k}")


def _check_alpha(k: int, alpha: float):
    if alpha is None or not 0.0 < alpha <= 1.0 / k + ALPHA_TOLERANCE:
        raise DomainError(f"alpha must lie in (0, 1/k] = (0, {1.0 / k}], got {alpha}")


#
# Classic tails
#


def log_sanov_coefficient(n: int, k: int) -> float:
    """log C(n+k-1, k-1), the log of the number of types."""
    _check_nk(n, k)
    return math.log(math.comb(n + k - 1, k - 1))


def sanov_tail(n: int, k: int, t: float) -> float:
    """Method-of-types bound P(Z >= t) <= C(n+k-1, k-1) exp(-t/2)."""
    if t < 0:
        raise DomainError(f"t must be >= 0, got {t}")
    log_value = log_sanov_coefficient(n, k) - t / 2.0
    if log_value > LOG_FLOAT_MAX:
        return math.inf
    return math.exp(log_value)


def agrawal_tail(k: int, t: float) -> float:
    """P(Z >= t) <= (e t / (2(k-1)))^(k-1) exp(-t/2), for t >= 2(k-1); exactly 1 at the boundary."""
    if k < 2:
        raise DomainError(f"k must be >= 2, got {k}")
    boundary = 2.0 * (k - 1)
    if t < boundary:
        raise BoundNotApplicable("agrawal", f"t = {t} is below 2(k-1) = {boundary}")
    log_value = (k - 1) * (1.0 + math.log(t / boundary)) - t / 2.0
    return math.exp(log_value)


def agrawal_delta_bound(k: int, delta: float, cfg: Optional[ConstantsConfig] = None) -> float:
    """With probability at least 1 - delta, Z <= C (k + log(1/delta))."""
    if k < 2:
        raise DomainError(f"k must be >= 2, got {k}")
    if not 0.0 < delta <= 1.0:
        raise DomainError(f"delta must lie in (0, 1], got {delta}")
    return _constants(cfg).C_agrawal_delta * (k - math.log(delta))


def mardia_chebyshev(k: int, delta: float, cfg: Optional[ConstantsConfig] = None) -> float:
    """Chebyshev deviation Z - E[Z] <= C sqrt(k / delta), holding with probability at least 1 - delta."""
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    if not 0.0 < delta <= 1.0:
        raise DomainError(f"delta must lie in (0, 1], got {delta}")
    return _constants(cfg).C_mardia * math.sqrt(k / delta)


#
# Sub-Gamma toolkit
#


def subgamma_tail_eps(params: SubGammaParams, delta: float) -> float:
    """eps = sqrt(2 nu L) + c L with L = log(2/delta), so that P(|X| > eps) <= delta."""
    if not 0.0 < delta < 2.0:
        raise DomainError(f"delta must lie in (0, 2), got {delta}")
    level = math.log(2.0 / delta)
    return math.sqrt(2.0 * params.nu * level) + params.c * level


def subgamma_moment_bound(params: SubGammaParams, q: int) -> float:
    """E[X^(2q)] <= q! (8 nu)^q + (2q)! (4c)^(2q)."""
    if q < 1:
        raise DomainError(f"q must be >= 1, got {q}")
    logs = []
    if params.nu > 0:
        logs.append(float(gammaln(q + 1.0)) + q * math.log(8.0 * params.nu))
    if params.c > 0:
        logs.append(float(gammaln(2.0 * q + 1.0)) + 2 * q * math.log(4.0 * params.c))
    if any(value > LOG_FLOAT_MAX for value in logs):
        raise NumericOverflowError(f"sub-Gamma moment bound of order 2q = {2 * q} overflows")
    return sum(math.exp(value) for value in logs)


def _check_nonnegative(**values):
    for name, value in values.items():
        if value < 0:
            raise DomainError(f"{name} must be >= 0, got {value}")


def center_from_moments(A: float, B: float) -> SubGammaParams:  # pylint: disable=invalid-name
    """Raw moments E|X|^(2q) <= q! A^q + (2q)! B^(2q) give X - E[X] in Gamma(24A + 36B^2, 6B)."""
    _check_nonnegative(A=A, B=B)
    return SubGammaParams(nu=24.0 * A + 36.0 * B * B, c=6.0 * B)


def center_from_tails(A: float, B: float) -> SubGammaParams:  # pylint: disable=invalid-name
    """Tails P(|X| > sqrt(A s) + B s) <= 2 exp(-s) give X - E[X] in Gamma(1536A + 864B^2, 144B)."""
    _check_nonnegative(A=A, B=B)
    return SubGammaParams(nu=1536.0 * A + 864.0 * B * B, c=144.0 * B)


def chi2_centered_tail_eps(k: int, delta: float) -> float:
    """Reference half-width for chi2_{k-1} - (k-1), which lies in Gamma(2(k-1), 2)."""
    return subgamma_tail_eps(SubGammaParams(nu=2.0 * (k - 1), c=2.0), delta)


#
# Main theorem and corollaries
#


def main_theorem_params(k: int, alpha: float, cfg: Optional[ConstantsConfig] = None) -> Tuple[float, float]:
    """(v, c) with psi_{Z - E[Z]}(t) <= v t^2 for |t| <= 1/c: v = C_main k log^4(k/alpha), c = c_main."""
    if k < 2:
        raise DomainError(f"k must be >= 2, got {k}")
    _check_alpha(k, alpha)
    cfg = _constants(cfg)
    return cfg.C_main * k * math.log(k / alpha) ** 4, cfg.c_main


def main_theorem_subgamma(k: int, alpha: float, cfg: Optional[ConstantsConfig] = None) -> SubGammaParams:
    """The main envelope as sub-Gamma parameters (2v, c)."""
    v, c = main_theorem_params(k, alpha, cfg)
    return SubGammaParams(nu=2.0 * v, c=c)


def rho(eps: float, v: float, c: float) -> float:
    """Two-sided deviation bound 2 exp(-min(eps^2 / v, eps / c)); zero v or c is read as a vanishing term."""
    if eps < 0:
        raise DomainError(f"eps must be >= 0, got {eps}")
    if v < 0 or c < 0:
        raise DomainError("v and c must be nonnegative")
    if eps == 0:
        return 2.0
    quadratic = eps * eps / v if v > 0 else math.inf
    linear = eps / c if c > 0 else math.inf
    return 2.0 * math.exp(-min(quadratic, linear))


def confidence_interval_main(k: int, alpha: float, delta: float, cfg: Optional[ConstantsConfig] = None) -> float:
    """Half-width eps with rho(eps) = delta: |Z - E[Z]| <= eps with probability at least 1 - delta."""
    if not 0.0 < delta < 2.0:
        raise DomainError(f"delta must lie in (0, 2), got {delta}")
    v, c = main_theorem_params(k, alpha, cfg)
    level = math.log(2.0 / delta)
    return max(math.sqrt(v * level), c * level)


def centered_moment_from_params(v: float, c: float, m: int, constant: float = 1.0) -> float:
    """constant * (sqrt(m v) + m c)."""
    if m < 1:
        raise DomainError(f"m must be >= 1, got {m}")
    return constant * (math.sqrt(m * v) + m * c)


def centered_moment_bound_main(k: int, alpha: float, m: int, cfg: Optional[ConstantsConfig] = None) -> float:
    """||Z - E[Z]||_m <= C (sqrt(m v) + m c) with (v, c) from main_theorem_params."""
    cfg = _constants(cfg)
    v, c = main_theorem_params(k, alpha, cfg)
    return centered_moment_from_params(v, c, m, cfg.C_moment)


def raw_moment_bound(k: int, m: int, constant: float = 1.0) -> float:
    """||Z||_m <= constant * (k + m)."""
    if k < 2 or m < 1:
        raise DomainError(f"need k >= 2 and m >= 1, got k={k}, m={m}")
    return constant * (k + m)


def binary_moment_bound(m: int) -> float:
    """||Z_{n,2,p}||_m <= 20 m, the moment form of E[exp(Z/4)] <= 2."""
    if m < 1:
        raise DomainError(f"m must be >= 1, got {m}")
    return 20.0 * m


#
# Lemma-level bounds
#


def bdd_diff_variance(n: int, alpha: float) -> float:
    """v = 27 n log^2(n/alpha), so that the bounded-differences envelope is psi(t) <= v t^2."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    if not 0.0 < alpha <= 0.5:
        raise DomainError(f"alpha must lie in (0, 1/2], got {alpha}")
    if n / alpha <= 1.0:
        raise DomainError(f"n / alpha must exceed 1, got {n / alpha}")
    return 27.0 * n * math.log(n / alpha) ** 2


def disc_grad_bound(n: int, k: int) -> float:
    """Upper bound sqrt(k) log(n) / n^(3/2) + 8 k log^2(n) / n^2 on f(n) - f(n+1)."""
    if n < 4:
        raise DomainError(f"n must be >= 4, got {n}")
    if k < 0:
        raise DomainError(f"k must be >= 0, got {k}")
    log_n = math.log(n)
    return math.sqrt(k) * log_n / n**1.5 + 8.0 * k * log_n**2 / n**2


def _alpha_power(alpha: float) -> float:
    """alpha^2 sqrt(alpha), evaluated as a product so exact powers of two stay exact."""
    return alpha * alpha * math.sqrt(alpha)


def g_half_df_threshold(k: int, alpha: float) -> int:
    """Smallest n with n >= 16 k^2 / (alpha^2 sqrt(alpha)), beyond which |g(n) - (k-1)/2| <= 1."""
    if k < 2:
        raise DomainError(f"k must be >= 2, got {k}")
    _check_alpha(k, alpha)
    return math.ceil(16.0 * k * k / _alpha_power(alpha))


def g_half_df_applies(n: int, k: int, alpha: float) -> bool:
    """Whether n meets the hypothesis of the g-near-half-df bound."""
    return n >= g_half_df_threshold(k, alpha)


class RangeThresholds(NamedTuple):
    """Sample-size boundaries of the three regimes of the main argument."""

    r1_end: int
    r2_end: float
    r3_lemma: float


def range_thresholds(k: int, alpha: float) -> RangeThresholds:
    """Regime boundaries for (k, alpha).

    r1_end = floor(4096 (k-1) log^2(k-1)) is the last n of the first regime,
    r2_end = 128 (k-1)^2 / (alpha^2 sqrt(alpha)) and r3_lemma = 48 k^2 / (alpha^2 sqrt(alpha)).
    """
    if k < 2:
        raise DomainError(f"k must be >= 2, got {k}")
    _check_alpha(k, alpha)
    power = _alpha_power(alpha)
    return RangeThresholds(
        r1_end=math.floor(4096.0 * (k - 1) * math.log(k - 1) ** 2),
        r2_end=128.0 * (k - 1) ** 2 / power,
        r3_lemma=48.0 * k * k / power,
    )


#
# Selector and solver
#


def _main_shift(n: int, k: int, p: Optional[ProbsLike]) -> float:
    """2 g(n, p) = E[Z] when p is known, otherwise the upper bound 2(k-1) on it."""
    if p is None:
        return 2.0 * (k - 1)
    return 2.0 * g_func(n, p)


def tail_bound(
    method: str,
    n: int,
    k: int,
    alpha: Optional[float],
    t: float,
    cfg: Optional[ConstantsConfig] = None,
    p: Optional[ProbsLike] = None,
) -> float:
    """Raw value of one named tail bound at t; raises BoundNotApplicable outside its region."""
    _check_nk(n, k)
    if method == "sanov":
        return sanov_tail(n, k, t)
    if method == "agrawal":
        return agrawal_tail(k, t)
    if method == "main":
        try:
            v, c = main_theorem_params(k, alpha, cfg)
        except DomainError as err:
            raise BoundNotApplicable("main", str(err)) from err
        return rho(max(0.0, t - _main_shift(n, k, p)), v, c)
    raise DomainError(f"unknown bound {method!r}; expected one of {', '.join(METHODS)}")


def best_tail(
    n: int,
    k: int,
    alpha: Optional[float],
    t: float,
    cfg: Optional[ConstantsConfig] = None,
    p: Optional[ProbsLike] = None,
) -> BoundReport:
    """Evaluate every tail bound at t and pick the smallest applicable one.

    Inapplicable bounds are recorded with value inf and the reason. The main bound is centered at 2 g(n, p) when
    p is given and at 2(k-1) otherwise.
    """
    _check_nk(n, k)
    if t < 0:
        raise DomainError(f"t must be >= 0, got {t}")
    cfg = _constants(cfg)
    entries = []
    for method in METHODS:
        try:
            value = tail_bound(method, n, k, alpha, t, cfg, p)
            entries.append(BoundEntry(name=method, value=value, applicable=True))
        except BoundNotApplicable as err:
            entries.append(BoundEntry(name=method, value=math.inf, applicable=False, reason=err.reason))
    best = min((entry for entry in entries if entry.applicable), key=lambda entry: entry.clamped)

    notes = []
    if cfg.cg_prime_is_policy:
        notes.append("Cg_prime has no published value; defaulted to Cg")
    if p is None and entries[2].applicable:
        notes.append("main bound centered at 2(k-1), an upper bound on E[Z]")
    report = BoundReport(
        n=n,
        k=k,
        alpha=math.nan if alpha is None else alpha,
        t=t,
        entries=tuple(entries),
        best_name=best.name,
        best_value=best.clamped,
        notes=tuple(notes),
    )
    logger.debug("Evaluated tail bounds", n=n, k=k, t=t, best=best.name, value=best.clamped)
    return report


def _solve_decreasing(bound, lower: float, delta: float, start: float) -> float:
    """Smallest t >= lower with bound(t) <= delta, for bound nonincreasing and continuous on [lower, inf)."""
    if bound(lower) <= delta:
        return lower
    upper = max(start, lower + 1.0)
    for _ in range(BRACKET_DOUBLINGS):
        if bound(upper) <= delta:
            break
        upper *= 2.0
    else:
        raise NoSolutionError(f"bound stays above {delta} up to t = {upper}")
    root = bisect(
        lambda t: bound(t) - delta, lower, upper, xtol=SOLVER_XTOL, rtol=SOLVER_RTOL, maxiter=SOLVER_MAXITER
    )
    while bound(root) > delta:
        root += SOLVER_XTOL
    return root


def threshold_for_test(
    n: int,
    k: int,
    alpha: Optional[float],
    delta: float,
    method: str = "best",
    cfg: Optional[ConstantsConfig] = None,
    p: Optional[ProbsLike] = None,
) -> float:
    """Smallest t with bound(t) <= delta: reject the null hypothesis when Z >= t."""
    _check_nk(n, k)
    if not 0.0 < delta <= 1.0:
        raise DomainError(f"delta must lie in (0, 1], got {delta}")
    cfg = _constants(cfg)
    start = 2.0 * (k - math.log(delta) + 1.0)

    if method == "best":
        thresholds = []
        for name in METHODS:
            try:
                thresholds.append(threshold_for_test(n, k, alpha, delta, name, cfg, p))
            except BoundNotApplicable:
                logger.debug("Skipping inapplicable method", method=name, k=k, alpha=alpha)
        return min(thresholds)

    if method == "sanov":
        threshold = max(0.0, 2.0 * (log_sanov_coefficient(n, k) - math.log(delta)))
        while sanov_tail(n, k, threshold) > delta:
            threshold = float(np.nextafter(threshold, math.inf))
    elif method == "agrawal":
        threshold = _solve_decreasing(lambda t: agrawal_tail(k, t), 2.0 * (k - 1), delta, start)
    elif method == "main":
        # Raises BoundNotApplicable for an invalid alpha before any solving starts.
        tail_bound("main", n, k, alpha, 0.0, cfg, p)
        shift = _main_shift(n, k, p)
        threshold = _solve_decreasing(lambda t: tail_bound("main", n, k, alpha, t, cfg, p), shift, delta, start)
    else:
        raise DomainError(f"unknown method {method!r}; expected sanov, agrawal, main or best")

    logger.debug("Solved test threshold", method=method, n=n, k=k, delta=delta, threshold=threshold)
    return threshold
