"""Numerical certification of every inequality about Z against the exact and Monte Carlo oracles.

Each property has a checker that sweeps a GridSpec and records, per cell, lhs <= rhs with slack = rhs - lhs.
Identities are recorded as |difference| <= tolerance.
"""
import math
from functools import lru_cache
from typing import Any, Callable, Dict, Iterator, List, Optional, Tuple

import numpy as np
import structlog
from scipy.special import logsumexp

from klconc.bounds import (
    agrawal_delta_bound,
    agrawal_tail,
    bdd_diff_variance,
    center_from_moments,
    center_from_tails,
    disc_grad_bound,
    g_half_df_threshold,
    main_theorem_params,
    range_thresholds,
    raw_moment_bound,
    sanov_tail,
)
from klconc.core_math import binomial_log_pmf, chain_decompose, f_func, g_func, z_statistic
from klconc.exact_law import cached_law, law_log_mgf, law_mean, law_norm, law_tail
from klconc.exceptions import DomainError
from klconc.models import (
    ConstantsConfig,
    Counts,
    Distribution,
    Failure,
    GridSpec,
    ShapeSpec,
    SubGammaParams,
    VerifyReport,
    alpha_floor,
    uniform,
)
from klconc.montecarlo import mc_log_mgf, mc_tail, mgf_regime, sample_statistic
from klconc.utils import ProgressBar

logger = structlog.get_logger()

IDENTITY_TOLERANCE = 1e-12
MEAN_TOLERANCE = 1e-10
INEQUALITY_TOLERANCE = 1e-10
DOMINATION_TOLERANCE = 1e-12
MC_STD_ERRORS = 5.0
CHI2_LIMIT_TOLERANCE = 0.05
BINARY_MGF_LIMIT = 2.0
MGF_T_POINTS = 11
G_TAIL_T_POINTS = 10
# log-pmf cutoff below which binomial masses underflow to zero in double precision.
LOG_MASS_FLOOR = -745.0
CHAIN_RULE_INSTANCES = 1000
CHAIN_RULE_N_MAX = 30


class _Ledger:
    """Accumulates checked cells for one property."""

    def __init__(self, name: str):
        self.name = name
        self.checked = 0
        self.skipped = 0
        self.min_slack = math.inf
        self.failures: List[Failure] = []
        self.notes: List[str] = []

    def check(self, cell: Dict[str, Any], lhs: float, rhs: float, tolerance: float = 0.0):
        """Record lhs <= rhs, failing when the slack is below -tolerance."""
        slack = rhs - lhs
        self.checked += 1
        self.min_slack = min(self.min_slack, slack)
        if not slack >= -tolerance:
            logger.warning("Inequality violated", property=self.name, cell=cell, lhs=lhs, rhs=rhs, slack=slack)
            self.failures.append(Failure(cell=cell, lhs=lhs, rhs=rhs, slack=slack))

    def check_identity(self, cell: Dict[str, Any], left: float, right: float, tolerance: float):
        """Record |left - right| <= tolerance."""
        self.check(cell, abs(left - right), tolerance)

    def skip(self, count: int = 1):
        """Record inapplicable cells."""
        self.skipped += count

    def report(self) -> VerifyReport:
        """Freeze into a VerifyReport."""
        return VerifyReport(
            property=self.name,
            cells_checked=self.checked,
            cells_skipped=self.skipped,
            failures=tuple(self.failures),
            min_slack=self.min_slack,
            notes=tuple(self.notes),
        )


#
# Grid helpers
#


def _cell(n: int, k: int, shape: ShapeSpec, **extra) -> Dict[str, Any]:
    cell = {"n": n, "k": k, "shape": shape.label}
    cell.update(extra)
    return cell


def _instances(grid: GridSpec) -> Iterator[Tuple[int, ShapeSpec, Distribution]]:
    for k in grid.k_values:
        for shape in grid.shapes():
            yield k, shape, shape.build(k)


def _exact_cells(grid: GridSpec, ledger: _Ledger) -> Iterator[Tuple[int, int, ShapeSpec, Distribution]]:
    """(n, k, shape, p) for every enumerable exact cell; the others are counted as skipped."""
    for k, shape, p in _instances(grid):
        for n in grid.n_values:
            if grid.is_enumerable(n, k):
                yield n, k, shape, p
            else:
                ledger.skip()


def _mc_cells(grid: GridSpec) -> Iterator[Tuple[int, int, ShapeSpec, Distribution]]:
    for k, shape, p in _instances(grid):
        for n in grid.mc_n_values:
            yield n, k, shape, p


def t_values(grid: GridSpec, k: int, cfg: ConstantsConfig) -> np.ndarray:
    """The grid's explicit t values, or t_points evenly spaced over [0, agrawal_delta_bound(k, 0.01)]."""
    if grid.t_grid is not None:
        return np.asarray(grid.t_grid, dtype=float)
    return np.linspace(0.0, agrawal_delta_bound(k, 0.01, cfg), grid.t_points)


def _symmetric_t(limit: float, points: int = MGF_T_POINTS) -> np.ndarray:
    return np.linspace(-limit, limit, points)


@lru_cache(maxsize=256)
def _mc_samples(n: int, p: Distribution, m: int, seed: int, threads: int) -> np.ndarray:
    samples = sample_statistic(n, p, m, seed, threads)
    samples.setflags(write=False)
    return samples


#
# Checkers
#


def check_chain_rule(grid: GridSpec, cfg: ConstantsConfig) -> _Ledger:  # pylint: disable=unused-argument
    """binary_part + conditional_part equals Z on seeded random (counts, p) with k in 3..6."""
    ledger = _Ledger("chain_rule")
    for seed in grid.seeds:
        rng = np.random.Generator(np.random.Philox(seed))
        for instance in range(CHAIN_RULE_INSTANCES):
            k = int(rng.integers(3, 7))
            p = Distribution.from_weights(rng.dirichlet(np.ones(k)))
            n = int(rng.integers(1, CHAIN_RULE_N_MAX + 1))
            counts = Counts(counts=rng.multinomial(n, p.array))
            binary_part, conditional_part = chain_decompose(counts, p)
            cell = {"seed": seed, "instance": instance, "counts": list(counts.counts), "p": list(p.probs)}
            ledger.check_identity(cell, binary_part + conditional_part, z_statistic(counts, p), IDENTITY_TOLERANCE)
    return ledger


def check_bernstein_mean(grid: GridSpec, cfg: ConstantsConfig) -> _Ledger:  # pylint: disable=unused-argument
    """2 g(n, p) equals the exact mean of Z."""
    ledger = _Ledger("bernstein_mean")
    for n, k, shape, p in _exact_cells(grid, ledger):
        law = cached_law(n, p, grid.cap)
        ledger.check_identity(_cell(n, k, shape), 2.0 * g_func(n, p), law_mean(law), MEAN_TOLERANCE)
    return ledger


def check_f_monotone_and_bound(grid: GridSpec, cfg: ConstantsConfig) -> _Ledger:  # pylint: disable=unused-argument
    """f(n+1) <= f(n) and f(n) <= (k-1)/n for n up to f_n_max."""
    ledger = _Ledger("f_monotone_and_bound")
    for k, shape, p in _instances(grid):
        for n in range(1, grid.f_n_max + 1):
            current = f_func(n, p)
            ledger.check(_cell(n, k, shape, check="bound"), current, (k - 1) / n, INEQUALITY_TOLERANCE)
            ledger.check(_cell(n, k, shape, check="monotone"), f_func(n + 1, p), current, INEQUALITY_TOLERANCE)
    return ledger


def check_disc_gradient(grid: GridSpec, cfg: ConstantsConfig) -> _Ledger:  # pylint: disable=unused-argument
    """0 <= f(n) - f(n+1) <= disc_grad_bound(n, k) for 4 <= n <= grad_n_max, on uniform and geometric p."""
    ledger = _Ledger("disc_gradient")
    for k, shape, p in _instances(grid):
        if shape.name not in ("uniform", "geometric"):
            continue
        for n in range(4, grid.grad_n_max + 1):
            decrement = f_func(n, p) - f_func(n + 1, p)
            ledger.check(_cell(n, k, shape, check="nonnegative"), 0.0, decrement, INEQUALITY_TOLERANCE)
            ledger.check(_cell(n, k, shape, check="bound"), decrement, disc_grad_bound(n, k), INEQUALITY_TOLERANCE)
    return ledger


def _check_domination(name: str, bound: Callable[[int, int, float], Optional[float]], grid, cfg) -> _Ledger:
    ledger = _Ledger(name)
    for n, k, shape, p in _exact_cells(grid, ledger):
        law = cached_law(n, p, grid.cap)
        for t in t_values(grid, k, cfg):
            rhs = bound(n, k, t)
            if rhs is None:
                ledger.skip()
                continue
            ledger.check(_cell(n, k, shape, t=float(t)), law_tail(law, t), rhs, DOMINATION_TOLERANCE)
    for n, k, shape, p in _mc_cells(grid):
        for seed in grid.seeds:
            samples = _mc_samples(n, p, grid.mc_samples, seed, grid.threads)
            for t in t_values(grid, k, cfg):
                rhs = bound(n, k, t)
                if rhs is None:
                    ledger.skip()
                    continue
                estimate = mc_tail(n, p, t, grid.mc_samples, seed, samples=samples)
                cell = _cell(n, k, shape, t=float(t), seed=seed, mc=True)
                ledger.check(cell, estimate.estimate, rhs, MC_STD_ERRORS * estimate.std_error + DOMINATION_TOLERANCE)
    return ledger


def check_sanov_dominates(grid: GridSpec, cfg: ConstantsConfig) -> _Ledger:
    """P(Z >= t) <= C(n+k-1, k-1) exp(-t/2)."""
    return _check_domination("sanov_dominates", sanov_tail, grid, cfg)


def check_agrawal_dominates(grid: GridSpec, cfg: ConstantsConfig) -> _Ledger:
    """P(Z >= t) <= the Agrawal bound, for t >= 2(k-1)."""

    def bound(n, k, t):  # pylint: disable=unused-argument
        return agrawal_tail(k, t) if t >= 2.0 * (k - 1) else None

    return _check_domination("agrawal_dominates", bound, grid, cfg)


def check_main_mgf_envelope(grid: GridSpec, cfg: ConstantsConfig) -> _Ledger:
    """Centered log-MGF <= C_main k log^4(k/alpha) t^2 on |t| <= 1/(2 c_main)."""
    ledger = _Ledger("main_mgf_envelope")
    for n, k, shape, p in _exact_cells(grid, ledger):
        if p.alpha <= 0:
            ledger.skip()
            continue
        v, _ = main_theorem_params(k, p.alpha, cfg)
        law = cached_law(n, p, grid.cap)
        for t in _symmetric_t(mgf_regime(k, p.alpha, cfg)):
            lhs = law_log_mgf(law, t, centered=True)
            ledger.check(_cell(n, k, shape, t=float(t)), lhs, v * t * t, INEQUALITY_TOLERANCE)
    for n, k, shape, p in _mc_cells(grid):
        if p.alpha <= 0:
            ledger.skip()
            continue
        v, _ = main_theorem_params(k, p.alpha, cfg)
        for seed in grid.seeds:
            samples = _mc_samples(n, p, grid.mc_samples, seed, grid.threads)
            for t in _symmetric_t(mgf_regime(k, p.alpha, cfg)):
                estimate = mc_log_mgf(n, p, t, grid.mc_samples, seed, samples=samples, cfg=cfg)
                cell = _cell(n, k, shape, t=float(t), seed=seed, mc=True)
                ledger.check(cell, estimate.estimate, v * t * t, MC_STD_ERRORS * estimate.std_error)
    return ledger


def binary_mgf(n: int, q: float) -> float:
    """E[exp(Z_{n,2,(q,1-q)} / 4)] by exact summation over the binomial support."""
    j = np.arange(n + 1, dtype=float)
    rest = n - j
    with np.errstate(divide="ignore", invalid="ignore"):
        heads = np.where(j > 0, j * np.log(j / (n * q)), 0.0)
        tails = np.where(rest > 0, rest * np.log(rest / (n * (1.0 - q))), 0.0)
        z = 2.0 * (heads + tails)
    return float(np.exp(logsumexp(binomial_log_pmf(n, q) + z / 4.0)))


def check_binary_mgf(grid: GridSpec, cfg: ConstantsConfig) -> _Ledger:  # pylint: disable=unused-argument
    """E[exp(Z_{n,2,p} / 4)] <= 2."""
    ledger = _Ledger("binary_mgf")
    for q in grid.binary_p_values:
        for n in range(1, grid.binary_n_max + 1):
            cell = {"n": n, "k": 2, "p": [q, 1.0 - q]}
            ledger.check(cell, binary_mgf(n, q), BINARY_MGF_LIMIT, INEQUALITY_TOLERANCE)
    return ledger


def check_g_half_df(grid: GridSpec, cfg: ConstantsConfig) -> _Ledger:  # pylint: disable=unused-argument
    """|g(n) - (k-1)/2| <= 1 at n = g_half_df_threshold(k, alpha)."""
    ledger = _Ledger("g_half_df")
    for k, shape, p in _instances(grid):
        if p.alpha <= 0:
            ledger.skip()
            continue
        n = g_half_df_threshold(k, p.alpha)
        if n > grid.g_half_n_max:
            ledger.skip()
            continue
        ledger.check(_cell(n, k, shape), abs(g_func(n, p) - (k - 1) / 2.0), 1.0, INEQUALITY_TOLERANCE)
    return ledger


def check_chi2_limit(grid: GridSpec, cfg: ConstantsConfig) -> _Ledger:  # pylint: disable=unused-argument
    """|2 g(n, uniform) - (k-1)| <= 0.05 at n = chi2_factor * k."""
    ledger = _Ledger("chi2_limit")
    ledger.notes.append(f"tolerance {CHI2_LIMIT_TOLERANCE} at n = {grid.chi2_factor} k is a harness policy")
    for k in grid.k_values:
        n = grid.chi2_factor * k
        cell = {"n": n, "k": k, "shape": "uniform"}
        ledger.check_identity(cell, 2.0 * g_func(n, uniform(k)), k - 1.0, CHI2_LIMIT_TOLERANCE)
    return ledger


def _g_tail_instances(grid: GridSpec) -> Iterator[Tuple[int, str, Distribution]]:
    for k in grid.k_values:
        if k > 3:
            continue
        yield k, "uniform", uniform(k)
        if k == 2:
            yield k, "alpha-floor(0.25)", alpha_floor(2, 0.25)


def check_g_subgaussian_tail(grid: GridSpec, cfg: ConstantsConfig) -> _Ledger:  # pylint: disable=unused-argument
    """P(|g(Y) - (k-1)/2| > t) <= 2 exp(-t^2 / 4) for Y ~ Bin(n, r), r >= 1 - 1/k, by exact summation over Y."""
    ledger = _Ledger("g_subgaussian_tail")
    for k, label, p in _g_tail_instances(grid):
        n = math.ceil(range_thresholds(k, p.alpha).r3_lemma)
        if n > grid.g_tail_n_max:
            ledger.skip()
            continue
        for r in sorted({1.0 - 1.0 / k, 0.9}):
            log_mass = binomial_log_pmf(n, r)
            support = np.flatnonzero(log_mass > LOG_MASS_FLOOR)
            deviation = np.array([abs(g_func(int(y), p) - (k - 1) / 2.0) for y in support])
            for t in np.linspace(0.0, float(k), G_TAIL_T_POINTS):
                outside = log_mass[support][deviation > t]
                probability = float(np.exp(logsumexp(outside))) if outside.size else 0.0
                cell = {"n": n, "k": k, "shape": label, "r": r, "t": float(t)}
                ledger.check(cell, probability, 2.0 * math.exp(-t * t / 4.0), INEQUALITY_TOLERANCE)
    return ledger


def check_bdd_diff_envelope(grid: GridSpec, cfg: ConstantsConfig) -> _Ledger:  # pylint: disable=unused-argument
    """Centered log-MGF <= 27 n log^2(n/alpha) t^2, on t in [-1, 1]."""
    ledger = _Ledger("bdd_diff_envelope")
    for n, k, shape, p in _exact_cells(grid, ledger):
        try:
            v = bdd_diff_variance(n, p.alpha)
        except DomainError:
            ledger.skip()
            continue
        law = cached_law(n, p, grid.cap)
        for t in _symmetric_t(1.0):
            lhs = law_log_mgf(law, t, centered=True)
            ledger.check(_cell(n, k, shape, t=float(t)), lhs, v * t * t, INEQUALITY_TOLERANCE)
    return ledger


def check_raw_moment_growth(grid: GridSpec, cfg: ConstantsConfig) -> _Ledger:
    """||Z||_m <= C (k + m) with C = C_agrawal_delta, for m <= moment_max."""
    ledger = _Ledger("raw_moment_growth")
    for n, k, shape, p in _exact_cells(grid, ledger):
        law = cached_law(n, p, grid.cap)
        for m in range(1, grid.moment_max + 1):
            rhs = raw_moment_bound(k, m, cfg.C_agrawal_delta)
            ledger.check(_cell(n, k, shape, m=m), law_norm(law, m), rhs, INEQUALITY_TOLERANCE)
    return ledger


def _two_point_log_mgf(height: float, weight: float, t: float) -> float:
    """Centered log-MGF of X = height with probability weight, 0 otherwise."""
    mean = weight * height
    return float(np.logaddexp(math.log(weight) + t * (height - mean), math.log1p(-weight) - t * mean))


def check_centering_maps(grid: GridSpec, cfg: ConstantsConfig) -> _Ledger:  # pylint: disable=unused-argument
    """Two-point variables meeting the moment or tail hypotheses land inside the mapped sub-Gamma envelope.

    X in {0, b} satisfies both hypotheses with (A, B) = (0, b) and with (A, B) = (b^2, 0).
    """
    ledger = _Ledger("centering_maps")
    maps = {"moments": center_from_moments, "tails": center_from_tails}
    for height in (0.5, 1.0, 2.0, 5.0):
        for weight in (0.01, 0.1, 0.5, 0.9):
            for map_name, center in maps.items():
                for a_value, b_value in ((0.0, height), (height * height, 0.0)):
                    params: SubGammaParams = center(a_value, b_value)
                    limit = 0.9 / params.c if params.c > 0 else 10.0 / height
                    for t in _symmetric_t(limit):
                        cell = {"b": height, "w": weight, "map": map_name, "A": a_value, "B": b_value, "t": float(t)}
                        lhs = _two_point_log_mgf(height, weight, t)
                        ledger.check(cell, lhs, params.envelope(t), INEQUALITY_TOLERANCE)
    return ledger


PROPERTIES: Dict[str, Callable[[GridSpec, ConstantsConfig], _Ledger]] = {
    "chain_rule": check_chain_rule,
    "bernstein_mean": check_bernstein_mean,
    "f_monotone_and_bound": check_f_monotone_and_bound,
    "disc_gradient": check_disc_gradient,
    "sanov_dominates": check_sanov_dominates,
    "agrawal_dominates": check_agrawal_dominates,
    "main_mgf_envelope": check_main_mgf_envelope,
    "binary_mgf": check_binary_mgf,
    "g_half_df": check_g_half_df,
    "g_subgaussian_tail": check_g_subgaussian_tail,
    "bdd_diff_envelope": check_bdd_diff_envelope,
    "raw_moment_growth": check_raw_moment_growth,
    "centering_maps": check_centering_maps,
    "chi2_limit": check_chi2_limit,
}


def verify(property_name: str, grid: Optional[GridSpec] = None, cfg: Optional[ConstantsConfig] = None) -> VerifyReport:
    """Check one property of the catalogue over `grid` (the default grid if omitted)."""
    if property_name not in PROPERTIES:
        raise DomainError(f"unknown property {property_name!r}; expected one of {', '.join(PROPERTIES)}")
    grid = GridSpec() if grid is None else grid
    cfg = ConstantsConfig() if cfg is None else cfg
    logger.info("Verifying property", property=property_name)
    report = PROPERTIES[property_name](grid, cfg).report()
    if cfg.cg_prime_is_policy and property_name == "main_mgf_envelope":
        report = report.copy(update={"notes": report.notes + ("Cg_prime has no published value; defaulted to Cg",)})
    logger.info(
        "Verified property",
        property=property_name,
        passed=report.passed,
        cells_checked=report.cells_checked,
        cells_skipped=report.cells_skipped,
        failures=len(report.failures),
        min_slack=report.min_slack,
    )
    return report


def run_all(
    grid: Optional[GridSpec] = None,
    cfg: Optional[ConstantsConfig] = None,
    properties: Optional[List[str]] = None,
    verbosity: int = 0,
) -> List[VerifyReport]:
    """Verify every property (or the named subset) in catalogue order."""
    names = list(PROPERTIES) if not properties else list(properties)
    reports = []
    with ProgressBar(total=len(names), desc="verify", unit="property", verbosity=verbosity) as progress:
        for name in names:
            progress.set_postfix_str(name)
            reports.append(verify(name, grid, cfg))
            progress.update(1)
    return reports
