"""System reliability and MTTF for the three scrubbing disciplines.

Reliability is composed in log space throughout: a 128 MB memory has ~3e7
words, each failing with probability ~1e-15 per sweep, so neither ``r**M``
nor ``1 - R`` survives naive double-precision evaluation.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .markov_kernel import TransientRoots, WordChain, chain_for, transient_roots, word_failure, word_log_reliability
from .numerics import QuadratureError, adaptive_integrate, safe_complement
from .params import ConfigError, Model, ScrubConfig, canonicalize

DEFAULT_REL_TOL = 1e-9
# R(t) is bounded by exp(-TAIL_LOG_DECAY) beyond the quadrature cut-off.
TAIL_LOG_DECAY = 50.0


class NumericalFailure(ArithmeticError):
    """A result could not be computed to the requested accuracy."""


class BelowResolutionError(NumericalFailure):
    pass


class DivergentMttfError(NumericalFailure):
    pass


class MttfMethod(str, enum.Enum):
    CLOSED_FORM_EQ8 = "ClosedFormEq8"
    CLOSED_FORM_TABLE2 = "ClosedFormTable2"
    QUADRATURE = "Quadrature"
    RENEWAL_EXACT = "RenewalExact"
    BOUNDS_MIDPOINT = "BoundsMidpoint"
    MONTE_CARLO = "MonteCarlo"


@dataclass(frozen=True)
class MttfResult:
    """An MTTF estimate in days.

    ``lower``/``upper`` are ``None`` for pure closed forms. For
    ``BoundsMidpoint`` they are the lower and midpoint bounds, so
    ``point == upper``; the hard envelope ``T / (1 - R(T))`` is in ``details``.
    """

    point: float
    lower: float | None
    upper: float | None
    method: MttfMethod
    std_error: float | None = None
    details: Mapping[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class SystemCurvePoint:
    t: float
    log_R: float
    F_sys: float

    @property
    def R(self) -> float:
        return math.exp(self.log_R)


def system_log_reliability(word_log_r, memory_words: int):
    """``log R = M * log r`` for ``M`` independent words."""
    if memory_words < 1:
        raise ValueError("memory_words must be >= 1")
    return memory_words * np.asarray(word_log_r, dtype=float) if np.ndim(word_log_r) else memory_words * float(word_log_r)


def system_failure(word_log_r, memory_words: int):
    return safe_complement(system_log_reliability(word_log_r, memory_words))


def renewal_word_log_reliability(roots: TransientRoots, period: float, t):
    """``log r(t)`` with a perfect scrub every ``period`` days.

    A surviving word holds at most one error at a sweep, which the sweep
    corrects, so ``r(nT + x) = r0(T)**n * r0(x)`` for ``0 <= x < T``.
    """
    if not period > 0:
        raise ValueError(f"period must be positive, got {period}")
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("time must be non-negative")
    if math.isinf(period):
        return word_log_reliability(roots, t)
    cycles = np.floor(t / period)
    rem = t - cycles * period
    # floor() can land one cycle off when t is a float multiple of the period
    over = rem >= period
    cycles = np.where(over, cycles + 1, cycles)
    rem = np.where(over, rem - period, rem)
    under = rem < 0
    cycles = np.where(under, cycles - 1, cycles)
    rem = np.where(under, rem + period, rem)
    out = cycles * word_log_reliability(roots, period) + word_log_reliability(roots, rem)
    return out if np.ndim(out) else float(out)


def _roots(config: ScrubConfig) -> TransientRoots:
    return transient_roots(chain_for(config))


def word_log_curve(config: ScrubConfig, t):
    """``log r(t)`` of a single word under the configured discipline."""
    roots = _roots(config)
    rates = canonicalize(config)
    if config.model.uses_sweep:
        return renewal_word_log_reliability(roots, rates.period_days, t)
    return word_log_reliability(roots, t)


def system_curve(config: ScrubConfig, times: Iterable[float]) -> list[SystemCurvePoint]:
    times = np.asarray(list(times), dtype=float)
    log_R = np.atleast_1d(system_log_reliability(word_log_curve(config, times), config.memory_words))
    F = safe_complement(log_R)
    return [SystemCurvePoint(float(t), float(lr), float(f)) for t, lr, f in zip(times, log_R, F)]


def _require(config: ScrubConfig, *models: Model) -> None:
    if config.model not in models:
        names = ", ".join(m.value for m in models)
        raise ConfigError(f"method applies to {names} scrubbing, not {config.model.value}")


def mttf_probabilistic_closed(config: ScrubConfig, variant: MttfMethod | str = MttfMethod.CLOSED_FORM_EQ8) -> MttfResult:
    """Closed-form MTTF of access-scrubbed memory, in days.

    ``ClosedFormEq8``: ``4(mu + lam) / (M (lam (2n - 1))**2)``.
    ``ClosedFormTable2``: ``4 mu / (M (2 lam + 2 w - 1)**2)``, the summary-table
    variant, which mixes a rate with a bit count and is kept only so the
    discrepancy can be reported.
    """
    _require(config, Model.PROBABILISTIC)
    variant = MttfMethod(variant)
    rates = canonicalize(config)
    lam, mu, n, M = rates.lambda_day, rates.mu_day, rates.total_bits_n, config.memory_words
    if variant is MttfMethod.CLOSED_FORM_EQ8:
        if lam == 0:
            raise DivergentMttfError("zero upset rate: MTTF is infinite")
        value = 4.0 * (mu + lam) / (M * (lam * (2 * n - 1)) ** 2)
    elif variant is MttfMethod.CLOSED_FORM_TABLE2:
        value = 4.0 * mu / (M * (2 * lam + 2 * config.data_bits - 1) ** 2)
    else:
        raise ValueError(f"not a closed-form variant: {variant}")
    return MttfResult(point=value, lower=None, upper=None, method=variant)


def _cutoff(roots: TransientRoots, memory_words: int) -> float:
    # r0(t) <= (a1/gap) exp(-a2 t); pick t* so the M-th power is below exp(-TAIL_LOG_DECAY)
    log_c = math.log(roots.a1 / roots.gap)
    return (TAIL_LOG_DECAY + memory_words * log_c) / (memory_words * roots.a2)


def _tail_bound(roots: TransientRoots, memory_words: int, start: float) -> float:
    log_c = math.log(roots.a1 / roots.gap)
    m_a2 = memory_words * roots.a2
    return math.exp(memory_words * log_c - m_a2 * start) / m_a2


def _integrate_system(roots: TransientRoots, memory_words: int, stop: float, rel_tol: float):
    def integrand(x):
        return np.exp(memory_words * word_log_reliability(roots, x))

    # Geometric breakpoints resolve the drop of R wherever it falls in [0, stop].
    points = np.geomspace(stop * 1e-16, stop, 64)[:-1]
    try:
        return adaptive_integrate(integrand, 0.0, stop, rel_tol=rel_tol, points=points)
    except QuadratureError as exc:
        raise NumericalFailure(f"MTTF quadrature did not converge: {exc}") from exc


def mttf_chain_quadrature(chain: WordChain, memory_words: int, rel_tol: float = DEFAULT_REL_TOL) -> MttfResult:
    """``integral_0^inf r0(t)**M dt`` for an unswept chain, with a bounded tail."""
    roots = transient_roots(chain)
    if roots.degenerate:
        raise DivergentMttfError("zero upset rate: the reliability integral diverges")
    stop = _cutoff(roots, memory_words)
    quad = _integrate_system(roots, memory_words, stop, rel_tol)
    tail = _tail_bound(roots, memory_words, stop)
    value = quad.value + tail
    err = quad.abs_error_estimate + tail
    return MttfResult(
        point=value,
        lower=value - err,
        upper=value + err,
        method=MttfMethod.QUADRATURE,
        details={"cutoff_days": stop, "tail_days": tail, "evaluations": quad.evaluations},
    )


def mttf_quadrature_probabilistic(config: ScrubConfig, tol: float = DEFAULT_REL_TOL) -> MttfResult:
    _require(config, Model.PROBABILISTIC)
    if not tol > 0:
        raise ValueError("tol must be positive")
    return mttf_chain_quadrature(chain_for(config), config.memory_words, tol)


def _sweep_failure(config: ScrubConfig) -> tuple[TransientRoots, float, float]:
    """Roots, period in days, and ``1 - R(T)`` for a swept configuration."""
    _require(config, Model.DETERMINISTIC, Model.MIXED)
    roots = _roots(config)
    if roots.degenerate:
        raise DivergentMttfError("zero upset rate: MTTF is infinite")
    period = canonicalize(config).period_days
    log_RT = config.memory_words * float(word_log_reliability(roots, period)) if math.isfinite(period) else -math.inf
    miss = float(safe_complement(log_RT))
    if miss == 0.0:
        raise BelowResolutionError(
            "1 - R(T) underflows to zero: failures are below double-precision resolution at this scale; "
            "use a larger lambda or period and rescale, or extended precision"
        )
    return roots, period, miss


def mttf_renewal_exact(config: ScrubConfig, tol: float = DEFAULT_REL_TOL) -> MttfResult:
    """Exact MTTF of a swept memory.

    Summing the geometric series over sweep intervals gives
    ``MTTF = integral_0^T R(x) dx / (1 - R(T))``.
    """
    roots, period, miss = _sweep_failure(config)
    M = config.memory_words
    if math.isinf(period):
        return MttfResult(**{**mttf_chain_quadrature(chain_for(config), M, tol).__dict__, "method": MttfMethod.RENEWAL_EXACT})
    cutoff = _cutoff(roots, M)
    stop = min(period, cutoff)
    quad = _integrate_system(roots, M, stop, tol)
    tail = _tail_bound(roots, M, stop) if period > cutoff else 0.0
    numer = quad.value + tail
    err = (quad.abs_error_estimate + tail) / miss
    value = numer / miss
    return MttfResult(
        point=value,
        lower=value - err,
        upper=value + err,
        method=MttfMethod.RENEWAL_EXACT,
        details={"one_minus_R_T": miss, "integral_days": numer, "period_days": period},
    )


def mttf_bounds(config: ScrubConfig) -> MttfResult:
    """Interval bounds from the renewal structure.

    ``MTTFl = T R(T) / (1 - R(T))`` and ``MTTFu = T (1 + R(T)) / (2 (1 - R(T)))``.
    MTTFu is the midpoint of MTTFl and the hard envelope ``T / (1 - R(T))``;
    it is not itself a guaranteed upper bound (it undershoots when R is
    concave over the sweep interval, by up to T/6).
    """
    roots, period, miss = _sweep_failure(config)
    if math.isinf(period):
        raise DivergentMttfError("bounds are undefined without a finite sweep period")
    R_T = 1.0 - miss
    lower = period * R_T / miss
    upper = period * (1.0 + R_T) / (2.0 * miss)
    return MttfResult(
        point=upper,
        lower=lower,
        upper=upper,
        method=MttfMethod.BOUNDS_MIDPOINT,
        details={"envelope_upper": period / miss, "one_minus_R_T": miss, "period_days": period},
    )


def mttf(config: ScrubConfig, tol: float = DEFAULT_REL_TOL) -> MttfResult:
    """The most accurate analytic MTTF for the configured model."""
    if config.model is Model.PROBABILISTIC:
        return mttf_quadrature_probabilistic(config, tol)
    return mttf_renewal_exact(config, tol)


@dataclass(frozen=True)
class ModelComparison:
    memory_words: int
    scrub_period_seconds: float
    scrub_rate_per_second: float
    probabilistic: float
    deterministic: float
    mixed: float

    @property
    def det_over_prob(self) -> float:
        return self.deterministic / self.probabilistic

    @property
    def mixed_over_det(self) -> float:
        return self.mixed / self.deterministic

    @property
    def mixed_over_prob(self) -> float:
        return self.mixed / self.probabilistic


def configure(base: ScrubConfig, model: Model | str, **changes) -> ScrubConfig:
    """Copy of ``base`` switched to ``model``, with parameter overrides."""
    return base.replace(model=Model.parse(model), **changes)


def compare_models(base: ScrubConfig, grid: Iterable[Mapping[str, float]]) -> list[ModelComparison]:
    """MTTF of all three disciplines at each grid point.

    Each grid entry may override ``memory_words``, ``scrub_period_seconds`` and
    ``scrub_rate_per_second``; missing keys fall back to ``base``.
    """
    rows = []
    for point in grid:
        words = int(point.get("memory_words", base.memory_words))
        period = point.get("scrub_period_seconds", base.scrub_period_seconds)
        rate = point.get("scrub_rate_per_second", base.scrub_rate_per_second)
        common = dict(memory_words=words, scrub_period_seconds=period, scrub_rate_per_second=rate)
        rows.append(ModelComparison(
            memory_words=words,
            scrub_period_seconds=period,
            scrub_rate_per_second=rate,
            probabilistic=mttf(configure(base, Model.PROBABILISTIC, **common)).point,
            deterministic=mttf(configure(base, Model.DETERMINISTIC, **common)).point,
            mixed=mttf(configure(base, Model.MIXED, **common)).point,
        ))
    return rows


def percent_change(before: float, after: float) -> float:
    return 100.0 * (after - before) / before
