"""Event-driven Monte Carlo of scrubbed SEC-DED words.

Two simulators share one contract. The state-level one walks the three-state
chain directly; the bit-level one tracks which physical bit is faulty and
draws an independent upset clock for every bit, so the Markov abstraction
itself is under test when the two are compared.

Both are vectorised across trials: each pass of the event loop advances
every live trial by one transition. Trials are grouped into fixed blocks and
each block draws from its own Philox stream keyed by ``(seed, stream, block)``,
which makes results independent of how blocks are spread over workers.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .markov_kernel import WordChain, chain_for
from .params import ScrubConfig, canonicalize
from .scrub_models import MttfMethod, MttfResult, NumericalFailure

BLOCK_SIZE = 1 << 15
Z_SCORE = 3.0

_STREAM_WORD = 0
_STREAM_SYSTEM = 1


class Level(str, enum.Enum):
    STATE = "state"
    BIT = "bit"


class CensoredSimulationError(NumericalFailure):
    """Some trial outlived every horizon extension."""


@dataclass(frozen=True)
class SimConfig:
    system: ScrubConfig
    trials: int
    horizon: float
    seed: int = 0
    level: Level = Level.STATE
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "level", Level(self.level))
        if int(self.trials) != self.trials or self.trials < 1:
            raise ValueError(f"trials must be a positive integer, got {self.trials}")
        if not self.horizon > 0:
            raise ValueError(f"horizon must be positive, got {self.horizon}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")

    @property
    def model(self):
        return self.system.model


@dataclass(frozen=True)
class SurvivalEstimate:
    times: np.ndarray
    survival: np.ndarray
    ci_halfwidth: np.ndarray
    trials: int
    failures: int
    failure_time_samples: np.ndarray | None = field(default=None, repr=False)
    warning: str | None = None

    @property
    def degenerate(self) -> bool:
        return self.failures == 0


def _block_rng(seed: int, stream: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(stream, block))))


def _blocks(trials: int) -> list[tuple[int, int]]:
    return [(b, min(BLOCK_SIZE, trials - b * BLOCK_SIZE)) for b in range(math.ceil(trials / BLOCK_SIZE))]


def _map_blocks(fn, blocks, workers: int):
    if workers <= 1 or len(blocks) == 1:
        return [fn(*blk) for blk in blocks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda blk: fn(*blk), blocks))


def _next_sweep(t: np.ndarray, period: float) -> np.ndarray:
    nxt = (np.floor(t / period) + 1.0) * period
    return np.where(nxt <= t, nxt + period, nxt)


class _StateWords:
    """Independent copies of the three-state chain, resumable across horizons."""

    def __init__(self, chain: WordChain, period: float, size: int, rng: np.random.Generator):
        self.chain = chain
        self.period = period
        self.rng = rng
        self.t = np.zeros(size)
        self.state = np.zeros(size, dtype=np.int8)
        self.fail_time = np.full(size, np.inf)
        if chain.upset_rate == 0.0:
            self.t[:] = np.inf

    def advance(self, horizon: float, subset: np.ndarray | None = None) -> None:
        ch, rng = self.chain, self.rng
        up, rec, fat = ch.upset_rate, ch.recovery_rate, ch.fatal_rate
        if up == 0.0:
            return
        p_recover = rec / (rec + fat)
        live = np.arange(self.t.size) if subset is None else subset
        live = live[(self.state[live] < 2) & (self.t[live] < horizon)]
        while live.size:
            clean = live[self.state[live] == 0]
            if clean.size:
                self.t[clean] += rng.exponential(1.0 / up, clean.size)
                self.state[clean] = 1
            hit = live[(self.state[live] == 1) & (self.t[live] < horizon)]
            if hit.size:
                t0 = self.t[hit]
                t1 = t0 + rng.exponential(1.0 / (rec + fat), hit.size)
                recover = rng.random(hit.size) < p_recover
                if math.isfinite(self.period):
                    sweep = _next_sweep(t0, self.period)
                    swept = t1 >= sweep
                    t1 = np.where(swept, sweep, t1)
                    recover |= swept
                self.t[hit] = t1
                self.state[hit] = np.where(recover, 0, 2)
                dead = hit[~recover]
                self.fail_time[dead] = t1[~recover]
            live = live[(self.state[live] < 2) & (self.t[live] < horizon)]


class _BitWords:
    """Words as ``n`` independently flipping bits; ``err`` is the faulty bit or -1."""

    def __init__(self, chain: WordChain, period: float, size: int, rng: np.random.Generator):
        self.chain = chain
        self.period = period
        self.rng = rng
        self.t = np.zeros(size)
        self.err = np.full(size, -1, dtype=np.int16)
        self.failed = np.zeros(size, dtype=bool)
        self.fail_time = np.full(size, np.inf)
        if chain.lambda_day == 0.0:
            self.t[:] = np.inf

    def advance(self, horizon: float, subset: np.ndarray | None = None) -> None:
        ch, rng = self.chain, self.rng
        n, lam, mu = ch.n, ch.lambda_day, ch.scrub_rate_day
        live = np.arange(self.t.size) if subset is None else subset
        live = live[~self.failed[live] & (self.t[live] < horizon)]
        while live.size:
            # One upset clock per bit; the earliest decides which bit flips.
            clocks = rng.exponential(1.0 / lam, (live.size, n))
            bit = np.argmin(clocks, axis=1)
            dt = clocks[np.arange(live.size), bit]
            t0 = self.t[live]
            err = self.err[live]
            faulty = err >= 0
            # A scrub that finds a clean word changes nothing, so scrub clocks
            # only matter while a bit is faulty.
            scrub_dt = np.full(live.size, np.inf)
            if mu > 0:
                scrub_dt = np.where(faulty, rng.exponential(1.0 / mu, live.size), np.inf)
            if math.isfinite(self.period):
                scrub_dt = np.minimum(scrub_dt, np.where(faulty, _next_sweep(t0, self.period) - t0, np.inf))
            scrubbed = faulty & (scrub_dt <= dt)
            step = np.where(scrubbed, scrub_dt, dt)
            t1 = t0 + step
            die = faulty & ~scrubbed & (bit != err)
            new_err = np.where(faulty, -1, bit).astype(np.int16)
            self.t[live] = t1
            self.err[live] = new_err
            dead = live[die]
            self.failed[dead] = True
            self.fail_time[dead] = t1[die]
            live = live[~self.failed[live] & (self.t[live] < horizon)]


_ENGINES = {Level.STATE: _StateWords, Level.BIT: _BitWords}


def _sim_parts(config: SimConfig) -> tuple[WordChain, float]:
    rates = canonicalize(config.system)
    chain = chain_for(config.system)
    period = rates.period_days if rates.period_days is not None else math.inf
    return chain, period


def _default_times(horizon: float, count: int = 5) -> np.ndarray:
    return horizon * np.arange(1, count + 1) / count


def _word_failure_times(config: SimConfig) -> np.ndarray:
    chain, period = _sim_parts(config)
    engine = _ENGINES[config.level]

    def run(block: int, size: int) -> np.ndarray:
        words = engine(chain, period, size, _block_rng(config.seed, _STREAM_WORD, block))
        words.advance(config.horizon)
        ft = words.fail_time
        return np.where(ft <= config.horizon, ft, np.inf)

    return np.concatenate(_map_blocks(run, _blocks(config.trials), config.workers))


def survival_from_samples(fail_times: np.ndarray, times) -> tuple[np.ndarray, np.ndarray]:
    times = np.asarray(times, dtype=float)
    surv = (fail_times[None, :] > times[:, None]).mean(axis=1)
    half = Z_SCORE * np.sqrt(surv * (1.0 - surv) / fail_times.size)
    return surv, half


def _estimate(config: SimConfig, times, keep_samples: bool) -> SurvivalEstimate:
    times = _default_times(config.horizon) if times is None else np.sort(np.asarray(times, dtype=float))
    if np.any(times < 0) or np.any(times > config.horizon):
        raise ValueError("checkpoints must lie in [0, horizon]")
    ft = _word_failure_times(config)
    surv, half = survival_from_samples(ft, times)
    failures = int(np.isfinite(ft).sum())
    warning = None
    if failures == 0:
        warning = "CI degenerate: no failures observed; increase lambda, horizon, or trials"
    return SurvivalEstimate(
        times=times,
        survival=surv,
        ci_halfwidth=half,
        trials=config.trials,
        failures=failures,
        failure_time_samples=ft if keep_samples else None,
        warning=warning,
    )


def simulate_word_state(config: SimConfig, times=None, keep_samples: bool = False) -> SurvivalEstimate:
    """Survival of one word, sampled from the three-state chain."""
    return _estimate(_with_level(config, Level.STATE), times, keep_samples)


def simulate_word_bits(config: SimConfig, times=None, keep_samples: bool = False) -> SurvivalEstimate:
    """Survival of one word, sampled bit by bit."""
    return _estimate(_with_level(config, Level.BIT), times, keep_samples)


def simulate_word(config: SimConfig, times=None, keep_samples: bool = False) -> SurvivalEstimate:
    return _estimate(config, times, keep_samples)


def _with_level(config: SimConfig, level: Level) -> SimConfig:
    if config.level is level:
        return config
    return replace(config, level=level)


def simulate_system_mttf(config: SimConfig, memory_words: int, max_extensions: int = 30) -> MttfResult:
    """MTTF of ``memory_words`` independent words, as the mean first failure.

    Trials whose words all outlive the horizon are extended by doubling it,
    at most ``max_extensions`` times.
    """
    if int(memory_words) != memory_words or not 1 <= memory_words <= 10_000:
        raise ValueError("memory_words must be an integer in [1, 10000]")
    chain, period = _sim_parts(config)
    if chain.lambda_day == 0.0:
        raise CensoredSimulationError("zero upset rate: no word ever fails")
    engine = _ENGINES[config.level]

    def run(block: int, size: int) -> np.ndarray:
        words = engine(chain, period, size * memory_words, _block_rng(config.seed, _STREAM_SYSTEM, block))
        horizon = config.horizon
        pending = np.arange(size * memory_words)
        for _ in range(max_extensions + 1):
            words.advance(horizon, pending)
            first = words.fail_time.reshape(size, memory_words).min(axis=1)
            open_trials = np.flatnonzero(first > horizon)
            if open_trials.size == 0:
                return first
            pending = (open_trials[:, None] * memory_words + np.arange(memory_words)).ravel()
            horizon *= 2.0
        raise CensoredSimulationError(
            f"{open_trials.size} trials survived past {horizon / 2:.6g} days after {max_extensions} extensions"
        )

    first = np.concatenate(_map_blocks(run, _blocks(config.trials), config.workers))
    mean = float(first.mean())
    se = float(first.std(ddof=1) / math.sqrt(first.size)) if first.size > 1 else math.inf
    return MttfResult(
        point=mean,
        lower=mean - Z_SCORE * se,
        upper=mean + Z_SCORE * se,
        method=MttfMethod.MONTE_CARLO,
        std_error=se,
        details={"trials": first.size, "memory_words": memory_words},
    )
