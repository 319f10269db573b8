"""Three-state continuous-time Markov chain of a single SEC-DED word.

States: S0 (no error), S1 (one correctable error), S2 (two co-existing
errors, absorbing failure). From S0 any of the ``n`` bits can flip
(rate ``n*lam``). From S1 the word returns to S0 when the faulty bit flips
back (rate ``lam``) or when it is scrubbed (rate ``mu``), and fails when any
of the other ``n - 1`` bits flips.

The survival function of a word over one scrub-free stretch is a mix of two
exponentials whose decay rates are the roots ``a1 >= a2`` of
``s**2 - (2*lam*n + mu)*s + lam**2*n*(n-1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .numerics import stable_quadratic_roots, sweep_kernel
from .params import CanonicalRates, ConfigError, Model, ScrubConfig, canonicalize


@dataclass(frozen=True)
class WordChain:
    n: int
    lambda_day: float
    scrub_rate_day: float = 0.0

    def __post_init__(self):
        if self.n < 2:
            raise ConfigError(f"degenerate word: n = {self.n} < 2")
        if not self.lambda_day >= 0 or not self.scrub_rate_day >= 0:
            raise ConfigError("chain rates must be non-negative")

    @property
    def upset_rate(self) -> float:
        """S0 -> S1."""
        return self.lambda_day * self.n

    @property
    def recovery_rate(self) -> float:
        """S1 -> S0: self-healing flip of the faulty bit plus access scrubbing."""
        return self.lambda_day + self.scrub_rate_day

    @property
    def fatal_rate(self) -> float:
        """S1 -> S2."""
        return self.lambda_day * (self.n - 1)

    def generator(self) -> np.ndarray:
        """Row-convention generator over (S0, S1, S2); rows sum to zero."""
        up, rec, fat = self.upset_rate, self.recovery_rate, self.fatal_rate
        return np.array([
            [-up, up, 0.0],
            [rec, -(rec + fat), fat],
            [0.0, 0.0, 0.0],
        ])


@dataclass(frozen=True)
class TransientRoots:
    a1: float
    a2: float
    gap: float  # a1 - a2, computed without subtraction

    @property
    def degenerate(self) -> bool:
        """True when the word can never fail (zero upset rate)."""
        return self.a2 == 0.0


@dataclass(frozen=True)
class StateDistribution:
    p0: float
    p1: float
    p2: float

    @property
    def reliability(self) -> float:
        return self.p0 + self.p1


@dataclass(frozen=True)
class WordReliability:
    """``r`` with its complement ``failure = 1 - r`` and ``log_r``, each computed directly."""

    r: np.ndarray | float
    failure: np.ndarray | float
    log_r: np.ndarray | float


def word_error_rate(lambda_day: float, w: int, c: int) -> float:
    return lambda_day * (w + c)


def build_chain(model: Model | str, rates: CanonicalRates) -> WordChain:
    model = Model.parse(model)
    if model.uses_access_scrub:
        if rates.mu_day is None:
            raise ConfigError(f"{model.value} chain needs an access scrub rate")
        mu = rates.mu_day
    else:
        mu = 0.0
    return WordChain(n=rates.total_bits_n, lambda_day=rates.lambda_day, scrub_rate_day=mu)


def chain_for(config: ScrubConfig) -> WordChain:
    return build_chain(config.model, canonicalize(config))


def transient_roots(chain: WordChain) -> TransientRoots:
    lam, n, mu = chain.lambda_day, chain.n, chain.scrub_rate_day
    if lam == 0.0:
        return TransientRoots(a1=mu, a2=0.0, gap=mu)
    total = 2.0 * lam * n + mu
    product = lam * lam * n * (n - 1)
    a1, a2 = stable_quadratic_roots(total, product)
    # Every term of mu**2 + 4*lam*n*(mu + lam) is positive, unlike sum**2 - 4*product.
    gap = math.sqrt(mu * mu + 4.0 * lam * n * (mu + lam))
    return TransientRoots(a1=a1, a2=a2, gap=gap)


def _check_time(t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if np.any(t < 0) or np.any(np.isnan(t)):
        raise ValueError("time must be non-negative")
    return t


def _direct_log_reliability(roots: TransientRoots, t: np.ndarray) -> np.ndarray:
    # log r0 = -a2 t + log(a1 - a2 exp(-(a1 - a2) t)) - log(a1 - a2); accurate once F0 is not small
    return -roots.a2 * t + np.log(roots.a1 - roots.a2 * np.exp(-roots.gap * t)) - math.log(roots.gap)


def _failure_and_log(roots: TransientRoots, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    tt = np.atleast_1d(t)
    if roots.degenerate:
        zeros = np.zeros_like(tt)
        return zeros, zeros.copy()
    a1, a2 = roots.a1, roots.a2
    diff = a1 * sweep_kernel(a1 * tt) - a2 * sweep_kernel(a2 * tt)
    f = np.clip(a1 * a2 * tt * tt * diff / roots.gap, 0.0, 1.0)
    with np.errstate(divide="ignore"):
        log_r = np.log1p(-f)
    far = f >= 0.5
    if np.any(far):
        log_r[far] = _direct_log_reliability(roots, tt[far])
        f[far] = -np.expm1(log_r[far])
    return f, log_r


def _shape(values: np.ndarray, t: np.ndarray):
    return values.reshape(t.shape) if t.ndim else float(values[0])


def word_failure(roots: TransientRoots, t) -> np.ndarray | float:
    """``1 - r0(t)`` evaluated without forming ``r0``.

    While F0 < 1/2 this uses
    ``F0 = a1*a2*t**2 * (a1*g(a1*t) - a2*g(a2*t)) / (a1 - a2)`` with
    ``g(x) = (x - 1 + exp(-x)) / x**2``, which keeps full relative precision
    down to F0 ~ 1e-300 where the textbook two-exponential form returns
    rounding noise. Beyond that the two-exponential form is the accurate one.
    """
    t = _check_time(t)
    return _shape(_failure_and_log(roots, t)[0], t)


def word_log_reliability(roots: TransientRoots, t) -> np.ndarray | float:
    t = _check_time(t)
    return _shape(_failure_and_log(roots, t)[1], t)


def word_reliability(roots: TransientRoots, t) -> WordReliability:
    """Survival of one word over a scrub-free stretch of length ``t`` days."""
    t = _check_time(t)
    failure, log_r = _failure_and_log(roots, t)
    return WordReliability(r=_shape(np.exp(log_r), t), failure=_shape(failure, t), log_r=_shape(log_r, t))


def _rk4_run(chain: WordChain, p: tuple[float, float, float], duration: float, step: float):
    up, rec, fat = chain.upset_rate, chain.recovery_rate, chain.fatal_rate

    def deriv(p0, p1):
        return (-up * p0 + rec * p1, up * p0 - (rec + fat) * p1, fat * p1)

    if duration <= 0:
        return p
    steps = max(1, math.ceil(duration / step))
    h = duration / steps
    p0, p1, p2 = p
    for _ in range(steps):
        k1 = deriv(p0, p1)
        k2 = deriv(p0 + 0.5 * h * k1[0], p1 + 0.5 * h * k1[1])
        k3 = deriv(p0 + 0.5 * h * k2[0], p1 + 0.5 * h * k2[1])
        k4 = deriv(p0 + h * k3[0], p1 + h * k3[1])
        p0 += h / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        p1 += h / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
        p2 += h / 6.0 * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2])
    return p0, p1, p2


def ode_trajectory(chain: WordChain, times, step: float) -> list[StateDistribution]:
    """Classical RK4 integration of the forward equations from S0.

    ``times`` are visited in increasing order in a single pass; each segment
    uses the largest step not exceeding ``step`` that divides it evenly.
    Check the step by halving it: the answers should agree to the accuracy
    you need.
    """
    if not step > 0:
        raise ValueError(f"step must be positive, got {step}")
    times = [float(x) for x in _check_time(np.atleast_1d(times))]
    order = sorted(range(len(times)), key=times.__getitem__)
    out: list[StateDistribution | None] = [None] * len(times)
    p = (1.0, 0.0, 0.0)
    now = 0.0
    for i in order:
        p = _rk4_run(chain, p, times[i] - now, step)
        now = times[i]
        out[i] = StateDistribution(*p)
    return out  # type: ignore[return-value]


def ode_oracle(chain: WordChain, t: float, step: float) -> StateDistribution:
    return ode_trajectory(chain, [t], step)[0]
