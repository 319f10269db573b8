import math

import numpy as np
import pytest

from memscrub.markov_kernel import WordChain, transient_roots
from memscrub.montecarlo import (
    BLOCK_SIZE,
    Z_SCORE,
    CensoredSimulationError,
    Level,
    SimConfig,
    simulate_system_mttf,
    simulate_word,
    simulate_word_bits,
    simulate_word_state,
    survival_from_samples,
)
from memscrub.params import Model, ScrubConfig
from memscrub.scrub_models import MttfMethod, mttf, mttf_chain_quadrature, word_log_curve


def fast(model=Model.DETERMINISTIC, **changes):
    """lam = 1e-3 per bit-day, n = 39, T = 0.1 day, mu = 0.001/s."""
    base = ScrubConfig(1e-3, 32, 7, 1, 8640.0, 0.001, model=model)
    return base.replace(**changes)


def two_sample_z(a, b):
    se = np.sqrt(a.survival * (1 - a.survival) / a.trials + b.survival * (1 - b.survival) / b.trials)
    return np.abs(a.survival - b.survival) / np.where(se > 0, se, np.inf)


def test_sim_config_validation():
    with pytest.raises(ValueError):
        SimConfig(fast(), trials=0, horizon=1.0)
    with pytest.raises(ValueError):
        SimConfig(fast(), trials=10, horizon=0.0)
    with pytest.raises(ValueError):
        SimConfig(fast(), trials=10, horizon=1.0, seed=-1)
    assert SimConfig(fast(), 10, 1.0, level="bit").level is Level.BIT


@pytest.mark.parametrize("level", list(Level))
def test_zero_rate_never_fails(level):
    est = simulate_word(SimConfig(fast(lambda_per_bit_day=0.0), 1000, 100.0, level=level))
    assert np.all(est.survival == 1.0)
    assert est.degenerate and "CI degenerate" in est.warning


def test_ci_halfwidth_formula():
    est = simulate_word_state(SimConfig(fast(Model.PROBABILISTIC, scrub_rate_per_second=0.0), 4000, 60.0, seed=3))
    p = est.survival
    assert np.allclose(est.ci_halfwidth, Z_SCORE * np.sqrt(p * (1 - p) / 4000))
    assert np.all((0 <= p) & (p <= 1))
    assert np.all(np.diff(est.times) > 0)


def test_survival_from_samples():
    ft = np.array([1.0, 2.0, np.inf, np.inf])
    surv, half = survival_from_samples(ft, [0.5, 1.0, 1.5, 5.0])
    assert surv.tolist() == [1.0, 0.75, 0.75, 0.5]
    assert half[0] == 0.0


def test_checkpoints_outside_horizon_rejected():
    with pytest.raises(ValueError):
        simulate_word(SimConfig(fast(), 10, 1.0), times=[2.0])


@pytest.mark.parametrize("level", list(Level))
def test_replay_is_bit_identical(level):
    cfg = SimConfig(fast(Model.MIXED), 3000, 80.0, seed=11, level=level)
    a = simulate_word(cfg, keep_samples=True)
    b = simulate_word(cfg, keep_samples=True)
    assert np.array_equal(a.failure_time_samples, b.failure_time_samples)


@pytest.mark.parametrize("level", list(Level))
def test_worker_count_does_not_change_results(level):
    trials = 2 * BLOCK_SIZE + 17
    cfg = SimConfig(fast(Model.MIXED), trials, 40.0, seed=5, level=level)
    one = simulate_word(cfg, keep_samples=True)
    four = simulate_word(SimConfig(cfg.system, trials, 40.0, seed=5, level=level, workers=4), keep_samples=True)
    assert np.array_equal(one.failure_time_samples, four.failure_time_samples)


def test_seeds_differ():
    a = simulate_word(SimConfig(fast(), 2000, 80.0, seed=1), keep_samples=True)
    b = simulate_word(SimConfig(fast(), 2000, 80.0, seed=2), keep_samples=True)
    assert not np.array_equal(a.failure_time_samples, b.failure_time_samples)


def test_single_trial_is_reproducible():
    cfg = SimConfig(fast(), 1, 1e4, seed=42)
    assert simulate_word(cfg, keep_samples=True).failure_time_samples[0] == simulate_word(cfg, keep_samples=True).failure_time_samples[0]


@pytest.mark.parametrize("model", list(Model))
def test_state_level_matches_analytic(model):
    cfg = SimConfig(fast(model), 40000, 100.0, seed=7)
    est = simulate_word_state(cfg)
    analytic = np.exp(word_log_curve(cfg.system, est.times))
    z = np.abs(est.survival - analytic) / np.sqrt(analytic * (1 - analytic) / cfg.trials)
    assert np.all(z < 4), z


def test_two_bit_word_matches_chain():
    system = ScrubConfig(0.05, 1, 1, 1, model=Model.PROBABILISTIC, scrub_rate_per_second=0.0)
    state = simulate_word_state(SimConfig(system, 30000, 40.0, seed=1))
    bits = simulate_word_bits(SimConfig(system, 30000, 40.0, seed=2))
    assert np.all(two_sample_z(state, bits) < 4)


@pytest.mark.parametrize("model", list(Model))
def test_bit_level_matches_state_level(model):
    state = simulate_word_state(SimConfig(fast(model), 20000, 100.0, seed=1))
    bits = simulate_word_bits(SimConfig(fast(model), 20000, 100.0, seed=2))
    assert np.all(two_sample_z(state, bits) < 4)


@pytest.mark.parametrize("level", list(Level))
def test_endless_period_equals_no_scrubbing(level):
    det = simulate_word(SimConfig(fast(Model.DETERMINISTIC, scrub_period_seconds=math.inf), 20000, 80.0, seed=1, level=level))
    unscrubbed = fast(Model.PROBABILISTIC, scrub_rate_per_second=0.0)
    prob = simulate_word(SimConfig(unscrubbed, 20000, 80.0, seed=2, level=level))
    assert np.all(two_sample_z(det, prob) < 4)


def test_single_word_mean_matches_quadrature():
    cfg = SimConfig(fast(Model.PROBABILISTIC, scrub_rate_per_second=0.0), 20000, 50.0, seed=9)
    r = simulate_system_mttf(cfg, 1)
    exact = mttf_chain_quadrature(WordChain(39, 1e-3, 0.0), 1).point
    assert r.method is MttfMethod.MONTE_CARLO
    assert abs(r.point - exact) < 3 * r.std_error
    assert r.lower < r.point < r.upper


def test_system_mttf_matches_renewal():
    cfg = SimConfig(fast(Model.DETERMINISTIC, memory_words=64), 4000, 100.0, seed=4)
    r = simulate_system_mttf(cfg, 64)
    assert abs(r.point - mttf(cfg.system).point) < 3.5 * r.std_error


def test_doubling_memory_halves_simulated_mttf():
    cfg = SimConfig(fast(Model.DETERMINISTIC), 4000, 100.0, seed=4)
    small = simulate_system_mttf(cfg, 32)
    big = simulate_system_mttf(cfg, 64)
    ratio_se = 2 * math.hypot(big.std_error / small.point, big.point * small.std_error / small.point**2)
    assert abs(2 * big.point / small.point - 1) < 3 * ratio_se


def test_short_horizon_is_extended():
    cfg = SimConfig(fast(Model.DETERMINISTIC), 500, 0.01, seed=4)
    r = simulate_system_mttf(cfg, 8)
    assert r.point > 0.01


def test_extension_cap():
    with pytest.raises(CensoredSimulationError):
        simulate_system_mttf(SimConfig(fast(), 50, 1e-6, seed=1), 1, max_extensions=2)


def test_system_mttf_rejects_zero_rate_and_large_memory():
    with pytest.raises(CensoredSimulationError):
        simulate_system_mttf(SimConfig(fast(lambda_per_bit_day=0.0), 10, 1.0), 4)
    with pytest.raises(ValueError):
        simulate_system_mttf(SimConfig(fast(), 10, 1.0), 10_001)
