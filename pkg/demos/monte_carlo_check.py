"""
Checking the analytic model by simulation
=========================================

At realistic upset rates a word fails with probability ~1e-15 per sweep,
far too rare to simulate. The chain only depends on rates times time, so we
raise lambda to 1e-3 per bit-day and compare the simulation against the same
formulas at that scale.
"""

import numpy as np

from memscrub import Model, ScrubConfig
from memscrub.montecarlo import SimConfig, simulate_system_mttf, simulate_word_bits, simulate_word_state
from memscrub.scrub_models import mttf, word_log_curve

word = ScrubConfig(1e-3, 32, 7, 1, scrub_period_seconds=8640.0, model=Model.DETERMINISTIC)

# State level: walk the three-state chain directly.
sim = SimConfig(word, trials=200_000, horizon=135.0, seed=1)
est = simulate_word_state(sim)
exact = np.exp(word_log_curve(word, est.times))
print("t (days)   simulated   analytic   z")
for t, s, a in zip(est.times, est.survival, exact):
    z = (s - a) / np.sqrt(a * (1 - a) / sim.trials)
    print(f"{t:8.1f}   {s:.5f}    {a:.5f}   {z:+.2f}")

# Bit level: every bit has its own upset clock, so the Markov abstraction
# itself is under test.
bits = simulate_word_bits(SimConfig(word, trials=50_000, horizon=135.0, seed=2))
print("bit-level survival:", np.round(bits.survival, 5))

# A 64-word memory: mean time to the first word failure.
system = word.replace(memory_words=64)
r = simulate_system_mttf(SimConfig(system, trials=5000, horizon=100.0, seed=3), 64)
print(f"simulated MTTF {r.point:.2f} +/- {r.std_error:.2f} days, analytic {mttf(system).point:.2f} days")
