"""
Reliability of a single SEC-DED word
====================================

A word of n = w + c bits fails once two of its bits are wrong at the same
time. This walks through the three-state chain, its two decay rates, and why
the failure probability is evaluated without ever forming 1 - r.
"""

import numpy as np

from memscrub import WordChain, transient_roots, word_failure, word_reliability
from memscrub.markov_kernel import ode_trajectory

# A 32-bit word with 7 check bits, 1e-5 upsets per bit per day,
# read back by the program on average every 10 seconds.
chain = WordChain(n=39, lambda_day=1e-5, scrub_rate_day=8640.0)
print(chain.generator())

# The survival curve mixes two exponentials. a1 is the fast rate at which a
# single error is repaired, a2 the slow rate at which the word dies.
roots = transient_roots(chain)
print(f"a1 = {roots.a1:.6g}/day   a2 = {roots.a2:.6g}/day")

# Over one day the word almost surely survives. 1 - r is ~1.7e-11 and
# would lose most of its digits if computed as a difference.
t = np.array([10 / 86400, 1.0, 365.0])
rel = word_reliability(roots, t)
naive = 1.0 - rel.r
for ti, f, nv in zip(t, rel.failure, naive):
    print(f"t = {ti:10.6g} d   1 - r = {f:.12e}   naive = {nv:.12e}")

# Cross-check against a plain Runge-Kutta run of the forward equations. The
# step has to resolve the fast rate a1, so keep the run to the first day.
states = ode_trajectory(chain, t[:2], step=1e-5)
print("max |closed - ode| =", max(abs(r - s.reliability) for r, s in zip(rel.r, states)))

# Without scrubbing the same word fails within a few decades.
bare = transient_roots(WordChain(39, 1e-5))
print("no scrubbing, 1 - r(1 year) =", word_failure(bare, 365.0))
