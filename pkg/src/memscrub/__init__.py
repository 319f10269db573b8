"""Reliability and MTTF of SEC-DED memories under probabilistic, deterministic and mixed scrubbing."""

from .markov_kernel import (
    StateDistribution,
    TransientRoots,
    WordChain,
    build_chain,
    chain_for,
    ode_oracle,
    ode_trajectory,
    transient_roots,
    word_error_rate,
    word_failure,
    word_log_reliability,
    word_reliability,
)
from .montecarlo import (
    Level,
    SimConfig,
    SurvivalEstimate,
    simulate_system_mttf,
    simulate_word,
    simulate_word_bits,
    simulate_word_state,
)
from .numerics import QuadratureResult, adaptive_integrate, safe_complement, stable_quadratic_roots
from .params import (
    CanonicalRates,
    ConfigError,
    Model,
    ScrubConfig,
    canonicalize,
    sec_ded_check_bits,
    words_from_megabytes,
)
from .scrub_models import (
    BelowResolutionError,
    DivergentMttfError,
    MttfMethod,
    MttfResult,
    NumericalFailure,
    compare_models,
    mttf,
    mttf_bounds,
    mttf_probabilistic_closed,
    mttf_quadrature_probabilistic,
    mttf_renewal_exact,
    renewal_word_log_reliability,
    system_curve,
    system_log_reliability,
)

__version__ = "0.1.0"
