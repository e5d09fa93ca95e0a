"""Renormalised stochastic Allen-Cahn metastability toolkit.

Simulates the spectral Galerkin approximation of the Wick-renormalised
stochastic Allen-Cahn equation on the 2D torus, and estimates mean
transition times three independent ways: direct path simulation,
potential-theoretic capacity / partition-function Monte Carlo, and the sharp
small-noise prediction with its Carleman-Fredholm regularised prefactor.
"""

from .dynamics import (
    HitSets,
    SimConfig,
    TransitionSample,
    membership,
    sample_transition_times,
    simulate_trajectory,
    step,
)
from .errors import BlowUpError, ConfigError, InvalidEstimateError
from .estimators import (
    CapacityBounds,
    EkPrediction,
    LogEstimate,
    capacity_lower_mc,
    capacity_upper_mc,
    ek_theory,
    escape_probability,
    expected_time_pt,
    oracle_1d,
    partition_lower_mc,
    partition_upper,
)
from .field import (
    FieldCoeffs,
    RealField,
    constant_field,
    cubic_projected,
    decompose,
    from_real,
    single_mode,
    sobolev_norm,
    to_real,
    zero_field,
)
from .gff import (
    McEstimate,
    MeasureSpec,
    covariance_sum_exact,
    expect_functional,
    gamma_measure,
    gamma_perp0,
    gamma_perp_z0,
    gamma_plus,
    nelson_moment_check,
    philox_stream,
    sample,
    wick_integral,
)
from .potential import (
    PerpDecomposition,
    decompose_perp,
    decompose_plus,
    drift,
    h_plus,
    k_factor,
    value,
    w_mu,
)
from .spectra import (
    DomainSpec,
    ModeIndex,
    SpectralConstants,
    det2_diagonal,
    eigenvalue,
    ek_prefactor,
    nu,
    renorm_constants,
)
from .wick import GaussianVector, hermite, hermite_reconstant, hermite_shift, wick_moment_oracle

__version__ = "0.1.0"
