"""Spectral construction, exact autocovariances, and Gaussian simulation of
the Hardy-Rogosinski long-memory process."""

from .angles import RationalAngle, cospi_frac, sinpi_frac
from .kernels import (
    CoeffSeries,
    dirichlet_eval,
    dirichlet_eval_huge,
    fejer_eval,
    fejer_eval_huge,
    partial_sum,
)
from .hardy import (
    HardyLevel,
    OmegaHit,
    build_level,
    build_surrogate_level,
    en_measure_estimate,
    en_measure_lower_bound,
    level_summary,
    omega_membership,
    phi_coeff,
    phi_eval,
    truncated_sum_closed,
)
from .spectral import (
    AutocovRecord,
    Block,
    BlockChain,
    ChainInvariantError,
    DivergenceCertificate,
    SizeError,
    block_boundary_sum,
    build_chain,
    chain_manifest,
    density_eval,
    divergence_certificate,
    fhat,
    gamma,
    log_integral,
    partial_fourier_sum,
)
from .sim import (
    EmpiricalAcov,
    SimConfig,
    TrajectoryBatch,
    compare_report,
    empirical_acov,
    simulate,
    toeplitz_cov,
)

__version__ = "0.1.0"
