"""Monte Carlo laboratory for planar walks with polynomial self-interaction drift.

Two model families live here: the drift walk Z = (X, Y) whose horizontal
jumps follow kappa = rho |y|^gamma / ((1+x)^alpha (1+n)^beta), and the
unit-step walk repelled from its running barycenter.  The library verifies
predicted scaling exponents statistically and exact per-step invariants
deterministically; the ``walklab`` CLI exposes the same machinery.
"""

from .barycentric import (
    BarycentricDiagnostics,
    BarycentricTrajectory,
    Geometry,
    Observables,
    geometry,
    mean_drift,
    observables,
    sample_increment,
    simulate_barycentric_path,
    update_center,
)
from .drift import (
    DriftTrajectory,
    InvariantViolationError,
    Outcome,
    OverflowAbortError,
    TransitionLaw,
    example1_law,
    kappa,
    lattice_product_law,
    law_for,
    params_for_variant,
    simulate_drift_path,
    step,
)
from .exponents import (
    ModelParams,
    ThetaDivergenceError,
    ThetaIteration,
    chi,
    chi_ladder,
    confinement_constant,
    contraction_rate,
    is_superdiffusive,
    theta_iterate,
    theta_next,
    zeta,
    zeta_bound,
)
from .harness import BARYCENTRIC_CHI, EnsembleResult, RunConfig, run_ensemble
from .rng import DEFAULT_MASTER_SEED, RngStream, new_stream, uniform_signed, uniform_unit
from .stats import (
    BinSpec,
    EnsembleSummary,
    InsufficientDataError,
    PathSummary,
    RegressionResult,
    gamma_path_sum,
    log_checkpoints,
    loglog_slope,
    merge_summaries,
    moment_band_check,
    running_max,
    slope_histogram,
)

__version__ = "0.1.0"
