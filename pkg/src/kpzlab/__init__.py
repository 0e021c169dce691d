"""Pseudospectral simulation and verification lab for regularized
KPZ/stochastic-Burgers dynamics on the unit torus."""

from .spectral import (
    GridField,
    SpectralField,
    derivative,
    field_allclose,
    fractional_dissipation,
    from_grid,
    project_uv,
    to_grid,
)
from .nonlinearity import (
    BATTERY,
    GaussianL2Report,
    HermiteExpansion,
    NonlinearitySpec,
    QuadratureDivergence,
    effective_beta,
    gaussian_l2_check,
    get_nonlinearity,
    hermite_coefficients,
)
from .initial_data import (
    ConditionedBridgeConfig,
    ConditionedBridgeSample,
    DecompositionPair,
    TARGETS,
    TargetProfile,
    TubeTooUnlikelyError,
    decompose_initial,
    get_target,
    sample_bridge,
    sample_conditioned_bridge,
    sample_conditioned_bridges,
    uniform_distance,
)
from .dynamics import (
    CoupledState,
    NoisePath,
    SimulationConfig,
    TrajectoryBlowup,
    TrajectoryEnsemble,
    boltzmann_gibbs_sum,
    simulate,
    step_burgers,
    step_kpz_pair,
    suggested_dt_bound,
)
from .cole_hopf import (
    PositivityError,
    SheState,
    cole_hopf_height,
    coupled_tube_bound,
    step_she,
)
from .measures import (
    DecayFit,
    EntropyReport,
    FiniteMeasure,
    ProbeFamily,
    contraction_check,
    default_probe_family,
    entropy_inequality_bound,
    fit_exponential_decay,
    gaussian_mode_kl,
    relative_entropy,
    trig_probe,
    wasserstein_coupled_bound,
)

__version__ = "0.1.0"
