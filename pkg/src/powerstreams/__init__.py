"""Shape-parameterised stream decompositions of lattice, ODE and PDE models."""

__version__ = "0.1.0"

from .exppoly import BetaMismatchError, ExpPoly, SupportExplosionError, solve_stream_step
from .lattice import (
    Boundary,
    LatticeConfig,
    LatticeStreamTable,
    build_stream_table,
    closed_form_coeff,
    evaluate_solution,
    poisson_tail_bound,
    truncation_bound,
)
from .pde import (
    DirichletSpec,
    Field,
    LinearPdeSpec,
    burgers_cascade,
    dirichlet_solution_eval,
    linear_solution_eval,
    linear_stream_eval,
)
from .scalar_ode import (
    QuadOdeSpec,
    StreamList,
    decompose_linear_time_coeff,
    decompose_quadratic,
    log_series_eval,
    log_series_stream,
)
from .spatial import DerivOracle, SpacePoly, TrigPoly
from .stochastic import EnsembleResult, SimConfig, ensemble_average, run_replicate

__all__ = [
    "BetaMismatchError",
    "Boundary",
    "DerivOracle",
    "DirichletSpec",
    "EnsembleResult",
    "ExpPoly",
    "Field",
    "LatticeConfig",
    "LatticeStreamTable",
    "LinearPdeSpec",
    "QuadOdeSpec",
    "SimConfig",
    "SpacePoly",
    "StreamList",
    "SupportExplosionError",
    "TrigPoly",
    "build_stream_table",
    "burgers_cascade",
    "closed_form_coeff",
    "decompose_linear_time_coeff",
    "decompose_quadratic",
    "dirichlet_solution_eval",
    "ensemble_average",
    "evaluate_solution",
    "linear_solution_eval",
    "linear_stream_eval",
    "log_series_eval",
    "poisson_tail_bound",
    "run_replicate",
    "log_series_stream",
    "solve_stream_step",
    "truncation_bound",
]
