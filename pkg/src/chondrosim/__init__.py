"""chondrosim: a reaction-diffusion-taxis tissue-regeneration simulator.

Two diffusing cell populations (a motile, proliferating one and the
differentiated one it produces) are coupled to a non-diffusing attractant
field through uptake, saturated production, and a tactic drift of the
motile population up the attractant gradient.  The package provides the
pointwise model (:mod:`chondrosim.model`), linear stability and the
critical taxis sensitivity (:mod:`chondrosim.stability`), conservative
finite-difference operators (:mod:`chondrosim.grid`), an IMEX time stepper
with a cross-validating substituted formulation
(:mod:`chondrosim.stepper`), reproducible scenarios and file outputs
(:mod:`chondrosim.scenarios`, :mod:`chondrosim.output`,
:mod:`chondrosim.runner`), and a CLI (:mod:`chondrosim.cli`).
"""

__version__ = "0.1.0"

from .domain import Interval, Rectangle
from .errors import ConfigError, DivergenceError, ParameterError, SolveError
from .grid import FieldSet, Grid, laplacian_neumann, taxis_divergence_upwind, total_mass
from .model import (
    MesoParams,
    ModelParams,
    SteadyState,
    default_params,
    reaction_rhs,
    steady_state,
    upscale_coefficients,
)
from .scenarios import ScenarioSpec, build_initial_fields, builtin_scenario, builtin_scenarios, parse_config
from .stability import (
    CharCoeffs,
    SpectrumSpec,
    StabilityReport,
    char_coeffs,
    critical_sensitivity,
    cubic_roots,
    hopf_diagnostics,
    laplacian_eigenvalues,
    routh_hurwitz_stable,
    spectral_abscissa,
    threshold_sensitivity,
)
from .stepper import (
    BoundMonitor,
    ImexConfig,
    StepDiagnostics,
    ZFields,
    check_bounds,
    init_zfields,
    reconstruct_c1,
    run_simulation,
    step_imex,
    step_imex_z,
    suggest_dt,
)

__all__ = [
    "__version__",
    "Interval",
    "Rectangle",
    "ConfigError",
    "DivergenceError",
    "ParameterError",
    "SolveError",
    "FieldSet",
    "Grid",
    "laplacian_neumann",
    "taxis_divergence_upwind",
    "total_mass",
    "MesoParams",
    "ModelParams",
    "SteadyState",
    "default_params",
    "reaction_rhs",
    "steady_state",
    "upscale_coefficients",
    "ScenarioSpec",
    "build_initial_fields",
    "builtin_scenario",
    "builtin_scenarios",
    "parse_config",
    "CharCoeffs",
    "SpectrumSpec",
    "StabilityReport",
    "char_coeffs",
    "critical_sensitivity",
    "cubic_roots",
    "hopf_diagnostics",
    "laplacian_eigenvalues",
    "routh_hurwitz_stable",
    "spectral_abscissa",
    "threshold_sensitivity",
    "BoundMonitor",
    "ImexConfig",
    "StepDiagnostics",
    "ZFields",
    "check_bounds",
    "init_zfields",
    "reconstruct_c1",
    "run_simulation",
    "step_imex",
    "step_imex_z",
    "suggest_dt",
]
