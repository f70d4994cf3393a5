"""Spectral verification toolkit for symmetric pure-jump processes.

Periodic-grid semigroups, nonlocal square functions, Fourier
multipliers synthesized from jump modulators, and Monte Carlo
cross-checks of the underlying martingale identities.
"""

from .config import RunConfig, load_config, loads_config, dumps_config
from .errors import (ConfigError, CostGuardError, DomainError,
                     ParameterError, ResolutionError, StructuralError,
                     UnsupportedOperationError)
from .hardy_stein import F, F_eps, PExponent, hardy_stein_rhs
from .jumps import TorusJumpScheme, build_torus_scheme
from .models import (JumpQuadrature, LevyMeasureModel,
                     build_jump_quadrature, stable_constant,
                     symbol_closed_form, symbol_quadrature)
from .reports import SuiteResult, VerificationReport, to_json
from .spectral import (Grid, GridFunction, SpectrumFunction, SymbolGrid,
                       TimeQuadrature, auto_t_max, build_symbol_grid,
                       build_time_quadrature, forward_transform,
                       inverse_transform, semigroup_apply,
                       transition_density)
from .square_fn import (square_G, square_Gstar, square_Gtilde,
                        isometry_check, norm_equivalence_report)
from .multiplier import (Modulator, MultiplierSymbol, apply_multiplier,
                         symbol_from_phi)
from .suites import gaussian_family, run_suite, run_suites

__version__ = "0.1.0"

__all__ = [
    "RunConfig", "load_config", "loads_config", "dumps_config",
    "ConfigError", "CostGuardError", "DomainError", "ParameterError",
    "ResolutionError", "StructuralError", "UnsupportedOperationError",
    "F", "F_eps", "PExponent", "hardy_stein_rhs",
    "TorusJumpScheme", "build_torus_scheme",
    "JumpQuadrature", "LevyMeasureModel", "build_jump_quadrature",
    "stable_constant", "symbol_closed_form", "symbol_quadrature",
    "SuiteResult", "VerificationReport", "to_json",
    "Grid", "GridFunction", "SpectrumFunction", "SymbolGrid",
    "TimeQuadrature", "auto_t_max", "build_symbol_grid",
    "build_time_quadrature", "forward_transform", "inverse_transform",
    "semigroup_apply", "transition_density",
    "square_G", "square_Gstar", "square_Gtilde", "isometry_check",
    "norm_equivalence_report",
    "Modulator", "MultiplierSymbol", "apply_multiplier", "symbol_from_phi",
    "gaussian_family", "run_suite", "run_suites",
    "__version__",
]
