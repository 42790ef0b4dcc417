"""Globally convergent, modulus-decreasing Newton iteration for complex
polynomials, with a near-critical bypass, a certified quadratic tail,
deflation-based all-roots solving, and basin rendering.

Hot kernels run in a compiled extension when available, with a pure-Python
fallback selected at import time (see ``backend_name``).
"""

from ._backend import backend_name
from .errors import (
    AtRootError,
    ConvergenceFailure,
    CriticalPointError,
    ModulusReductionError,
    NonFiniteError,
)
from .poly import (
    DerivativeTable,
    Polynomial,
    amplitude,
    deflate,
    evaluate,
    format_complex,
    modulus_squared,
    normalized_derivatives,
    parse_complex,
    parse_poly,
    poly_from_json,
    poly_to_json,
    root_radius,
)
from .render import BasinGrid, Window, grid_to_rgb, palette_colors, render_basins, write_image
from .rnm import (
    ZERO_REL_TOL,
    Orbit,
    StepInfo,
    Termination,
    decrement_bound,
    descent_data,
    k_index,
    modified_k_index,
    orbit_to_csv,
    robust_step,
    run_modified_rnm,
    run_rnm,
)
from .roots import (
    RootSet,
    critical_points,
    critical_threshold,
    solve_all,
    solve_cubic,
    solve_quadratic,
)
from .smale import (
    ALPHA0,
    AlphaReport,
    HybridResult,
    alpha_test,
    hybrid_solve,
    newton_step,
    run_newton,
)
from .verify import run_verification

__version__ = "0.1.0"

__all__ = [
    "ALPHA0",
    "AlphaReport",
    "AtRootError",
    "BasinGrid",
    "ConvergenceFailure",
    "CriticalPointError",
    "DerivativeTable",
    "HybridResult",
    "ModulusReductionError",
    "NonFiniteError",
    "Orbit",
    "Polynomial",
    "RootSet",
    "StepInfo",
    "Termination",
    "Window",
    "ZERO_REL_TOL",
    "alpha_test",
    "amplitude",
    "backend_name",
    "critical_points",
    "critical_threshold",
    "decrement_bound",
    "deflate",
    "descent_data",
    "evaluate",
    "format_complex",
    "grid_to_rgb",
    "hybrid_solve",
    "k_index",
    "modified_k_index",
    "modulus_squared",
    "newton_step",
    "normalized_derivatives",
    "orbit_to_csv",
    "palette_colors",
    "parse_complex",
    "parse_poly",
    "poly_from_json",
    "poly_to_json",
    "render_basins",
    "robust_step",
    "root_radius",
    "run_modified_rnm",
    "run_newton",
    "run_rnm",
    "run_verification",
    "solve_all",
    "solve_cubic",
    "solve_quadratic",
    "write_image",
    "__version__",
]
