"""Anti-integrable limit toolkit for 3D quadratic diffeomorphisms.

Library plus batch CLI: AI-state construction from symbol words,
contraction-region and maps-into-region computation over the (r, c)
parameter plane, attractor-classification scans over (alpha, r), and
pseudo-arclength continuation of AI states into periodic orbits of the
full map.
"""

__version__ = "0.1.0"

from .core import (ConicClass, MapParams, RescaledParams, State3,
                   classify_conic, conic_center, difference_step,
                   fixed_points_ai, map_forward, map_inverse,
                   rescaled_residual)
from .correspondence import (AIState, Direction, IntervalB, ai_backward,
                             ai_backward_derivative, ai_forward,
                             ai_forward_derivative, ai_state_from_symbols,
                             beta_for, verify_maps_into, xi_max)
from .continuation import (Branch, BranchPoint, ContinuationConfig,
                           PeriodicState, Termination, continue_branch,
                           corrector, detect_turning_points, double_sequence,
                           doubling_curve_alpha, initial_tangent, jacobian_G,
                           next_tangent, residual_G)
from .regions import (ParamGrid, RegionMask, analytic_RA_backward,
                      analytic_RA_forward, compute_RA, compute_Rn,
                      cubic_C_roots, derivative_norm_estimate,
                      hausdorff_distance)
from .scan import (OrbitClass, ScanCell, ScanConfig, ScanGrid, ScanResult,
                   attractor_scan, classify_cell, close_returns,
                   fixed_point_x_minus, max_lyapunov, symbols_from_orbit)
from .symbols import SymbolSequence

__all__ = [
    "__version__",
    "AIState", "Branch", "BranchPoint", "ConicClass", "ContinuationConfig",
    "Direction", "IntervalB", "MapParams", "OrbitClass", "ParamGrid",
    "PeriodicState", "RegionMask", "RescaledParams", "ScanCell", "ScanConfig",
    "ScanGrid", "ScanResult", "State3", "SymbolSequence", "Termination",
    "ai_backward", "ai_backward_derivative", "ai_forward",
    "ai_forward_derivative", "ai_state_from_symbols", "analytic_RA_backward",
    "analytic_RA_forward", "attractor_scan", "beta_for", "classify_cell",
    "classify_conic", "close_returns", "compute_RA", "compute_Rn",
    "conic_center", "continue_branch", "corrector", "cubic_C_roots",
    "derivative_norm_estimate", "detect_turning_points", "difference_step",
    "double_sequence", "doubling_curve_alpha", "fixed_point_x_minus",
    "fixed_points_ai", "hausdorff_distance", "initial_tangent", "jacobian_G",
    "map_forward", "map_inverse", "max_lyapunov", "next_tangent",
    "rescaled_residual", "residual_G", "symbols_from_orbit",
    "verify_maps_into", "xi_max",
]
