"""Numerical laboratory for inverse mean curvature flow in HH^n.

Star-shaped hypersurfaces invariant under the Hopf S^3 action reduce to
one-dimensional radial profiles; this package evolves them by inverse
mean curvature flow, monitors the quantities that control long-time
behavior, and analyzes the sub-Riemannian conformal limit.
"""

from .ambient import (BergerParams, TangentFrame, apply_J, berger_inner,
                      curvature_tensor, hopf_frame, ricci_check, sectional,
                      verify_ambient)
from .config import ConfigError, ExperimentConfig, parse_config
from .flow import (DiagnosticsRecord, FlowState, MeanConvexityLost,
                   StepControl, StiffnessError, initial_profile,
                   integrate_sphere_ode, pde_rhs, q_evolution_rhs, run_flow,
                   sphere_ode_rhs, step)
from .geometry import (A_norm_sq, ProfileDerivatives, Q_functional,
                       RadialProfile, ShapePointData, area_element,
                       general_mean_curvature, hat_H, make_theta_grid,
                       mean_curvature_profile, mean_curvature_reduced,
                       orbit_integral, orbit_weights, profile_derivatives,
                       reduced_weight, shape_operator_adapted, sphere_volume,
                       total_volume)
from .harness import ExperimentResult, run_experiment, sweep, verify_ambient_report
from .limits import (ConformalFactor, ConstancyVerdict, constancy_verdict,
                     extract_conformal_factor, fit_decay_rate, limit_Q)

__version__ = "0.1.0"
