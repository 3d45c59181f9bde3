"""Coupled stochastic Allen-Cahn equations on the line: simulation and verification.

The system is ``dm_i = (½ m_i'' - V'(m_i) + λ(m_j - m_i)) dt + dW_i`` with
``V'(m) = m³ - m``, solved in mild form with the heat kernel of ``∂_t - ½∂_xx``
and localized by a finite-volume cutoff ``Λ``.
"""
from .analysis import (POSITIVITY_FAMILY, check_monotonicity, check_positivity_lemma,
                       cutoff_cauchy_study, decay_profile, fit_decay_slope, solver_consistency_study,
                       uniform_lp_study, uniqueness_check)
from .config import RunConfig, emit_config, load_config, parse_config
from .dynamics import (ModelParams, compute_K, compute_T0, drift, forcing, picard_continue, picard_solve,
                       simulate, simulate_single, step_mild)
from .errors import ConfigurationError, DomainError, InvariantViolationError, NonConvergenceError
from .grid import CutoffSpec, Grid, Trajectory
from .kernel import apply_heat, eval_kernel, kernel_lp_norm, spacetime_convolve
from .noise import (estimate_Z_covariance, isometry_variance, sample_white_noise, stochastic_convolution,
                    zero_noise)
from .spaces import (WeightedMeasure, bound_heat_operator_norm, norm_c_alpha_space, norm_c_alpha_spacetime,
                     norm_lp_mu)

__version__ = "0.1.0"
