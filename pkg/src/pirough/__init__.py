"""Signatures graded by a per-letter regularity vector, their controls, and the
step-N Taylor expansion of rough differential equations, checked numerically."""

from __future__ import annotations

from .control import ControlGrid, control_omega, split_by_control, word_variation
from .errors import (
    CapError,
    ConfigError,
    DomainExitError,
    InadmissibleError,
    InvalidWordError,
    PiRoughError,
    UnsupportedGradingError,
)
from .fields import ExpDecay, Linear, Polynomial, Trig, VectorField, compose_F, lip_norm_estimate, rotation
from .group import GroupSeries, chen_product, dilate, exp_series, homogeneous_norm, inverse, log_series, shuffle_defect
from .lift import GridSignal, PLPath, lift_on_grid, path_signature, rescale_signal, synthetic_group_path
from .params import TaylorParams, admissible_params, beta_constant
from .taylor import (
    euler_bound,
    euler_increment,
    ode_solve,
    remainder,
    remainder_bound,
    remainder_reports,
    step_scheme,
    taylor_increment,
)
from .words import PiIndex, concat, degree, enumerate_words, shuffle, theta, weight

__version__ = "0.1.0"
