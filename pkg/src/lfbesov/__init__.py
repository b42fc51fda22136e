"""Exact harmonic analysis on local fields F_q((t)): step functions, Fourier
transform, Littlewood-Paley blocks, Besov norms, dilation and localization."""

__version__ = "0.1.0"

from .besov import (
    BesovParams,
    LPDecomposition,
    besov_norm,
    check_a_gamma_condition,
    delta_j,
    hs2_norm,
    lp_decompose,
    phi_j,
    ptype_derivative,
    sigma_r,
)
from .field import (
    CosetId,
    FieldElement,
    FieldParams,
    PrecisionError,
    coset_reps,
    fe_abs,
    fe_arith,
    field_init,
    format_element,
    parse_element,
)
from .fourier import apply_multiplier, fourier, inverse_fourier
from .functions import (
    BallSpec,
    StepFunction,
    ball_indicator,
    character_eval,
    haar_measure,
    lr_norm,
    step_algebra,
    step_eval,
    step_translate,
)
from .operators import (
    DilationRecord,
    dilate,
    dilation_bound_check,
    localization_bound_check,
    localization_centers,
    localize,
    prop42_check,
)
