"""Pseudospectral solver for the sub-critical dissipative quasi-geostrophic
equation, with X^sigma norm diagnostics and checks of the small-data
inequality and long-time decay of the critical norm."""

from .diagnostics import (
    DecayVerdict,
    InequalityReport,
    NormRecord,
    NormSeries,
    chi_norm,
    decay_summary,
    l2_norm,
    scaling_invariance_check,
    theorem1_functional,
)
from .dynamics import (
    BlowUpError,
    SimParams,
    SimState,
    cfl_dt,
    exact_decay_reference,
    nonlinear_term,
    simulate,
    step_ifrk4,
)
from .initdata import InitSpec, build, rescale_to_norm
from .spectral import (
    CorruptFieldError,
    Grid,
    SpectralField,
    VelocityField,
    apply_fractional_power,
    dealias,
    forward_transform,
    gradient,
    inverse_transform,
    velocity_from_theta,
)

__version__ = "0.1.0"
