"""Exact model spectra and certified checks of universal eigenvalue bounds."""

from .bessel import bessel_j, bessel_zero, bessel_zeros
from .cheng_yang import C0, CYState, a_constant, cy_recursion_check, cy_state, cy_upper_bound, yang_quadratic_upper
from .reports import BoundReport
from .riesz_heat import (
    HeatQuery,
    RieszQuery,
    berezin_check,
    kac_check,
    legendre_transform,
    partition_function,
    riesz_iteration,
    riesz_mean,
)
from .spectra import (
    DomainSpec,
    Spectrum,
    ball_spectrum,
    box_spectrum,
    load_spectrum,
    projective_spectrum,
    save_spectrum,
    sphere_spectrum,
)
from .universal_bounds import ShiftContext

__version__ = "0.1.0"

__all__ = [
    "bessel_j",
    "bessel_zero",
    "bessel_zeros",
    "C0",
    "CYState",
    "a_constant",
    "cy_recursion_check",
    "cy_state",
    "cy_upper_bound",
    "yang_quadratic_upper",
    "BoundReport",
    "HeatQuery",
    "RieszQuery",
    "berezin_check",
    "kac_check",
    "legendre_transform",
    "partition_function",
    "riesz_iteration",
    "riesz_mean",
    "DomainSpec",
    "Spectrum",
    "ball_spectrum",
    "box_spectrum",
    "load_spectrum",
    "projective_spectrum",
    "save_spectrum",
    "sphere_spectrum",
    "ShiftContext",
]
