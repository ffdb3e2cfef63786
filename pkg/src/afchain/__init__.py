"""Finite-antenna amplify-and-forward MIMO relay chains as random matrix
products: trajectory simulation at configurable precision, Lyapunov spectrum
estimation and closed forms, and capacity/power scaling-law verification."""

from .network import (
    NetworkConfig,
    ConstantMu,
    MuList,
    LogNormalMu,
    ConstantPower,
    GeometricPower,
    PowerList,
    simulate_trajectory,
)
from .precision import PrecisionConfig
from .rds import (
    AffineSystem,
    LyapunovSpectrum,
    affine_top_exponent,
    estimate_spectrum,
    lift_affine,
)
from .scaling import exponents_closed_form

__all__ = [
    "NetworkConfig",
    "ConstantMu",
    "MuList",
    "LogNormalMu",
    "ConstantPower",
    "GeometricPower",
    "PowerList",
    "PrecisionConfig",
    "AffineSystem",
    "LyapunovSpectrum",
    "affine_top_exponent",
    "estimate_spectrum",
    "lift_affine",
    "exponents_closed_form",
    "simulate_trajectory",
]
