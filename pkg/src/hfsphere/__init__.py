"""High-frequency ergodicity and Gaussianity diagnostics for isotropic
spherical random fields."""

__version__ = "0.1.0"

from . import diagnostics, harmonics, montecarlo, spectrum, subordination, wigner
from .coefficients import CoefficientSet
from .spectrum import PowerExpModel, PowerSpectrum

__all__ = [
    "CoefficientSet",
    "PowerExpModel",
    "PowerSpectrum",
    "diagnostics",
    "harmonics",
    "montecarlo",
    "spectrum",
    "subordination",
    "wigner",
]
