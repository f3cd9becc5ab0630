"""Photon counting statistics at the dark port of a squeezed-light interferometer."""

from .errors import ConvergenceError, CutoffError, FirstOrderWarning, NumericalError
from .states import CoherentParams, Moments, PhotonDistribution, PortGeometry, SqueezeParams

__version__ = "0.1.0"

__all__ = [
    "CoherentParams",
    "ConvergenceError",
    "CutoffError",
    "FirstOrderWarning",
    "Moments",
    "NumericalError",
    "PhotonDistribution",
    "PortGeometry",
    "SqueezeParams",
]
