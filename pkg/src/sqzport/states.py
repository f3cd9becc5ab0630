"""Physical input parameters and the output containers shared by all engines.

Conventions: angles are radians; ``alpha = |alpha| e^{i phi}`` is the laser
amplitude in input port 1, ``zeta = r e^{i theta}`` the squeeze parameter of
the vacuum injected into input port 2, and ``gamma`` the splitter angle.  The
dark port is output port 1 with ``gamma = pi/2 - delta``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .numkit import wrap_phase

__all__ = [
    "CoherentParams",
    "SqueezeParams",
    "PortGeometry",
    "PhotonDistribution",
    "Moments",
    "DerivedQuantities",
    "derived_quantities",
]

TWO_PI = 2.0 * math.pi


def _normalize_angle(x: float) -> float:
    y = math.fmod(float(x), TWO_PI)
    if y < 0:
        y += TWO_PI
    # fmod can land exactly on 2*pi after the shift for tiny negative input
    return 0.0 if y >= TWO_PI else y


@dataclass(frozen=True)
class CoherentParams:
    """Coherent amplitude ``alpha = magnitude * exp(i * phase)``."""

    magnitude: float
    phase: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.magnitude) or self.magnitude < 0:
            raise ValueError(f"coherent magnitude must be finite and >= 0, got {self.magnitude}")
        if not math.isfinite(self.phase):
            raise ValueError("coherent phase must be finite")
        object.__setattr__(self, "magnitude", float(self.magnitude))
        object.__setattr__(self, "phase", _normalize_angle(self.phase))

    @classmethod
    def from_complex(cls, alpha: complex) -> "CoherentParams":
        return cls(abs(alpha), cmath.phase(alpha))

    @property
    def value(self) -> complex:
        return cmath.rect(self.magnitude, self.phase)


@dataclass(frozen=True)
class SqueezeParams:
    """Squeeze parameter ``zeta = r * exp(i * theta)``."""

    r: float
    theta: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.r) or self.r < 0:
            raise ValueError(f"squeezing factor r must be finite and >= 0, got {self.r}")
        if not math.isfinite(self.theta):
            raise ValueError("squeeze phase must be finite")
        object.__setattr__(self, "r", float(self.r))
        object.__setattr__(self, "theta", _normalize_angle(self.theta))

    @property
    def value(self) -> complex:
        return cmath.rect(self.r, self.theta)


@dataclass(frozen=True)
class PortGeometry:
    """Splitter angle ``gamma`` and the dark-port offset ``delta = pi/2 - gamma``."""

    gamma: float

    def __post_init__(self):
        g = float(self.gamma)
        if not (0.0 <= g <= math.pi / 2):
            raise ValueError(f"gamma must lie in [0, pi/2], got {g}")
        object.__setattr__(self, "gamma", g)

    @classmethod
    def from_delta(cls, delta: float) -> "PortGeometry":
        return cls(math.pi / 2 - float(delta))

    @property
    def delta(self) -> float:
        return math.pi / 2 - self.gamma


@dataclass(frozen=True)
class Moments:
    """Mean and variance of a photon number."""

    mean: float
    variance: float

    def __post_init__(self):
        if not (math.isfinite(self.mean) and math.isfinite(self.variance)):
            raise ValueError("moments must be finite")
        # clip round-off from cancellations, nothing larger
        for name in ("mean", "variance"):
            v = float(getattr(self, name))
            if v < 0:
                if v < -1e-9 * max(1.0, abs(self.mean)):
                    raise ValueError(f"{name} must be >= 0, got {v}")
                v = 0.0
            object.__setattr__(self, name, v)

    @property
    def std(self) -> float:
        return math.sqrt(self.variance)


@dataclass(frozen=True)
class PhotonDistribution:
    """Truncated photon-number distribution ``P_n`` for ``n = 0 .. cutoff``."""

    probabilities: np.ndarray
    normalization_residual: float = field(default=None)

    def __post_init__(self):
        p = np.asarray(self.probabilities, dtype=float)
        if p.ndim != 1 or p.size == 0:
            raise ValueError("probabilities must be a non-empty 1-d array")
        if np.any(~np.isfinite(p)) or np.any(p < -1e-15) or np.any(p > 1 + 1e-12):
            raise ValueError("probabilities must lie in [0, 1]")
        p = np.clip(p, 0.0, 1.0)
        p.setflags(write=False)
        object.__setattr__(self, "probabilities", p)
        residual = self.normalization_residual
        if residual is None:
            residual = 1.0 - math.fsum(p)
        object.__setattr__(self, "normalization_residual", max(0.0, float(residual)))

    @property
    def cutoff(self) -> int:
        return self.probabilities.size - 1

    @property
    def n(self) -> np.ndarray:
        return np.arange(self.probabilities.size)

    def moments(self) -> Moments:
        """Mean and variance from the (truncated) probabilities."""
        p = self.probabilities
        n = self.n.astype(float)
        mean = math.fsum(n * p)
        var = math.fsum((n - mean) ** 2 * p)
        return Moments(mean, var)

    def padded(self, length: int) -> np.ndarray:
        """Probabilities zero-padded (or cut) to ``length`` entries."""
        out = np.zeros(length)
        k = min(length, self.probabilities.size)
        out[:k] = self.probabilities[:k]
        return out

    def total_variation(self, other: "PhotonDistribution") -> float:
        length = max(self.probabilities.size, other.probabilities.size)
        return 0.5 * float(np.abs(self.padded(length) - other.padded(length)).sum())

    def local_maxima(self, min_relative_height: float = 0.0) -> np.ndarray:
        """Photon numbers where ``P_n`` peaks.

        A run of equal values counts once (at its first index) when both
        neighbours of the run are strictly lower; zero entries never count.
        Peaks lower than ``min_relative_height`` times the largest ``P_n`` are
        dropped, which hides ripples deep in the tails.
        """
        p = self.probabilities
        starts = np.flatnonzero(np.concatenate(([True], p[1:] != p[:-1])))
        values = p[starts]
        padded = np.concatenate(([-1.0], values, [-1.0]))
        peak = (padded[1:-1] > padded[:-2]) & (padded[1:-1] > padded[2:]) & (values > 0)
        peak &= values >= min_relative_height * p.max()
        return starts[peak]


@dataclass(frozen=True)
class DerivedQuantities:
    delta_alpha_sq: float
    phase_mismatch: float


def derived_quantities(alpha: CoherentParams, zeta: SqueezeParams, geom: PortGeometry) -> DerivedQuantities:
    """Signal strength ``|delta alpha|^2`` and the mismatch ``theta - 2 phi`` in (-pi, pi]."""
    return DerivedQuantities(
        delta_alpha_sq=(geom.delta * alpha.magnitude) ** 2,
        phase_mismatch=wrap_phase(zeta.theta - 2.0 * alpha.phase),
    )
