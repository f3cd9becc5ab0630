"""Exact photon-number moments from two-mode Gaussian covariance propagation.

Quadratures are ``x = (b + b^dag)/sqrt(2)`` and ``p = (b - b^dag)/(i sqrt(2))``
with hbar = 1, ordered ``(x1, p1, x2, p2)``; the vacuum covariance is ``I/2``.
The squeeze operator ``exp(zeta^*/2 a^2 - zeta/2 a^dag^2)`` maps
``a -> a cosh r - a^dag e^{i theta} sinh r``, so at ``theta = 0`` it is the
x quadrature whose variance drops to ``e^{-2r}/2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .states import CoherentParams, Moments, SqueezeParams

__all__ = [
    "GaussianTwoMode",
    "symplectic_form",
    "input_state",
    "beam_splitter_matrix",
    "apply_beam_splitter",
    "photon_moments",
    "exact_dark_port_moments",
    "exact_dark_port_mean",
]


def symplectic_form(modes: int = 2) -> np.ndarray:
    return np.kron(np.eye(modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


@dataclass(frozen=True)
class GaussianTwoMode:
    """Mean vector and covariance matrix of a two-mode Gaussian state."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float).reshape(4)
        cov = np.asarray(self.cov, dtype=float).reshape(4, 4)
        if not np.allclose(cov, cov.T, atol=1e-12, rtol=0):
            raise ValueError("covariance matrix must be symmetric")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", 0.5 * (cov + cov.T))

    def is_physical(self, tol: float = 1e-10) -> bool:
        """Robertson-Schroedinger uncertainty check ``cov + i Omega / 2 >= 0``."""
        eig = np.linalg.eigvalsh(self.cov + 0.5j * symplectic_form())
        return bool(eig.min() >= -tol)

    def purity_determinant(self) -> float:
        """``det(2 cov)``, equal to 1 for pure states."""
        return float(np.linalg.det(2.0 * self.cov))

    def mode_block(self, mode: int) -> tuple[np.ndarray, np.ndarray]:
        if mode not in (1, 2):
            raise ValueError("mode must be 1 or 2")
        sl = slice(2 * (mode - 1), 2 * mode)
        return self.mean[sl], self.cov[sl, sl]


def _rotation(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s], [s, c]])


def input_state(alpha: CoherentParams, zeta: SqueezeParams) -> GaussianTwoMode:
    """Coherent state in port 1, squeezed vacuum in port 2."""
    a = alpha.value
    mean = np.array([math.sqrt(2.0) * a.real, math.sqrt(2.0) * a.imag, 0.0, 0.0])
    rot = _rotation(zeta.theta / 2.0)
    squeezed = 0.5 * rot @ np.diag([math.exp(-2.0 * zeta.r), math.exp(2.0 * zeta.r)]) @ rot.T
    cov = np.eye(4) * 0.5
    cov[2:, 2:] = squeezed
    return GaussianTwoMode(mean, cov)


def beam_splitter_matrix(gamma: float) -> np.ndarray:
    """Quadrature map of the splitter: output = ``T @ input``.

    Inverting ``a = [[c, s], [-s, c]] b`` gives ``b1 = c a1 - s a2`` and
    ``b2 = s a1 + c a2``; the same rotation acts on x and p.
    """
    c, s = math.cos(gamma), math.sin(gamma)
    return np.kron(np.array([[c, -s], [s, c]]), np.eye(2))


def apply_beam_splitter(state: GaussianTwoMode, gamma: float) -> GaussianTwoMode:
    t = beam_splitter_matrix(gamma)
    return GaussianTwoMode(t @ state.mean, t @ state.cov @ t.T)


def photon_moments(state: GaussianTwoMode, mode: int) -> Moments:
    """Mean and variance of ``b^dag b`` for one mode of a Gaussian state."""
    d, v = state.mode_block(mode)
    mean = 0.5 * (np.trace(v) - 1.0) + 0.5 * float(d @ d)
    var = 0.5 * (np.trace(v @ v) - 0.5) + float(d @ v @ d)
    return Moments(float(mean), float(var))


def exact_dark_port_moments(alpha: CoherentParams, zeta: SqueezeParams, gamma: float) -> Moments:
    """Port-1 photon moments at any splitter angle, no small-offset expansion."""
    return photon_moments(apply_beam_splitter(input_state(alpha, zeta), gamma), 1)


def exact_dark_port_mean(alpha: CoherentParams, zeta: SqueezeParams, gamma: float) -> float:
    """Closed form ``|alpha|^2 cos^2 gamma + sin^2 gamma sinh^2 r``."""
    return alpha.magnitude**2 * math.cos(gamma) ** 2 + math.sin(gamma) ** 2 * math.sinh(zeta.r) ** 2
