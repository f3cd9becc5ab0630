"""Disentangling coefficients of the two-mode squeeze generator.

The output-state generator ``r A`` is rewritten as the ordered product

    exp(sT t12) exp(sS s12) exp(s1 s_1) exp(s2 s_2)

with real coefficients.  All operators involved are quadratic in the mode
operators, so their commutator action on ``v = (b1, b2, b1^dag, b2^dag)`` is a
4x4 matrix, and the group products can be matched in that representation.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm
from scipy.optimize import least_squares, minimize

from .errors import ConvergenceError
from .states import SqueezeParams

__all__ = [
    "LABELS",
    "QuadraticGenerator",
    "DisentangleCoeffs",
    "adjoint_matrix",
    "disentangle",
    "first_order_coeffs",
    "product_matrix",
    "reconstruction_residual",
]

LABELS = ("s1", "s2", "s12", "t12", "A")

R_MAX = 5.0
# continuation step in gamma between solved points
_GAMMA_STEP = 0.05


@dataclass(frozen=True)
class QuadraticGenerator:
    """``matrix[i, j]`` is the coefficient of ``v_j`` in ``[K, v_i]``."""

    matrix: np.ndarray
    label: str


@dataclass(frozen=True)
class DisentangleCoeffs:
    sigma_T: float
    sigma_S: float
    sigma_1: float
    sigma_2: float
    residual: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.array([self.sigma_T, self.sigma_S, self.sigma_1, self.sigma_2])


def _basis_matrix(label: str, theta: float) -> np.ndarray:
    e = cmath.exp(1j * theta)
    ec = e.conjugate()
    m = np.zeros((4, 4), dtype=complex)
    # index: 0 b1, 1 b2, 2 b1^dag, 3 b2^dag
    if label == "s1":
        m[0, 2] = e
        m[2, 0] = ec
    elif label == "s2":
        m[1, 3] = e
        m[3, 1] = ec
    elif label == "s12":
        m[0, 3] = -e
        m[1, 2] = -e
        m[2, 1] = -ec
        m[3, 0] = -ec
    elif label == "t12":
        m[0, 1] = 1.0
        m[1, 0] = -1.0
        m[2, 3] = 1.0
        m[3, 2] = -1.0
    else:
        raise ValueError(f"unknown generator label {label!r}")
    return m


def adjoint_matrix(label: str, zeta: SqueezeParams, gamma: float = math.pi / 2) -> QuadraticGenerator:
    """Commutator action of one of ``s1, s2, s12, t12, A`` on the mode operators.

    ``s_i = (e^{-i theta} b_i^2 - e^{i theta} b_i^dag^2)/2``,
    ``s12 = e^{i theta} b1^dag b2^dag - e^{-i theta} b1 b2``,
    ``t12 = b1 b2^dag - b1^dag b2`` and
    ``A = sin^2 g s1 + cos^2 g s2 + sin g cos g s12``.
    """
    if label not in LABELS:
        raise ValueError(f"label must be one of {LABELS}, got {label!r}")
    theta = zeta.theta
    if label == "A":
        s, c = math.sin(gamma), math.cos(gamma)
        mat = s * s * _basis_matrix("s1", theta) + c * c * _basis_matrix("s2", theta) + s * c * _basis_matrix("s12", theta)
    else:
        mat = _basis_matrix(label, theta)
    return QuadraticGenerator(mat, label)


def _rep(label: str, theta: float, gamma: float = math.pi / 2) -> np.ndarray:
    # K -> M^T is a Lie-algebra homomorphism, so operator products map to
    # matrix products in the same order
    return adjoint_matrix(label, SqueezeParams(1.0, theta), gamma).matrix.T


def product_matrix(coeffs, zeta: SqueezeParams) -> np.ndarray:
    """Representation of ``exp(sT t12) exp(sS s12) exp(s1 s_1) exp(s2 s_2)``."""
    st, ss, s1, s2 = np.asarray(coeffs, dtype=float)
    th = zeta.theta
    return (
        expm(st * _rep("t12", th))
        @ expm(ss * _rep("s12", th))
        @ expm(s1 * _rep("s1", th))
        @ expm(s2 * _rep("s2", th))
    )


def _target(zeta: SqueezeParams, gamma: float) -> np.ndarray:
    return expm(zeta.r * _rep("A", zeta.theta, gamma))


def reconstruction_residual(coeffs, zeta: SqueezeParams, gamma: float) -> float:
    """Frobenius norm of product-of-exponentials minus ``exp(r A)``."""
    if isinstance(coeffs, DisentangleCoeffs):
        coeffs = coeffs.as_array()
    return float(np.linalg.norm(product_matrix(coeffs, zeta) - _target(zeta, gamma)))


def first_order_coeffs(zeta: SqueezeParams, delta: float) -> DisentangleCoeffs:
    """Small-offset coefficients at ``gamma = pi/2 - delta``, first order in delta."""
    if abs(delta) > 0.5:
        raise ValueError("|delta| must not exceed 0.5")
    r = zeta.r
    return DisentangleCoeffs(
        sigma_T=delta * (1.0 - math.cosh(r)),
        sigma_S=-delta * math.sinh(r),
        sigma_1=r,
        sigma_2=0.0,
    )


def _solve_at(zeta, gamma, seed, tol, max_nfev):
    target = _target(zeta, gamma)

    def fun(x):
        d = (product_matrix(x, zeta) - target).ravel()
        return np.concatenate([d.real, d.imag])

    sol = least_squares(fun, seed, method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=max_nfev)
    x = sol.x
    res = float(np.linalg.norm(fun(x)))
    if res > tol:
        # derivative-free polish, then one more damped Newton pass
        nm = minimize(
            lambda y: float(np.sum(fun(y) ** 2)),
            x,
            method="Nelder-Mead",
            options={"xatol": 1e-14, "fatol": 1e-30, "maxiter": 20 * max_nfev},
        )
        sol = least_squares(fun, nm.x, method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=max_nfev)
        x = sol.x
        res = float(np.linalg.norm(fun(x)))
    return x, res


def disentangle(
    zeta: SqueezeParams,
    gamma: float,
    tol: float = 1e-10,
    max_nfev: int = 2000,
) -> DisentangleCoeffs:
    """Solve for ``(sigma_T, sigma_S, sigma_1, sigma_2)`` at splitter angle ``gamma``.

    The solution is continued in small steps from the nearer endpoint
    (``gamma = pi/2``: pure ``s_1``; ``gamma = 0``: pure ``s_2``), with the
    first-order small-offset values seeding the first step near ``pi/2``.

    Raises
    ------
    ConvergenceError
        If the matrix residual stays above ``tol``.
    """
    gamma = float(gamma)
    if not (0.0 <= gamma <= math.pi / 2):
        raise ValueError("gamma must lie in [0, pi/2]")
    r = zeta.r
    if r > R_MAX:
        raise ValueError(f"r must not exceed {R_MAX}")
    if r == 0.0:
        return DisentangleCoeffs(0.0, 0.0, 0.0, 0.0, 0.0)

    if gamma >= math.pi / 4:
        start, x = math.pi / 2, np.array([0.0, 0.0, r, 0.0])
    else:
        start, x = 0.0, np.array([0.0, 0.0, 0.0, r])
    span = gamma - start
    n_steps = max(1, math.ceil(abs(span) / _GAMMA_STEP))
    res = reconstruction_residual(x, zeta, start)
    for k in range(1, n_steps + 1):
        g = start + span * k / n_steps
        seed = x
        if k == 1 and start > 0:
            seed = first_order_coeffs(zeta, min(math.pi / 2 - g, 0.5)).as_array()
        elif k > 2:
            seed = x + (x - prev)  # linear extrapolation along the path
        prev = x
        x, res = _solve_at(zeta, g, seed, tol, max_nfev)
    if res > tol:
        raise ConvergenceError(
            f"disentangling did not reach {tol:g} at r={r}, gamma={gamma}: residual {res:.3g}",
            residual=res,
            module="disentangle",
        )
    return DisentangleCoeffs(*map(float, x), residual=res)
