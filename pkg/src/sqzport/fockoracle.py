"""Brute-force two-mode Fock-space simulation of the interferometer.

The input ``|coherent alpha> (x) |squeezed vacuum zeta>`` is built from closed
form amplitudes and pushed through the splitter unitary
``U(gamma) = exp(gamma (a1 a2^dag - a1^dag a2))`` by a Taylor-series
exponential action on the sparse generator.  ``U`` realizes
``U a U^dag = [[cos g, sin g], [-sin g, cos g]] a`` and routes port 1 into
port 2 at ``gamma = pi/2``; :func:`beam_splitter_self_test` checks both.

The generator conserves total photon number, so with per-mode cutoff ``N``
every sector with ``n1 + n2 <= N`` evolves exactly.  Input weight above that
line is dropped and reported as leakage, never silently kept.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import ConvergenceError, CutoffError
from .numkit import log_factorial_array
from .states import CoherentParams, PhotonDistribution, SqueezeParams

__all__ = [
    "FockStateVector",
    "annihilation",
    "mode_operators",
    "recommended_cutoff",
    "coherent_fock",
    "squeezed_vacuum_fock",
    "product_state",
    "expm_action",
    "beam_splitter_generator",
    "beam_splitter_unitary_apply",
    "beam_splitter_self_test",
    "output_state",
    "output_state_direct",
    "marginal_distribution",
    "marginal_moments",
    "quadrature_moments",
    "reduced_purity",
    "fidelity",
]

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class FockStateVector:
    """Amplitudes ``psi[n1, n2]`` on the truncated two-mode number basis."""

    amplitudes: np.ndarray
    norm_deficit: float = 0.0

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.ndim != 2:
            raise ValueError("amplitudes must be a 2-d array indexed by (n1, n2)")
        if not np.all(np.isfinite(amps)):
            raise ValueError("amplitudes must be finite")
        norm = float(np.vdot(amps, amps).real)
        if norm > 1.0 + 1e-12:
            raise ValueError(f"state norm {norm} exceeds 1")
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "norm_deficit", max(float(self.norm_deficit), 1.0 - norm, 0.0))

    @property
    def cutoffs(self) -> tuple[int, int]:
        return self.amplitudes.shape[0] - 1, self.amplitudes.shape[1] - 1

    @property
    def vector(self) -> np.ndarray:
        return self.amplitudes.ravel()

    @classmethod
    def basis(cls, n1: int, n2: int, cutoffs: tuple[int, int]) -> "FockStateVector":
        amps = np.zeros((cutoffs[0] + 1, cutoffs[1] + 1), dtype=complex)
        amps[n1, n2] = 1.0
        return cls(amps)


def annihilation(cutoff: int) -> sp.csr_matrix:
    """Truncated single-mode ``a`` with ``a[n-1, n] = sqrt(n)``."""
    n = np.arange(1, cutoff + 1)
    return sp.diags(np.sqrt(n), offsets=1, shape=(cutoff + 1, cutoff + 1), format="csr", dtype=complex)


def mode_operators(cutoffs: tuple[int, int]) -> tuple[sp.csr_matrix, sp.csr_matrix]:
    """Two-mode annihilators ``a1 = a (x) 1`` and ``a2 = 1 (x) a``."""
    n1, n2 = cutoffs
    a1 = sp.kron(annihilation(n1), sp.identity(n2 + 1, format="csr"), format="csr")
    a2 = sp.kron(sp.identity(n1 + 1, format="csr"), annihilation(n2), format="csr")
    return a1, a2


def recommended_cutoff(alpha: CoherentParams, zeta: SqueezeParams, tol: float = DEFAULT_TOL) -> int:
    """Smallest per-mode cutoff at which the splitter input leaks at most ``tol / 10``.

    Starts from ``|alpha|^2 + 10|alpha| + 10 sinh^2 r + 20`` and grows until
    the weight of the product input above ``n1 + n2 = N`` is small enough;
    the squeezed tail decays only like ``tanh(r)^n`` and often needs more.
    """
    mag = alpha.magnitude
    floor = math.ceil(mag**2 + 10.0 * mag + 10.0 * math.sinh(zeta.r) ** 2 + 20.0)
    t = math.tanh(zeta.r)
    extra = 0 if t == 0.0 else math.ceil(math.log(tol / 1e3) / math.log(t))
    grid = floor + max(extra, 0) + 40
    p1 = np.abs(coherent_fock(alpha, grid, tol=1.0)) ** 2
    p2 = np.abs(squeezed_vacuum_fock(zeta, grid, tol=1.0)) ** 2
    # mass of n1 + n2 > N for each N, from the convolution of the marginals
    tail = 1.0 - np.cumsum(np.convolve(p1, p2)[: grid + 1])
    ok = np.flatnonzero(tail[floor:] <= tol / 10.0)
    if ok.size == 0:
        raise CutoffError(f"no cutoff below {grid} meets {tol:g}", residual=float(tail[-1]), module="fockoracle")
    return int(floor + ok[0])


def _check_deficit(deficit: float, tol: float, what: str):
    if deficit > tol:
        raise CutoffError(f"{what}: norm deficit {deficit:.3g} exceeds {tol:g}", residual=deficit, module="fockoracle")


def coherent_fock(alpha: CoherentParams, cutoff: int, tol: float = 1e-10) -> np.ndarray:
    """``e^{-|alpha|^2/2} alpha^n / sqrt(n!)`` for ``n <= cutoff``."""
    n = np.arange(cutoff + 1)
    if alpha.magnitude == 0.0:
        amps = np.zeros(cutoff + 1, dtype=complex)
        amps[0] = 1.0
        return amps
    log_mag = n * math.log(alpha.magnitude) - 0.5 * alpha.magnitude**2 - 0.5 * log_factorial_array(n)
    amps = np.exp(log_mag + 1j * n * alpha.phase)
    _check_deficit(1.0 - float(np.vdot(amps, amps).real), tol, "coherent state")
    return amps


def squeezed_vacuum_fock(zeta: SqueezeParams, cutoff: int, tol: float = 1e-10) -> np.ndarray:
    """``c_2m = (-e^{i theta} tanh r)^m sqrt((2m)!) / (2^m m! sqrt(cosh r))``, odd entries 0."""
    amps = np.zeros(cutoff + 1, dtype=complex)
    if zeta.r == 0.0:
        amps[0] = 1.0
        return amps
    m = np.arange(cutoff // 2 + 1)
    t = math.tanh(zeta.r)
    log_mag = (
        m * math.log(t)
        + 0.5 * log_factorial_array(2 * m)
        - m * math.log(2.0)
        - log_factorial_array(m)
        - 0.5 * math.log(math.cosh(zeta.r))
    )
    amps[0::2] = np.exp(log_mag + 1j * m * (zeta.theta + math.pi))
    _check_deficit(1.0 - float(np.vdot(amps, amps).real), tol, "squeezed vacuum")
    return amps


def product_state(v1: np.ndarray, v2: np.ndarray) -> FockStateVector:
    return FockStateVector(np.outer(v1, v2))


def _one_norm(op) -> float:
    return float(abs(op).sum(axis=0).max())


def expm_action(op, v: np.ndarray, t: float = 1.0, tol: float = 1e-15, max_terms: int = 80) -> np.ndarray:
    """``exp(t * op) @ v`` by Taylor series on sub-steps of bounded norm.

    The interval is split so that each sub-step has ``|t| * ||op||_1 / steps <= 2``;
    on every sub-step terms are added until one drops below ``tol`` relative to
    the running vector.  No matrix powers are formed.
    """
    v = np.asarray(v, dtype=complex)
    if t == 0.0:
        return v.copy()
    size = abs(t) * _one_norm(op)
    steps = max(1, math.ceil(size / 2.0))
    h = t / steps
    out = v.copy()
    for _ in range(steps):
        term = out
        acc = out.copy()
        for k in range(1, max_terms + 1):
            term = (h / k) * (op @ term)
            acc += term
            if np.linalg.norm(term) <= tol * max(np.linalg.norm(acc), 1e-300):
                break
        else:
            raise ConvergenceError(
                f"Taylor series did not converge in {max_terms} terms",
                residual=float(np.linalg.norm(term)),
                module="fockoracle",
            )
        out = acc
    return out


def beam_splitter_generator(cutoffs: tuple[int, int]) -> sp.csr_matrix:
    """``a1 a2^dag - a1^dag a2`` on the truncated space (exactly anti-Hermitian)."""
    a1, a2 = mode_operators(cutoffs)
    return (a1 @ a2.conj().T - a1.conj().T @ a2).tocsr()


def _closed_sector_mask(cutoffs: tuple[int, int]) -> np.ndarray:
    n1 = np.arange(cutoffs[0] + 1)[:, None]
    n2 = np.arange(cutoffs[1] + 1)[None, :]
    return (n1 + n2) <= min(cutoffs)


def beam_splitter_unitary_apply(state: FockStateVector, gamma: float, tol: float = DEFAULT_TOL) -> FockStateVector:
    """Apply ``U(gamma)`` to a two-mode state.

    Raises
    ------
    CutoffError
        If the weight outside the exactly evolved sectors plus the incoming
        norm deficit exceeds ``tol``.
    """
    mask = _closed_sector_mask(state.cutoffs)
    amps = np.where(mask, state.amplitudes, 0.0)
    leaked = float(np.sum(np.abs(state.amplitudes[~mask]) ** 2))
    deficit = state.norm_deficit + leaked
    _check_deficit(deficit, tol, "beam splitter input")
    out = expm_action(beam_splitter_generator(state.cutoffs), amps.ravel(), gamma)
    return FockStateVector(out.reshape(amps.shape), norm_deficit=deficit)


def beam_splitter_self_test(gamma: float, cutoff: int = 8, seed: int = 0) -> float:
    """Largest deviation of ``U a_i U^dag`` from the splitter matrix acting on ``a``.

    Evaluated on a random vector inside the sectors ``n1 + n2 <= cutoff - 1``,
    where truncation plays no role.  Also checks that ``U |1, 0> = |0, 1>``
    at ``gamma = pi/2``.
    """
    cutoffs = (cutoff, cutoff)
    gen = beam_splitter_generator(cutoffs)
    a1, a2 = mode_operators(cutoffs)
    rng = np.random.default_rng(seed)
    shape = (cutoff + 1, cutoff + 1)
    v = rng.normal(size=shape) + 1j * rng.normal(size=shape)
    n1, n2 = np.indices(shape)
    v[(n1 + n2) > cutoff - 1] = 0.0
    v = v.ravel() / np.linalg.norm(v)
    c, s = math.cos(gamma), math.sin(gamma)

    def conj_by_u(op):
        return expm_action(gen, op @ expm_action(gen, v, -gamma), gamma)

    worst = max(
        np.linalg.norm(conj_by_u(a1) - (c * (a1 @ v) + s * (a2 @ v))),
        np.linalg.norm(conj_by_u(a2) - (-s * (a1 @ v) + c * (a2 @ v))),
    )
    routed = expm_action(gen, FockStateVector.basis(1, 0, cutoffs).vector, math.pi / 2)
    target = FockStateVector.basis(0, 1, cutoffs).vector
    return float(max(worst, np.linalg.norm(routed - target)))


def output_state(
    alpha: CoherentParams,
    zeta: SqueezeParams,
    gamma: float,
    cutoffs: tuple[int, int] | int | None = None,
    tol: float = DEFAULT_TOL,
) -> FockStateVector:
    """Interferometer output ``U(gamma) (|alpha> (x) S(zeta)|0>)``."""
    if cutoffs is None:
        cutoffs = recommended_cutoff(alpha, zeta)
    if isinstance(cutoffs, int):
        cutoffs = (cutoffs, cutoffs)
    v1 = coherent_fock(alpha, cutoffs[0], tol=tol)
    v2 = squeezed_vacuum_fock(zeta, cutoffs[1], tol=tol)
    return beam_splitter_unitary_apply(product_state(v1, v2), gamma, tol=tol)


def quadratic_generator(zeta: SqueezeParams, gamma: float, cutoffs: tuple[int, int]) -> sp.csr_matrix:
    """``r * A`` with ``A = sin^2 g s1 + cos^2 g s2 + sin g cos g s12`` in mode operators."""
    a1, a2 = mode_operators(cutoffs)
    z = zeta.value
    zc = z.conjugate()
    c1, c2 = a1.conj().T, a2.conj().T
    s1 = 0.5 * (zc * (a1 @ a1) - z * (c1 @ c1))
    s2 = 0.5 * (zc * (a2 @ a2) - z * (c2 @ c2))
    s12 = z * (c1 @ c2) - zc * (a1 @ a2)
    sg, cg = math.sin(gamma), math.cos(gamma)
    return (sg**2 * s1 + cg**2 * s2 + sg * cg * s12).tocsr()


def output_state_direct(
    alpha: CoherentParams,
    zeta: SqueezeParams,
    gamma: float,
    cutoffs: tuple[int, int] | int,
    tol: float = DEFAULT_TOL,
) -> FockStateVector:
    """Output built as ``exp(r A) D1(alpha cos g) D2(alpha sin g) |0, 0>``.

    Independent of :func:`output_state`: the displacements are split before
    the squeeze generator acts, instead of rotating the product input.
    """
    if isinstance(cutoffs, int):
        cutoffs = (cutoffs, cutoffs)
    a = alpha.value
    v1 = coherent_fock(CoherentParams.from_complex(a * math.cos(gamma)), cutoffs[0], tol=tol)
    v2 = coherent_fock(CoherentParams.from_complex(a * math.sin(gamma)), cutoffs[1], tol=tol)
    start = product_state(v1, v2)
    out = expm_action(quadratic_generator(zeta, gamma, cutoffs), start.vector)
    return FockStateVector(out.reshape(start.amplitudes.shape), norm_deficit=start.norm_deficit)


def marginal_distribution(state: FockStateVector, mode: int) -> PhotonDistribution:
    if mode not in (1, 2):
        raise ValueError("mode must be 1 or 2")
    prob = np.abs(state.amplitudes) ** 2
    p = prob.sum(axis=1 if mode == 1 else 0)
    return PhotonDistribution(p, normalization_residual=state.norm_deficit)


def marginal_moments(state: FockStateVector, mode: int):
    """Photon-number moments of one mode, from the marginal distribution."""
    return marginal_distribution(state, mode).moments()


def quadrature_moments(state: FockStateVector) -> tuple[np.ndarray, np.ndarray]:
    """Means and symmetrized covariance of ``(x1, p1, x2, p2)``."""
    a1, a2 = mode_operators(state.cutoffs)
    v = state.vector
    quads = []
    for a in (a1, a2):
        ad = a.conj().T
        quads.append((a + ad) / math.sqrt(2.0))
        quads.append((a - ad) / (1j * math.sqrt(2.0)))
    applied = [q @ v for q in quads]
    mean = np.array([np.vdot(v, w).real for w in applied])
    second = np.empty((4, 4))
    for i in range(4):
        for j in range(4):
            # <q_i q_j> = (q_i v)^dag (q_j v) since the q's are Hermitian
            second[i, j] = np.vdot(applied[i], applied[j]).real
    cov = second - np.outer(mean, mean)
    return mean, 0.5 * (cov + cov.T)


def reduced_purity(state: FockStateVector, mode: int = 1) -> float:
    """``tr(rho^2)`` of one mode's reduced state."""
    psi = state.amplitudes if mode == 1 else state.amplitudes.T
    rho = psi @ psi.conj().T
    return float(np.real(np.trace(rho @ rho)))


def fidelity(a: FockStateVector, b: FockStateVector) -> float:
    return float(abs(np.vdot(a.vector, b.vector)) ** 2)
