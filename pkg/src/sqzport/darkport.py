"""Analytic photon statistics of the dark output port.

In the strong-field, small-offset regime the light leaving port 1 is a weak
squeezed coherent state ``S(zeta) D(alpha_tilde) |0>``.  This module builds
that state's effective amplitude, its Fock amplitudes through Hermite
polynomials, the photon distribution, and the closed-form mean and variance.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import CutoffError, FirstOrderWarning
from .numkit import LogScaledComplex, hermite_scaled_sequence, log_factorial_array
from .states import CoherentParams, Moments, PhotonDistribution, SqueezeParams

__all__ = [
    "R_MIN",
    "MAX_CUTOFF",
    "EffectiveDisplacement",
    "AmplitudeSeries",
    "effective_displacement",
    "fock_amplitudes",
    "distribution",
    "analytic_moments",
    "optimal_phase_moments",
    "noise_reduction",
]

#: Below this squeezing factor the amplitudes use the exact r -> 0 (Poisson) limit.
R_MIN = 1e-6
#: Hard ceiling for automatic cutoff growth in :func:`distribution`.
MAX_CUTOFF = 100_000

_DELTA_HARD = 0.5
_DELTA_SOFT = 0.2


@dataclass(frozen=True)
class EffectiveDisplacement:
    """Coherent amplitude of the dark-port state and its phase bookkeeping.

    ``global_phase`` is ``|alpha|^2 delta^2 * global_phase_delta``, the
    overall phase of the output state.  It never enters a probability.
    """

    alpha_tilde: complex
    global_phase_delta: float
    global_phase: float = 0.0


@dataclass(frozen=True)
class AmplitudeSeries:
    """``f_n / sqrt(n!)`` for ``n = 0 .. cutoff`` as log-magnitude and phase arrays."""

    log_magnitude: np.ndarray
    phase: np.ndarray
    zeta: SqueezeParams
    displacement: EffectiveDisplacement

    @property
    def cutoff(self) -> int:
        return self.log_magnitude.size - 1

    @property
    def terms(self) -> list[LogScaledComplex]:
        return [LogScaledComplex(lm, ph) for lm, ph in zip(self.log_magnitude, self.phase)]

    def probabilities(self) -> np.ndarray:
        # exp(-inf) == 0 keeps exact zeros exact; deep tails underflow to 0
        return np.exp(2.0 * self.log_magnitude)

    def to_complex(self) -> np.ndarray:
        return np.exp(self.log_magnitude + 1j * self.phase)


def _check_delta(delta: float) -> float:
    delta = float(delta)
    if not math.isfinite(delta) or abs(delta) > _DELTA_HARD:
        raise ValueError(f"|delta| must not exceed {_DELTA_HARD}, got {delta}")
    if abs(delta) > _DELTA_SOFT:
        warnings.warn(
            f"delta={delta:g} is outside the small-offset regime; first-order results are unreliable",
            FirstOrderWarning,
            stacklevel=3,
        )
    return delta


def effective_displacement(alpha: CoherentParams, zeta: SqueezeParams, delta: float) -> EffectiveDisplacement:
    """Amplitude ``alpha_tilde`` of the squeezed coherent state in the dark port.

    ``alpha_tilde = -alpha delta cosh r - conj(alpha) delta e^{i theta} sinh r``
    and ``Delta = sin(theta - 2 phi) sinh(2r) / 2``.

    Raises
    ------
    ValueError
        If ``|delta| > 0.5``.  A :class:`FirstOrderWarning` is emitted for
        ``0.2 < |delta| <= 0.5``.
    """
    delta = _check_delta(delta)
    a = alpha.value
    r, theta = zeta.r, zeta.theta
    alpha_tilde = -a * delta * math.cosh(r) - a.conjugate() * delta * cmath.exp(1j * theta) * math.sinh(r)
    big_delta = 0.5 * math.sin(theta - 2.0 * alpha.phase) * math.sinh(2.0 * r)
    return EffectiveDisplacement(
        alpha_tilde=complex(alpha_tilde),
        global_phase_delta=big_delta,
        global_phase=alpha.magnitude**2 * delta**2 * big_delta,
    )


def _poisson_amplitudes(alpha_tilde: complex, n: np.ndarray, log_fact: np.ndarray):
    mag = abs(alpha_tilde)
    if mag == 0.0:
        log_mag = np.where(n == 0, 0.0, -np.inf)
        return log_mag, np.zeros(n.size)
    log_mag = n * math.log(mag) - 0.5 * mag**2 - 0.5 * log_fact
    phase = n * cmath.phase(alpha_tilde)
    return log_mag, phase


def _gaussian_exponent(at: complex, theta: float, r: float) -> complex:
    """``-(|at|^2 - e^{-i theta} at^2 tanh r) / 2`` without the cancellation.

    With ``psi = 2 arg(at) - theta`` the bracket is
    ``|at|^2 ((1 - tanh r) + tanh r (1 - e^{i psi}))``; both pieces are
    formed directly so large ``|at|`` keeps full relative accuracy.
    """
    mag2 = abs(at) ** 2
    if mag2 == 0.0:
        return 0j
    psi = 2.0 * cmath.phase(at) - theta
    t = math.tanh(r)
    one_minus_t = 2.0 / (1.0 + math.exp(2.0 * r))
    bracket = one_minus_t + t * complex(2.0 * math.sin(0.5 * psi) ** 2, -math.sin(psi))
    return -0.5 * mag2 * bracket


def fock_amplitudes(zeta: SqueezeParams, eff: EffectiveDisplacement, cutoff: int) -> AmplitudeSeries:
    """Number-basis amplitudes ``<n| S(zeta) D(alpha_tilde) |0>`` for ``n <= cutoff``.

    For ``r < R_MIN`` the squeezed form is replaced by its exact ``r -> 0``
    limit, the coherent amplitudes ``alpha_tilde^n e^{-|alpha_tilde|^2/2} / sqrt(n!)``.
    """
    cutoff = int(cutoff)
    if cutoff < 0:
        raise ValueError("cutoff must be >= 0")
    n = np.arange(cutoff + 1)
    log_fact = log_factorial_array(n)
    at = complex(eff.alpha_tilde)
    r, theta = zeta.r, zeta.theta

    if r < R_MIN:
        log_mag, phase = _poisson_amplitudes(at, n, log_fact)
    else:
        t = math.tanh(r)
        exponent = _gaussian_exponent(at, theta, r)
        z = at * cmath.exp(-0.5j * theta) / math.sqrt(math.sinh(2.0 * r))
        h_log, h_phase = hermite_scaled_sequence(cutoff, z)
        prefactor = 0.5 * n * (math.log(t) - math.log(2.0)) - 0.5 * math.log(math.cosh(r))
        log_mag = prefactor + exponent.real + h_log - 0.5 * log_fact
        phase = 0.5 * n * theta + exponent.imag + h_phase
        phase = np.where(np.isneginf(log_mag), 0.0, phase)

    return AmplitudeSeries(log_magnitude=log_mag, phase=phase, zeta=zeta, displacement=eff)


def analytic_moments(alpha: CoherentParams, zeta: SqueezeParams, delta: float) -> Moments:
    """Closed-form mean and variance of the dark-port photon number."""
    signal = alpha.magnitude**2 * delta**2
    r = zeta.r
    sh2 = math.sinh(r) ** 2
    mismatch = zeta.theta - 2.0 * alpha.phase
    mean = signal + sh2
    variance = signal * (math.cosh(2 * r) - math.cos(mismatch) * math.sinh(2 * r)) + 2.0 * sh2 * math.cosh(r) ** 2
    return Moments(mean, variance)


def optimal_phase_moments(alpha: CoherentParams, zeta: SqueezeParams, delta: float) -> Moments:
    """Mean and variance at the noise-minimizing phase ``theta = 2 phi``."""
    signal = alpha.magnitude**2 * delta**2
    r = zeta.r
    sh2 = math.sinh(r) ** 2
    return Moments(signal + sh2, signal * math.exp(-2 * r) + 2.0 * sh2 * math.cosh(r) ** 2)


def noise_reduction(r: float) -> float:
    """Leading-order ratio of the squeezed to unsqueezed counting-noise width."""
    if r < 0:
        raise ValueError("r must be >= 0")
    return math.exp(-r)


def distribution(
    alpha: CoherentParams,
    zeta: SqueezeParams,
    delta: float,
    target_residual: float = 1e-12,
    max_cutoff: int = MAX_CUTOFF,
) -> PhotonDistribution:
    """Photon-number distribution in the dark port.

    The cutoff starts at ``mean + 12 std`` of the closed-form moments and is
    doubled until ``1 - sum(P_n) <= target_residual``.

    Raises
    ------
    CutoffError
        If the cutoff would exceed ``max_cutoff`` first.
    """
    if not (0.0 < target_residual <= 1e-3):
        raise ValueError("target_residual must lie in (0, 1e-3]")
    eff = effective_displacement(alpha, zeta, delta)
    m = analytic_moments(alpha, zeta, delta)
    cutoff = min(max_cutoff, max(8, math.ceil(m.mean + 12.0 * math.sqrt(m.variance))))
    while True:
        p = fock_amplitudes(zeta, eff, cutoff).probabilities()
        residual = 1.0 - math.fsum(p)
        if residual <= target_residual:
            return PhotonDistribution(p, normalization_residual=max(residual, 0.0))
        # the upper half carries no mass: the residual is rounding, not tail
        if cutoff > 16 and residual < 1e-8 and p[cutoff // 2 :].max() < 1e-3 * target_residual / cutoff:
            raise CutoffError(
                f"dark-port residual {residual:.3g} is at the rounding floor; "
                f"target {target_residual:g} is not attainable",
                residual=residual,
                module="darkport",
            )
        if cutoff >= max_cutoff:
            raise CutoffError(
                f"dark-port distribution not normalized to {target_residual:g} below cutoff {max_cutoff}",
                residual=residual,
                module="darkport",
            )
        cutoff = min(2 * cutoff, max_cutoff)
