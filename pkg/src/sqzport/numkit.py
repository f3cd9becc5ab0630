"""Special-function kernels carried in log-magnitude/phase form.

Photon-number amplitudes in the dark port are needed up to n of several
hundred, where Hermite polynomials and factorials leave double range long
before the probabilities themselves do.  Everything here therefore returns
``log|value|`` together with ``arg value``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

__all__ = [
    "LogScaledComplex",
    "wrap_phase",
    "log_factorial",
    "log_factorial_array",
    "hermite_scaled",
    "hermite_scaled_sequence",
    "poisson_log_pmf",
]

# Rescale the Hermite recurrence once magnitudes leave [e^-300, e^300].
_RESCALE_LOG = 300.0
_RESCALE_HI = math.exp(_RESCALE_LOG)
_RESCALE_LO = math.exp(-_RESCALE_LOG)


def wrap_phase(phase):
    """Map an angle (scalar or array) onto the interval (-pi, pi]."""
    wrapped = np.pi - np.mod(np.pi - np.asarray(phase, dtype=float), 2.0 * np.pi)
    if np.ndim(wrapped) == 0:
        return float(wrapped)
    return wrapped


@dataclass(frozen=True)
class LogScaledComplex:
    """A complex number stored as ``(log|z|, arg z)``.

    ``log_magnitude == -inf`` encodes an exact zero; its phase is pinned to 0.
    """

    log_magnitude: float
    phase: float = 0.0

    def __post_init__(self):
        lm = float(self.log_magnitude)
        if math.isnan(lm) or lm == math.inf:
            raise ValueError(f"log_magnitude must be finite or -inf, got {lm}")
        object.__setattr__(self, "log_magnitude", lm)
        if lm == -math.inf:
            object.__setattr__(self, "phase", 0.0)
        else:
            object.__setattr__(self, "phase", wrap_phase(self.phase))

    @classmethod
    def from_complex(cls, z: complex) -> "LogScaledComplex":
        if z == 0:
            return cls(-math.inf, 0.0)
        return cls(math.log(abs(z)), math.atan2(z.imag, z.real))

    @property
    def is_zero(self) -> bool:
        return self.log_magnitude == -math.inf

    def to_complex(self) -> complex:
        if self.is_zero:
            return 0j
        return math.exp(self.log_magnitude) * complex(math.cos(self.phase), math.sin(self.phase))

    def __mul__(self, other: "LogScaledComplex") -> "LogScaledComplex":
        if self.is_zero or other.is_zero:
            return LogScaledComplex(-math.inf)
        return LogScaledComplex(self.log_magnitude + other.log_magnitude, self.phase + other.phase)

    def abs_squared_log(self) -> float:
        """Return ``log|z|^2``."""
        return 2.0 * self.log_magnitude


def log_factorial(n: int) -> float:
    """Return ln(n!)."""
    n = int(n)
    if n < 0:
        raise ValueError("log_factorial requires n >= 0")
    if n < 2:
        return 0.0
    return math.lgamma(n + 1.0)


def log_factorial_array(n) -> np.ndarray:
    n = np.asarray(n, dtype=float)
    if np.any(n < 0):
        raise ValueError("log_factorial requires n >= 0")
    out = gammaln(n + 1.0)
    out[n < 2] = 0.0
    return out


def hermite_scaled_sequence(nmax: int, z: complex) -> tuple[np.ndarray, np.ndarray]:
    """Physicists' Hermite polynomials H_0(z) ... H_nmax(z) in log-scaled form.

    Runs the three-term recurrence ``H_{k+1} = 2z H_k - 2k H_{k-1}`` on a
    rescaled pair of values, so the result is meaningful far beyond the point
    where ``H_n(z)`` itself overflows.

    Parameters
    ----------
    nmax : int
        Highest degree to evaluate.
    z : complex
        Finite argument.

    Returns
    -------
    log_magnitude, phase : ndarray of shape (nmax + 1,)
        ``log|H_n(z)|`` (``-inf`` for exact zeros) and ``arg H_n(z)``.
    """
    nmax = int(nmax)
    if nmax < 0:
        raise ValueError("nmax must be >= 0")
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError("z must be finite")

    log_mag = np.full(nmax + 1, -np.inf)
    phase = np.zeros(nmax + 1)
    log_mag[0] = 0.0
    if nmax == 0:
        return log_mag, phase

    two_z = 2.0 * z
    h_prev, h_cur = 1.0 + 0j, two_z
    scale = 0.0

    def _store(k, h):
        if h != 0:
            log_mag[k] = math.log(abs(h)) + scale
            phase[k] = math.atan2(h.imag, h.real)

    _store(1, h_cur)
    for k in range(1, nmax):
        h_next = two_z * h_cur - (2.0 * k) * h_prev
        h_prev, h_cur = h_cur, h_next
        big = max(abs(h_prev), abs(h_cur))
        if big > _RESCALE_HI or 0.0 < big < _RESCALE_LO:
            h_prev /= big
            h_cur /= big
            scale += math.log(big)
        _store(k + 1, h_cur)
    return log_mag, phase


def hermite_scaled(n: int, z: complex) -> LogScaledComplex:
    """Return H_n(z) as a :class:`LogScaledComplex`."""
    log_mag, phase = hermite_scaled_sequence(n, z)
    return LogScaledComplex(log_mag[-1], phase[-1])


def poisson_log_pmf(mean: float, n):
    """ln of the Poisson probability ``exp(-mean) mean**n / n!``.

    Accepts a scalar or an array of photon numbers.  At ``mean == 0`` the
    result is 0 for ``n == 0`` and ``-inf`` elsewhere.
    """
    mean = float(mean)
    if mean < 0:
        raise ValueError("mean must be >= 0")
    scalar = np.ndim(n) == 0
    n_arr = np.atleast_1d(np.asarray(n))
    if np.any(n_arr < 0):
        raise ValueError("n must be >= 0")
    if mean == 0.0:
        out = np.where(n_arr == 0, 0.0, -np.inf)
    else:
        out = -mean + n_arr * math.log(mean) - log_factorial_array(n_arr)
    return float(out[0]) if scalar else out
