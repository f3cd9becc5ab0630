"""Cross-module consistency checks with their achieved and allowed errors."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import darkport, disentangle, fockoracle, gaussian
from .states import CoherentParams, SqueezeParams

__all__ = ["CheckResult", "FIG1_R_GRID", "run_checks"]

FIG1_R_GRID = (0.0, 0.3, 0.6, 0.9, 1.2, 1.5)


@dataclass(frozen=True)
class CheckResult:
    name: str
    achieved: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.achieved <= self.tolerance)


def _rel(a: float, b: float) -> float:
    return abs(a - b) / max(abs(b), 1e-300)


def _fig1_checks():
    delta = 0.1
    alpha = CoherentParams(math.sqrt(500.0) / delta)
    worst_res = worst_mean = worst_var = 0.0
    for r in FIG1_R_GRID:
        z = SqueezeParams(r)
        dist = darkport.distribution(alpha, z, delta)
        closed = darkport.analytic_moments(alpha, z, delta)
        summed = dist.moments()
        worst_res = max(worst_res, dist.normalization_residual)
        worst_mean = max(worst_mean, _rel(summed.mean, closed.mean))
        worst_var = max(worst_var, _rel(summed.variance, closed.variance))
    return [
        CheckResult("darkport normalization (fig1 grid)", worst_res, 1e-9),
        CheckResult("darkport mean, sum vs closed form", worst_mean, 1e-6),
        CheckResult("darkport variance, sum vs closed form", worst_var, 1e-6),
    ]


def _oracle_instances(count: int, seed: int):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        yield (
            CoherentParams(rng.uniform(0, 2), rng.uniform(0, 2 * math.pi)),
            SqueezeParams(rng.uniform(0, 1), rng.uniform(0, 2 * math.pi)),
            rng.uniform(0, math.pi / 2),
        )


def _gaussian_vs_oracle(count: int = 5, seed: int = 7):
    worst = 0.0
    for a, z, g in _oracle_instances(count, seed):
        exact = gaussian.exact_dark_port_moments(a, z, g)
        m = fockoracle.marginal_moments(fockoracle.output_state(a, z, g), 1)
        worst = max(worst, abs(m.mean - exact.mean), abs(m.variance - exact.variance))
    return CheckResult("gaussian vs fock oracle moments (abs)", worst, 1e-6)


def _construction_equivalence(count: int = 3, seed: int = 11):
    worst = 0.0
    for a, z, g in _oracle_instances(count, seed):
        z = SqueezeParams(min(z.r, 0.8), z.theta)
        n = fockoracle.recommended_cutoff(a, z)
        u = fockoracle.output_state(a, z, g, cutoffs=n)
        d = fockoracle.output_state_direct(a, z, g, cutoffs=n)
        worst = max(worst, 1.0 - fockoracle.fidelity(u, d))
    return CheckResult("splitter route vs exp(rA) route (1 - fidelity)", worst, 1e-9)


def _squeezed_amplitudes():
    worst = 0.0
    for theta in (0.0, 1.3, 3.9):
        z = SqueezeParams(0.9, theta)
        ref = darkport.fock_amplitudes(z, darkport.EffectiveDisplacement(0j, 0.0), 100).to_complex()
        worst = max(worst, float(np.abs(fockoracle.squeezed_vacuum_fock(z, 100) - ref).max()))
    return CheckResult("squeezed vacuum amplitudes, oracle vs darkport", worst, 1e-12)


def _splitter_self_test():
    worst = max(fockoracle.beam_splitter_self_test(g) for g in (0.4, math.pi / 4, math.pi / 2))
    return CheckResult("splitter adjoint action and routing", worst, 1e-10)


def _disentangle_round_trip():
    worst = 0.0
    for r in (0.5, 1.0, 1.5):
        for g in (0.2, 0.8, 1.4):
            z = SqueezeParams(r, 0.6)
            worst = max(worst, disentangle.disentangle(z, g).residual)
    return CheckResult("disentangling reconstruction residual", worst, 1e-10)


def _gaussian_vs_analytic():
    # first-order formulas carry O(delta) relative error
    delta = 1e-3
    alpha, z = CoherentParams(math.sqrt(500.0) / delta), SqueezeParams(1.0)
    exact = gaussian.exact_dark_port_moments(alpha, z, math.pi / 2 - delta)
    approx = darkport.analytic_moments(alpha, z, delta)
    worst = max(_rel(exact.mean, approx.mean), _rel(exact.variance, approx.variance))
    return CheckResult("gaussian exact vs first-order moments (rel)", worst, 5 * delta)


def run_checks() -> list[CheckResult]:
    """Run every check; numerical errors propagate to the caller."""
    results = _fig1_checks()
    results += [
        _gaussian_vs_analytic(),
        _gaussian_vs_oracle(),
        _construction_equivalence(),
        _squeezed_amplitudes(),
        _splitter_self_test(),
        _disentangle_round_trip(),
    ]
    return results
