import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sqzport.states import (
    CoherentParams,
    Moments,
    PhotonDistribution,
    PortGeometry,
    SqueezeParams,
    derived_quantities,
)


def test_angles_normalized():
    assert CoherentParams(1.0, -math.pi / 2).phase == pytest.approx(1.5 * math.pi)
    assert SqueezeParams(0.5, 5 * math.pi).theta == pytest.approx(math.pi)
    assert 0.0 <= SqueezeParams(0.5, -1e-18).theta < 2 * math.pi


@pytest.mark.parametrize("bad", [-1.0, math.nan, math.inf])
def test_invalid_magnitudes(bad):
    with pytest.raises(ValueError):
        CoherentParams(bad)
    with pytest.raises(ValueError):
        SqueezeParams(bad)


def test_geometry_delta_consistent():
    g = PortGeometry.from_delta(0.1)
    assert g.gamma == pytest.approx(math.pi / 2 - 0.1)
    assert g.delta == pytest.approx(0.1)
    with pytest.raises(ValueError):
        PortGeometry(2.0)


def test_fig1_signal_strength():
    alpha = CoherentParams(223.606797749979, 0.3)
    dq = derived_quantities(alpha, SqueezeParams(1.0, 0.6), PortGeometry.from_delta(0.1))
    assert dq.delta_alpha_sq == pytest.approx(500.0, rel=1e-12)
    assert dq.phase_mismatch == pytest.approx(0.0, abs=1e-12)


def test_zero_offset_and_mismatch():
    dq = derived_quantities(CoherentParams(10.0, math.pi / 4), SqueezeParams(1.0, math.pi), PortGeometry(math.pi / 2))
    assert dq.delta_alpha_sq == 0.0
    assert dq.phase_mismatch == pytest.approx(math.pi / 2)


@given(st.floats(0.1, 10.0), st.floats(0.01, 0.3), st.floats(0.2, 5.0))
def test_signal_scale_invariance(mag, delta, c):
    a = derived_quantities(CoherentParams(mag), SqueezeParams(0.0), PortGeometry.from_delta(delta))
    b = derived_quantities(CoherentParams(c * mag), SqueezeParams(0.0), PortGeometry.from_delta(delta / c))
    assert a.delta_alpha_sq == pytest.approx(b.delta_alpha_sq, rel=1e-12)


def test_moments_reject_negative_variance():
    with pytest.raises(ValueError):
        Moments(1.0, -0.5)
    assert Moments(1.0, -1e-15).variance == 0.0


def test_distribution_container():
    d = PhotonDistribution(np.array([0.25, 0.5, 0.25]))
    assert d.cutoff == 2
    assert d.normalization_residual == 0.0
    m = d.moments()
    assert m.mean == pytest.approx(1.0) and m.variance == pytest.approx(0.5)
    with pytest.raises(ValueError):
        PhotonDistribution(np.array([0.5, 1.5]))


def test_local_maxima_plateau_counts_once():
    d = PhotonDistribution(np.array([0.1, 0.3, 0.3, 0.2, 0.05, 0.05]))
    assert list(d.local_maxima()) == [1]
    d = PhotonDistribution(np.array([0.4, 0.1, 0.2, 0.0, 0.0]))
    assert list(d.local_maxima()) == [0, 2]


def test_total_variation_pads():
    a = PhotonDistribution(np.array([1.0]))
    b = PhotonDistribution(np.array([0.5, 0.5]))
    assert a.total_variation(b) == pytest.approx(0.5)
