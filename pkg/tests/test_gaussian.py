import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sqzport import darkport
from sqzport.gaussian import (
    GaussianTwoMode,
    apply_beam_splitter,
    exact_dark_port_mean,
    exact_dark_port_moments,
    input_state,
    photon_moments,
)
from sqzport.states import CoherentParams, SqueezeParams

angles = st.floats(0, 2 * math.pi)


class TestInputState:
    def test_vacuum(self):
        s = input_state(CoherentParams(0.0), SqueezeParams(0.0))
        assert np.all(s.mean == 0) and np.allclose(s.cov, np.eye(4) / 2)

    def test_squeezed_quadratures(self):
        s = input_state(CoherentParams(0.0), SqueezeParams(1.0, 0.0))
        # x is squeezed at theta = 0: e^{-2}/2 and e^{2}/2 (mpmath)
        assert s.cov[2, 2] == pytest.approx(0.06766764161830635, rel=1e-14)
        assert s.cov[3, 3] == pytest.approx(3.694528049465325, rel=1e-14)

    def test_coherent_mean(self):
        s = input_state(CoherentParams(2.0, 0.0), SqueezeParams(0.0))
        assert np.allclose(s.mean, [2 * math.sqrt(2), 0, 0, 0])

    @given(st.floats(0, 3), angles, st.floats(0, 2), angles)
    def test_physical_and_pure(self, mag, phi, r, theta):
        s = input_state(CoherentParams(mag, phi), SqueezeParams(r, theta))
        assert s.is_physical()
        assert s.purity_determinant() == pytest.approx(1.0, abs=1e-9)

    def test_asymmetric_covariance_rejected(self):
        cov = np.eye(4) / 2
        cov[0, 1] = 0.1
        with pytest.raises(ValueError):
            GaussianTwoMode(np.zeros(4), cov)


class TestBeamSplitter:
    def test_identity_at_zero(self):
        s = input_state(CoherentParams(1.3, 0.4), SqueezeParams(0.7, 1.0))
        t = apply_beam_splitter(s, 0.0)
        assert np.allclose(t.mean, s.mean) and np.allclose(t.cov, s.cov)

    def test_full_swap_routes_laser_to_port_two(self):
        s = input_state(CoherentParams(2.0), SqueezeParams(0.0))
        t = apply_beam_splitter(s, math.pi / 2)
        assert np.allclose(t.mean, [0, 0, 2 * math.sqrt(2), 0], atol=1e-15)

    @given(st.floats(0, math.pi / 2))
    def test_vacuum_invariant(self, gamma):
        t = apply_beam_splitter(input_state(CoherentParams(0.0), SqueezeParams(0.0)), gamma)
        assert np.allclose(t.cov, np.eye(4) / 2, atol=1e-15)

    @given(st.floats(0, 2), angles, st.floats(0, 1.5), angles, st.floats(0, math.pi / 2))
    def test_purity_and_photon_number_conserved(self, mag, phi, r, theta, gamma):
        s = input_state(CoherentParams(mag, phi), SqueezeParams(r, theta))
        t = apply_beam_splitter(s, gamma)
        assert t.purity_determinant() == pytest.approx(s.purity_determinant(), abs=1e-12)
        before = photon_moments(s, 1).mean + photon_moments(s, 2).mean
        after = photon_moments(t, 1).mean + photon_moments(t, 2).mean
        assert after == pytest.approx(before, rel=1e-10, abs=1e-12)


class TestPhotonMoments:
    def test_vacuum(self):
        m = photon_moments(input_state(CoherentParams(0.0), SqueezeParams(0.0)), 1)
        assert m.mean == pytest.approx(0, abs=1e-15) and m.variance == pytest.approx(0, abs=1e-15)

    def test_coherent(self):
        m = photon_moments(input_state(CoherentParams(3.0, 1.1), SqueezeParams(0.0)), 1)
        assert m.mean == pytest.approx(9.0) and m.variance == pytest.approx(9.0)

    def test_squeezed_vacuum(self):
        m = photon_moments(input_state(CoherentParams(0.0), SqueezeParams(1.0, 0.4)), 2)
        assert m.mean == pytest.approx(1.3810978455418157, rel=1e-13)
        assert m.variance == pytest.approx(6.577058209004122, rel=1e-13)


class TestDarkPort:
    def test_open_port(self):
        m = exact_dark_port_moments(CoherentParams(4.0), SqueezeParams(0.8), 0.0)
        assert m.mean == pytest.approx(16.0) and m.variance == pytest.approx(16.0)

    def test_closed_port(self):
        m = exact_dark_port_moments(CoherentParams(4.0), SqueezeParams(0.8), math.pi / 2)
        assert m.mean == pytest.approx(math.sinh(0.8) ** 2, rel=1e-13)

    @settings(deadline=None)
    @given(st.floats(0, 50), angles, st.floats(0, 1.5), angles, st.floats(0, math.pi / 2))
    def test_mean_closed_form_and_phase_free(self, mag, phi, r, theta, gamma):
        a, z = CoherentParams(mag, phi), SqueezeParams(r, theta)
        exact = exact_dark_port_moments(a, z, gamma).mean
        ref = exact_dark_port_mean(a, z, gamma)
        assert exact == pytest.approx(ref, rel=1e-12, abs=1e-12)
        aligned = exact_dark_port_moments(CoherentParams(mag), SqueezeParams(r), gamma).mean
        assert exact == pytest.approx(aligned, rel=1e-12, abs=1e-12)

    def test_squeeze_phase_convention(self):
        # aligned phases must pick up e^{-2r}, opposed phases e^{+2r}
        mag, delta, r = 1e4, 1e-3, 1.0
        good = exact_dark_port_moments(CoherentParams(mag), SqueezeParams(r, 0.0), math.pi / 2 - delta)
        bad = exact_dark_port_moments(CoherentParams(mag), SqueezeParams(r, math.pi), math.pi / 2 - delta)
        signal = (mag * delta) ** 2
        tail = 2 * math.sinh(r) ** 2 * math.cosh(r) ** 2
        assert good.variance == pytest.approx(signal * math.exp(-2 * r) + tail, rel=1e-3)
        assert bad.variance == pytest.approx(signal * math.exp(2 * r) + tail, rel=1e-3)

    def test_first_order_agreement_with_closed_form(self):
        delta = math.sqrt(25.0) / 223.607
        a, z = CoherentParams(223.607, 0.35), SqueezeParams(1.0, 0.7)
        exact = exact_dark_port_moments(a, z, math.pi / 2 - delta)
        approx = darkport.analytic_moments(a, z, delta)
        assert exact.mean == pytest.approx(approx.mean, rel=5 * delta)
        assert exact.variance == pytest.approx(approx.variance, rel=5 * delta)
        closed = 223.607**2 * math.sin(delta) ** 2 + math.cos(delta) ** 2 * math.sinh(1.0) ** 2
        assert exact.mean == pytest.approx(closed, rel=1e-13)

    def test_discrepancy_vanishes_with_offset(self):
        ratios = []
        for delta in (0.1, 0.05, 0.01):
            a, z = CoherentParams(math.sqrt(500) / delta), SqueezeParams(1.0)
            exact = exact_dark_port_moments(a, z, math.pi / 2 - delta).mean
            approx = darkport.analytic_moments(a, z, delta).mean
            ratios.append(abs(exact - approx) / approx)
        assert ratios[0] > ratios[1] > ratios[2]
