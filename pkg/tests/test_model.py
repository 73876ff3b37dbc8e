import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import stenoflow as sf
from stenoflow.model import Regime

UNIT = sf.unit_vessel()

st_area = st.floats(min_value=1e-4, max_value=1e4, allow_nan=False)
st_speed = st.floats(min_value=-10.0, max_value=10.0, allow_nan=False)


class TestPressure:
    def test_zero_at_reference(self):
        assert sf.pressure(1.0, UNIT) == 0.0

    def test_direct_substitution(self):
        vessel = sf.VesselParams(beta=2.0, A0=1.0, rho=1.0)
        assert sf.pressure(4.0, vessel) == pytest.approx(2.0, rel=1e-14)

    def test_hand_evaluated_contraction(self):
        # sqrt(0.81) = 0.9 exactly, so P = 0.9 - 1 = -0.1
        assert sf.pressure(0.81, UNIT) == pytest.approx(-0.1, rel=1e-12)

    @pytest.mark.parametrize("bad", [0.0, -1.0])
    def test_rejects_nonpositive_area(self, bad):
        with pytest.raises(ValueError):
            sf.pressure(bad, UNIT)

    @given(a=st_area, factor=st.floats(min_value=1.01, max_value=10.0))
    @settings(max_examples=200, deadline=None)
    def test_strictly_increasing(self, a, factor):
        assert sf.pressure(a * factor, UNIT) > sf.pressure(a, UNIT)

    @given(a=st_area)
    @settings(max_examples=200, deadline=None)
    def test_inverse_round_trip(self, a):
        y = sf.pressure(a, UNIT)
        assert sf.pressure_inverse(y, UNIT) == pytest.approx(a, rel=1e-12)


class TestEigenvalues:
    def test_symmetric_at_rest(self):
        lam1, lam2 = sf.eigenvalues(1.0, 0.0, UNIT)
        assert lam1 == pytest.approx(math.sqrt(0.5), rel=1e-14)
        assert lam2 == pytest.approx(-math.sqrt(0.5), rel=1e-14)

    def test_shift_by_speed(self):
        lam1, lam2 = sf.eigenvalues(1.0, 0.5, UNIT)
        assert lam1 == pytest.approx(0.5 + math.sqrt(0.5), rel=1e-14)
        assert lam2 == pytest.approx(0.5 - math.sqrt(0.5), rel=1e-14)

    def test_physiological_state_is_subcritical(self):
        vessel = sf.physiological_vessel()
        lam2 = sf.eigenvalues(3.0e-5, 0.3, vessel)[1]
        assert lam2 < 0.0

    @given(a=st_area, v=st_speed)
    @settings(max_examples=200, deadline=None)
    def test_ordering(self, a, v):
        lam1, lam2 = sf.eigenvalues(a, v, UNIT)
        assert lam1 > lam2


class TestRegime:
    def test_rest_is_subcritical(self):
        assert sf.classify_regime(1.0, 0.0, UNIT, tol=1e-12) is Regime.SUBCRITICAL

    def test_exact_wave_speed_is_critical(self):
        c = UNIT.celerity_coeff * 1.0**0.25
        assert sf.classify_regime(1.0, c, UNIT, tol=1e-12) is Regime.CRITICAL

    def test_twice_wave_speed_is_supercritical(self):
        c = UNIT.celerity_coeff
        assert sf.classify_regime(1.0, 2.0 * c, UNIT, tol=1e-12) is Regime.SUPERCRITICAL

    def test_negative_tolerance_rejected(self):
        with pytest.raises(ValueError):
            sf.classify_regime(1.0, 0.0, UNIT, tol=-1.0)

    def test_strict_hyperbolicity_inside_operating_region(self):
        # subcritical with V > 0 implies lam1 > 0 > lam2
        rng = np.random.default_rng(9)
        from support import sample_subcritical

        for vessel in (UNIT, sf.physiological_vessel()):
            A, V = sample_subcritical(rng, vessel, 2000)
            lam1, lam2 = sf.eigenvalues(A, V, vessel)
            assert np.all(lam2 < 0.0)
            assert np.all(lam1 > 0.0)
            assert sf.classify_regime(float(A[0]), float(V[0]), vessel) is Regime.SUBCRITICAL


class TestRiemannTransforms:
    def test_antisymmetric_at_rest(self):
        u, v = sf.to_riemann(1.0, 0.0, UNIT)
        assert u == pytest.approx(2.0 * math.sqrt(2.0), rel=1e-14)
        assert v == pytest.approx(-2.0 * math.sqrt(2.0), rel=1e-14)

    def test_direct_formula_case(self):
        # u = 1 + 2*sqrt(2)*16**0.25 = 1 + 4*sqrt(2)
        u, v = sf.to_riemann(16.0, 1.0, UNIT)
        assert u == pytest.approx(1.0 + 4.0 * math.sqrt(2.0), rel=1e-13)
        assert v == pytest.approx(1.0 - 4.0 * math.sqrt(2.0), rel=1e-13)

    def test_inverse_of_direct_case(self):
        A, V = sf.from_riemann(1.0 + 4.0 * math.sqrt(2.0), 1.0 - 4.0 * math.sqrt(2.0), UNIT)
        assert A == pytest.approx(16.0, rel=1e-13)
        assert V == pytest.approx(1.0, rel=1e-13)

    def test_degenerate_pair_rejected(self):
        with pytest.raises(sf.SingularStateError):
            sf.from_riemann(1.0, 1.0, UNIT)
        with pytest.raises(ValueError):
            sf.from_riemann(1.0, 2.0, UNIT)

    def test_area_scales_quartically_near_collapse(self):
        A1 = sf.from_riemann(1e-4, 0.0, UNIT).A
        A2 = sf.from_riemann(2e-4, 0.0, UNIT).A
        assert A2 / A1 == pytest.approx(16.0, rel=1e-10)

    @given(a=st_area, v=st_speed)
    @settings(max_examples=300, deadline=None)
    def test_round_trip(self, a, v):
        state = sf.from_riemann(*sf.to_riemann(a, v, UNIT), UNIT)
        assert state.A == pytest.approx(a, rel=1e-12)
        assert state.V == pytest.approx(v, rel=1e-12, abs=1e-12)

    @given(a=st_area, v=st_speed)
    @settings(max_examples=200, deadline=None)
    def test_ordering(self, a, v):
        u, w = sf.to_riemann(a, v, UNIT)
        assert u > w


class TestCharSpeeds:
    def test_matches_eigenvalues_at_rest(self):
        u, v = sf.to_riemann(1.0, 0.0, UNIT)
        lam1, lam2 = sf.char_speeds(u, v)
        assert lam1 == pytest.approx(math.sqrt(0.5), rel=1e-12)
        assert lam2 == pytest.approx(-math.sqrt(0.5), rel=1e-12)

    def test_degenerate_pair_collapses(self):
        lam1, lam2 = sf.char_speeds(0.7, 0.7)
        assert lam1 == lam2 == pytest.approx(0.7)

    @given(a=st_area, v=st_speed)
    @settings(max_examples=300, deadline=None)
    def test_consistency_with_primitive_eigenvalues(self, a, v):
        u, w = sf.to_riemann(a, v, UNIT)
        lam1, lam2 = sf.char_speeds(u, w)
        bar1, bar2 = sf.eigenvalues(a, v, UNIT)
        assert lam1 == pytest.approx(bar1, rel=1e-12, abs=1e-12)
        assert lam2 == pytest.approx(bar2, rel=1e-12, abs=1e-12)

    @given(u=st_speed, v=st_speed)
    @settings(max_examples=200, deadline=None)
    def test_gap_identity(self, u, v):
        lam1, lam2 = sf.char_speeds(u, v)
        assert lam1 - lam2 == pytest.approx((u - v) / 4.0, rel=1e-12, abs=1e-12)


class TestFrictionSource:
    def test_zero_speed_gives_zero(self):
        vessel = sf.unit_vessel(K_r=0.5)
        assert sf.friction_source(2.0, -2.0, vessel) == 0.0

    def test_frictionless_gives_zero(self):
        assert sf.friction_source(3.0, -1.0, UNIT) == 0.0

    def test_direct_case(self):
        # oracle: -K_r*V/A = -0.5 at A = 1, V = 1
        vessel = sf.unit_vessel(K_r=0.5)
        u, v = sf.to_riemann(1.0, 1.0, vessel)
        assert sf.friction_source(u, v, vessel) == pytest.approx(-0.5, rel=1e-10)

    def test_floor_guard(self):
        vessel = sf.unit_vessel(K_r=0.5)
        with pytest.raises(sf.SingularStateError):
            sf.friction_source(1.0, 1.0 - 1e-10, vessel)

    @given(a=st_area, v=st_speed)
    @settings(max_examples=300, deadline=None)
    def test_equivalence_with_primitive_form(self, a, v):
        vessel = sf.unit_vessel(K_r=0.7)
        u, w = sf.to_riemann(a, v, vessel)
        expected = -vessel.K_r * v / a
        # u + w cancels in floats; the identity cannot be sharper than that noise
        noise = 8.0 * 2.2e-16 * 512.0 * vessel.K_r * max(abs(u), abs(w)) / (u - w) ** 4
        assert sf.friction_source(u, w, vessel) == pytest.approx(
            expected, rel=1e-10, abs=noise
        )


class TestFlowFromRiemann:
    def test_zero_speed_gives_zero_flow(self):
        assert sf.flow_from_riemann(2.5, -2.5, UNIT) == 0.0

    def test_unit_identity(self):
        u, v = sf.to_riemann(1.0, 1.0, UNIT)
        assert sf.flow_from_riemann(u, v, UNIT) == pytest.approx(1.0, rel=1e-12)

    def test_direct_case(self):
        # oracle: A*V = 16 at A = 16, V = 1
        u, v = sf.to_riemann(16.0, 1.0, UNIT)
        assert sf.flow_from_riemann(u, v, UNIT) == pytest.approx(16.0, rel=1e-12)

    @given(a=st_area, v=st_speed)
    @settings(max_examples=300, deadline=None)
    def test_flux_identity(self, a, v):
        u, w = sf.to_riemann(a, v, UNIT)
        # u + w cancels in floats; the identity cannot be sharper than that noise
        noise = 8.0 * 2.2e-16 / 4.0**5.5 * (u - w) ** 4 * max(abs(u), abs(w))
        assert sf.flow_from_riemann(u, w, UNIT) == pytest.approx(
            a * v, rel=1e-12, abs=noise
        )


class TestFundamentalDiagram:
    F0 = 2.0 * math.sqrt(2.0)  # makes A1 = 1 on the unit preset

    def test_speed_at_zero_area(self):
        assert sf.fd_speed(0.0, self.F0, UNIT) == self.F0

    def test_speed_vanishes_at_critical_area(self):
        assert sf.fd_speed(1.0, self.F0, UNIT) == 0.0

    def test_speed_quarter_scaling(self):
        # F(A1/16) = F0*(1 - 1/2) = sqrt(2)
        A1 = sf.fd_critical_area(self.F0, UNIT)
        assert sf.fd_speed(A1 / 16.0, self.F0, UNIT) == pytest.approx(
            math.sqrt(2.0), rel=1e-12
        )

    def test_critical_area_value(self):
        assert sf.fd_critical_area(self.F0, UNIT) == pytest.approx(1.0, rel=1e-12)

    def test_speed_strictly_decreasing(self):
        A = np.linspace(0.0, 1.0, 200)
        F = sf.fd_speed(A, self.F0, UNIT)
        assert np.all(np.diff(F) < 0.0)

    def test_flow_endpoints(self):
        A1 = sf.fd_critical_area(self.F0, UNIT)
        assert sf.fd_flow(0.0, self.F0, UNIT) == 0.0
        assert abs(sf.fd_flow(A1, self.F0, UNIT)) <= 1e-13 * self.F0 * A1

    def test_flow_domain_error(self):
        A1 = sf.fd_critical_area(self.F0, UNIT)
        with pytest.raises(ValueError):
            sf.fd_flow(A1 * 1.001, self.F0, UNIT)
        with pytest.raises(ValueError):
            sf.fd_flow(-0.1, self.F0, UNIT)

    def test_discrete_concavity(self):
        # oracle: second central differences on 100 interior points
        A1 = sf.fd_critical_area(self.F0, UNIT)
        A = np.linspace(0.0, A1, 102)
        Q = sf.fd_flow(A, self.F0, UNIT)
        second = Q[2:] - 2.0 * Q[1:-1] + Q[:-2]
        assert second.size == 100
        assert np.all(second < 0.0)

    def test_rejects_nonpositive_f0(self):
        with pytest.raises(ValueError):
            sf.fd_speed(0.5, 0.0, UNIT)
        with pytest.raises(ValueError):
            sf.fd_critical_area(-1.0, UNIT)
