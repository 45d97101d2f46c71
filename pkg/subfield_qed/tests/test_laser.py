import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from openmm import unit
from scipy import constants

from subfield_qed import laser, quadrature
from subfield_qed.interaction import GaussianAtom, Switching, SwitchingKind, TransitionKind, WindowConvention
from subfield_qed.laser import BeamModeIndex, BeamPolarization, HermiteBeam
from subfield_qed.specfun import SpecialFunctionDomainError

BOHR = constants.physical_constants['Bohr radius'][0]


@pytest.fixture(scope='session')
def beam():
    return HermiteBeam(w0=1e-5, k=1e7)


@pytest.fixture(scope='session')
def atom():
    return GaussianAtom(BOHR, 1e15)


def laser_setup(omega_ratio, tau, alpha_sq=1e20, omega_a=1e15):
    atom = GaussianAtom(BOHR, omega_a)
    beam = HermiteBeam(w0=1e-6, k=omega_ratio * omega_a / constants.c, alpha_sq=alpha_sq)
    return atom, beam, Switching(SwitchingKind.Gaussian, tau / omega_a)


class TestHermiteBeam(object):
    def test_geometry(self, beam):
        assert beam.rayleigh_length == pytest.approx(0.5 * 1e7 * 1e-10)
        assert beam.waist(beam.rayleigh_length) == pytest.approx(math.sqrt(2.0) * beam.w0)
        assert beam.curvature_radius(0.0) == np.inf
        assert beam.curvature_radius(beam.rayleigh_length) == pytest.approx(2.0 * beam.rayleigh_length)
        assert beam.gouy_phase(beam.rayleigh_length) == pytest.approx(math.pi / 4)
        assert beam.omega == pytest.approx(constants.c * 1e7)

    def test_validation(self):
        with pytest.raises(ValueError):
            HermiteBeam(w0=0.0, k=1.0)
        with pytest.raises(ValueError):
            HermiteBeam(w0=1.0, k=1.0, alpha_sq=-1.0)
        assert HermiteBeam(w0=1.0, k=1.0, pol='EpsY').pol is BeamPolarization.EpsY

    def test_mode_index(self):
        assert BeamModeIndex.parse('3,2') == BeamModeIndex(3, 2)
        with pytest.raises(ValueError):
            BeamModeIndex(-1, 0)
        with pytest.raises(SpecialFunctionDomainError):
            BeamModeIndex(41, 0)


class TestBeamModes(object):
    def test_separable_modes_orthonormal(self):
        beam = HermiteBeam(w0=1.0, k=100.0)
        modes = [BeamModeIndex(0, 0), BeamModeIndex(1, 0), BeamModeIndex(2, 1), BeamModeIndex(3, 2)]

        def integrand(x, y):
            values = np.array([laser.separable_mode(beam, m, x, y) for m in modes])
            return np.outer(values, values)

        G = quadrature.integrate_2d(integrand, quadrature.Rectangle(-8.0, 8.0, -8.0, 8.0), tol_rel=1e-10).value
        np.testing.assert_allclose(G, np.eye(len(modes)), atol=1e-8)

    def test_full_mode_at_focus_is_separable(self, beam):
        m = BeamModeIndex(1, 2)
        x, y = 0.3 * beam.w0, -0.2 * beam.w0
        full = laser.hermite_mode_full(beam, m, (x, y, 0.0))
        assert full[0] == pytest.approx(laser.separable_mode(beam, m, x, y), rel=1e-12)
        assert full[1] == 0 and full[2] == 0

    def test_separable_error_grows_with_z(self, beam):
        m = BeamModeIndex(1, 2)
        x, y = 0.3 * beam.w0, -0.2 * beam.w0
        errors = [abs(laser.hermite_mode_full(beam, m, (x, y, z * beam.rayleigh_length))[0] -
                      laser.separable_mode(beam, m, x, y)) for z in (0.1, 0.3, 1.0)]
        assert errors[0] < errors[1] < errors[2]

    @pytest.mark.parametrize('point', [(0.1, 0.2, 0.0), (0.3, -0.2, 0.5), (-0.4, 0.1, 1.0)])
    def test_paraxial_equation(self, beam, point):
        x, y, z = point
        m = BeamModeIndex(1, 2)
        residual = laser.paraxial_residual(beam, m, (x * beam.w0, y * beam.w0, z * beam.rayleigh_length))
        assert residual < 1e-3

    def test_helmholtz_residual_is_larger(self, beam):
        m = BeamModeIndex(0, 0)
        point = (0.2 * beam.w0, 0.1 * beam.w0, 0.5 * beam.rayleigh_length)
        assert laser.paraxial_residual(beam, m, point, equation='helmholtz') >= laser.paraxial_residual(
            beam, m, point)
        with pytest.raises(ValueError):
            laser.paraxial_residual(beam, m, point, equation='wave')

    def test_nonfinite_point(self, beam):
        with pytest.raises(ValueError):
            laser.hermite_mode_full(beam, BeamModeIndex(0, 0), (0.0, np.nan, 0.0))


class TestReducedSmearing(object):
    def test_selection_rule(self, atom):
        beam = HermiteBeam(w0=20 * BOHR, k=1e7)
        z = np.array([0.5, 1.0]) * BOHR
        assert np.all(laser.reduced_smearing(atom, beam, BeamModeIndex(2, 0), z) == 0)
        assert np.all(laser.reduced_smearing(atom, beam, BeamModeIndex(1, 1), z) == 0)

    @pytest.mark.parametrize('m', [BeamModeIndex(1, 0), BeamModeIndex(3, 2), BeamModeIndex(1, 4)])
    def test_matches_quadrature(self, atom, m):
        beam = HermiteBeam(w0=20 * BOHR, k=1e7)
        z = 0.7 * BOHR
        closed = laser.reduced_smearing(atom, beam, m, z)
        numeric = laser.reduced_smearing_numeric(atom, beam, m, z)
        assert closed == pytest.approx(numeric, rel=1e-7)

    def test_leading_order(self, atom):
        beam = HermiteBeam(w0=1000 * BOHR, k=1e7)
        z = 0.7 * BOHR
        m = BeamModeIndex(1, 0)
        exact = laser.reduced_smearing(atom, beam, m, z)
        assert laser.reduced_smearing(atom, beam, m, z, approximate=True) == pytest.approx(exact, rel=1e-4)


class TestCouplings(object):
    def test_gamma_closed_matches_sum(self):
        for n1 in range(9):
            for n2 in range(9):
                assert laser.gamma_closed((n1, n2)) == pytest.approx(laser.gamma_sum((n1, n2)), abs=1e-10)

    def test_gamma_smallest(self):
        assert laser.gamma_closed((1, 0)) == pytest.approx(1.0 / 6.0, abs=1e-12)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(min_value=0, max_value=20), st.integers(min_value=0, max_value=20))
    def test_gamma_monotone(self, n1, n2):
        assert laser.gamma_sum((n1 + 1, n2)) >= laser.gamma_sum((n1, n2))
        assert laser.gamma_sum((n1, n2 + 1)) > laser.gamma_sum((n1, n2))

    def test_pumped_mode_exclusion(self, atom):
        c = laser.laser_couplings(atom, HermiteBeam(w0=1e-6, k=1e7), (8, 8))
        assert c.gamma_sum - c.gamma_sum_pumped == pytest.approx(1.0 / 12.0, abs=1e-12)
        with pytest.raises(ValueError):
            laser.laser_couplings(atom, HermiteBeam(w0=1e-6, k=1e7), (-1, 0))

    def test_coupling_units(self):
        # c e^2 k^3 sigma^6 / (hbar eps0 w0^4)
        speed = unit.meter / unit.second
        charge = unit.elementary_charge
        hbar = unit.joule * unit.second
        eps0 = charge**2 / (unit.joule * unit.meter)
        g_unit = speed * charge**2 * unit.meter**-3 * unit.meter**6 / (hbar * eps0 * unit.meter**4)
        assert g_unit.is_compatible(unit.meter / unit.second**2)
        # |f|^2 carries s^2, so each term of P is a density per unit wavenumber
        assert (g_unit * unit.second**2).is_compatible(unit.meter)

    def test_coupling_value(self, atom):
        beam = HermiteBeam(w0=1e-6, k=1e7)
        expected = 3 * constants.c * constants.e**2 * 1e21 * BOHR**6 * math.exp(-0.5 * (1e7 * BOHR)**2) / (
            constants.hbar * constants.epsilon_0 * math.pi**4 * 1e-24)
        assert laser.coupling_g(atom, beam) == pytest.approx(expected, rel=1e-12)


class TestTimeFactors(object):
    @pytest.mark.parametrize('kind', list(SwitchingKind))
    @pytest.mark.parametrize('omega,omega_a', [(0.5, 1.0), (2.0, 1.5), (3.0, 0.2)])
    def test_matches_quadrature(self, kind, omega, omega_a):
        sw = Switching(kind, 1.1)
        assert laser.laser_time_factor(sw, omega, omega_a) == pytest.approx(
            laser.laser_time_factor_numeric(sw, omega, omega_a), rel=1e-8)

    def test_printed_convention(self):
        sw = Switching(SwitchingKind.Gaussian, 1.1, WindowConvention.PRINTED)
        assert laser.laser_time_factor(sw, 2.0, 1.5) == pytest.approx(laser.laser_time_factor_numeric(sw, 2.0, 1.5),
                                                                      rel=1e-8)

    def test_displayed_top_hat_differs(self):
        sw = Switching(SwitchingKind.TopHat, 1.0)
        displayed = laser.laser_time_factor_displayed(sw, 3.0, 1.0) * sw.T**2
        assert abs(displayed / laser.laser_time_factor_numeric(sw, 3.0, 1.0) - 1) > 1e-3


class TestZeta(object):
    def test_probability_split(self):
        atom, beam, sw = laser_setup(1.0, 1.0, alpha_sq=1.0)
        p = laser.laser_probability(atom, beam, sw, TransitionKind.Excitation, (8, 8))
        assert p.P == pytest.approx(p.laser_term + p.vacuum_term)
        z = laser.zeta(atom, beam, sw, 'Excitation', (8, 8))
        assert z.value == pytest.approx(p.vacuum_term / p.laser_term, rel=1e-10)

    @settings(max_examples=40, deadline=None)
    @given(st.floats(min_value=0.2, max_value=4.0), st.floats(min_value=0.2, max_value=3.0))
    def test_bound_for_gaussian_excitation(self, tau, ratio):
        atom, beam, sw = laser_setup(ratio, tau)
        z = laser.zeta(atom, beam, sw, TransitionKind.Excitation, (8, 8))
        assert z.holds
        assert z.bound == pytest.approx(laser.gamma_sum((8, 8)) / 4e20)

    def test_emission_can_exceed_bound(self):
        atom, beam, _ = laser_setup(1.0, 1.0, alpha_sq=1.0)
        sw = Switching(SwitchingKind.Gaussian, math.sqrt(3.0) / atom.omega_a)
        assert not laser.zeta(atom, beam, sw, TransitionKind.Emission, (8, 8)).holds

    def test_needs_populated_mode(self):
        atom, beam, sw = laser_setup(1.0, 1.0, alpha_sq=0.0)
        with pytest.raises(ValueError):
            laser.zeta(atom, beam, sw, TransitionKind.Excitation, (8, 8))
