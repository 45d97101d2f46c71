import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import constants, integrate, special

from subfield_qed import cavity
from subfield_qed.cavity import (CylinderGeometry, DomainError, FieldKind, InvalidModeError, ModeIndex,
                                 Polarization)


@pytest.fixture(scope='session')
def geom():
    return CylinderGeometry(1.0, 2.0)


@pytest.fixture(scope='session')
def sample_modes():
    return [
        ModeIndex(1, 0, 0, Polarization.Mu2),
        ModeIndex(1, 0, 1, Polarization.Mu1),
        ModeIndex(2, 1, 3, Polarization.Mu1),
        ModeIndex(1, 2, 1, Polarization.Mu2),
        ModeIndex(3, 0, 2, Polarization.Mu1),
    ]


class TestModeIndex(object):
    def test_rejects_invalid_labels(self):
        with pytest.raises(InvalidModeError):
            ModeIndex(0, 0, 1, Polarization.Mu2)
        with pytest.raises(InvalidModeError):
            ModeIndex(1, -1, 1, Polarization.Mu2)
        with pytest.raises(InvalidModeError):
            ModeIndex(1, 0, -1, Polarization.Mu2)
        with pytest.raises(InvalidModeError):
            ModeIndex(1, 0, 0, Polarization.Mu1)

    def test_parse(self):
        assert ModeIndex.parse('2, 1, 3, Mu1') == ModeIndex(2, 1, 3, Polarization.Mu1)
        assert ModeIndex(1, 0, 2, 'Mu2').pol is Polarization.Mu2
        with pytest.raises(InvalidModeError):
            ModeIndex.parse('1,0,2')
        with pytest.raises(InvalidModeError):
            ModeIndex.parse('1,0,2,TE')

    def test_mode_set(self):
        assert len(cavity.mode_set(1, 0, 1)) == 3
        modes = cavity.mode_set(2, 1, 1)
        assert len(modes) == 12
        assert len(set(modes)) == len(modes)


class TestGeometry(object):
    def test_from_ratios(self):
        g = CylinderGeometry.from_ratios(1e-10, 20.0, 5.0)
        assert g.R == pytest.approx(2e-9)
        assert g.L == pytest.approx(1e-8)

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            CylinderGeometry(0.0, 1.0)
        with pytest.raises(ValueError):
            CylinderGeometry(1.0, -1.0)

    def test_wavenumbers(self):
        w = cavity.wavenumbers(CylinderGeometry(1.0, np.pi), ModeIndex(1, 0, 2, Polarization.Mu2))
        assert w.k_perp == pytest.approx(special.jn_zeros(0, 1)[0], abs=1e-12)
        assert w.k_long == pytest.approx(2.0)
        assert w.omega == pytest.approx(constants.c * w.k_abs)

    def test_mu1_uses_derivative_zeros(self, geom):
        w = cavity.wavenumbers(geom, ModeIndex(1, 1, 1, Polarization.Mu1))
        assert w.k_perp == pytest.approx(special.jnp_zeros(1, 1)[0], abs=1e-12)

    def test_resonant_frequency(self, geom):
        assert cavity.resonant_frequency(geom, 3, 0) == pytest.approx(constants.c * special.jn_zeros(0, 3)[2])


class TestNormalization(object):
    @pytest.mark.parametrize('idx', [ModeIndex(1, 0, 1, Polarization.Mu1), ModeIndex(2, 3, 1, Polarization.Mu1),
                                     ModeIndex(1, 0, 1, Polarization.Mu2), ModeIndex(4, 2, 1, Polarization.Mu2)])
    def test_transverse(self, geom, idx):
        c = cavity.transverse_normalization(geom, idx)
        k = cavity.wavenumbers(geom, idx).k_perp
        norm, _ = integrate.quad(lambda r: 2 * np.pi * r * (c * special.jv(idx.m2, k * r))**2, 0.0, geom.R,
                                 epsabs=1e-13, epsrel=1e-12, limit=200)
        assert norm == pytest.approx(1.0, rel=1e-10)

    @pytest.mark.parametrize('l', [0, 1, 4])
    def test_longitudinal(self, geom, l):
        n = cavity.longitudinal_normalization(geom, l)
        k = np.pi * l / geom.L
        norm, _ = integrate.quad(lambda z: (n * np.cos(k * z))**2, 0.0, geom.L)
        assert norm == pytest.approx(1.0, rel=1e-12)


class TestModes(object):
    def test_separated_matches_em_mode(self, geom, sample_modes):
        point = (0.4, 1.2, 0.7)
        for idx in sample_modes:
            mode = cavity.em_mode_3d(geom, idx, point)
            np.testing.assert_allclose(cavity.separated_mode(geom, idx, FieldKind.Electric)(*point), mode.u)
            np.testing.assert_allclose(cavity.separated_mode(geom, idx, FieldKind.Magnetic)(*point), mode.v)

    def test_mu1_electric_is_transverse(self, geom):
        u = cavity.em_mode_3d(geom, ModeIndex(2, 1, 3, Polarization.Mu1), (0.3, 0.5, 0.7)).u
        assert u[2] == 0

    def test_l0_mu2_is_axial_and_uniform_in_z(self, geom):
        idx = ModeIndex(1, 0, 0, Polarization.Mu2)
        a = cavity.em_mode_3d(geom, idx, (0.3, 0.5, 0.2)).u
        b = cavity.em_mode_3d(geom, idx, (0.3, 0.5, 1.7)).u
        np.testing.assert_allclose(a, b)
        assert abs(a[0]) == 0 and abs(a[1]) == 0

    def test_axis_is_regular(self, geom):
        u = cavity.em_mode_3d(geom, ModeIndex(1, 1, 1, Polarization.Mu1), (0.0, 0.0, 0.5)).u
        assert np.all(np.isfinite(u))

    def test_outside_point(self, geom, sample_modes):
        with pytest.raises(DomainError):
            cavity.em_mode_3d(geom, sample_modes[0], (1.5, 0.0, 1.0))
        with pytest.raises(DomainError):
            cavity.scalar_modes(geom, sample_modes[0], (0.5, 0.0, 2.5))

    def test_scalar_modes(self, geom):
        idx = ModeIndex(1, 0, 1, Polarization.Mu2)
        s = cavity.scalar_modes(geom, idx, (0.0, 0.0, 0.0))
        assert s.psi_long_mu1 == 0.0
        assert s.psi_long_mu2 == pytest.approx(np.sqrt(2.0 / geom.L))
        assert s.psi_transverse == pytest.approx(cavity.transverse_normalization(geom, idx))

    def test_polarization_vectors_are_unit(self, geom, sample_modes):
        for idx in sample_modes:
            p = cavity.polarization_vectors(geom, idx)
            assert np.linalg.norm(p.epsilon) == pytest.approx(1.0)
            assert np.linalg.norm(p.kappa) == pytest.approx(1.0)

    def test_cylindrical_to_cartesian(self):
        np.testing.assert_allclose(cavity.cylindrical_to_cartesian(np.array([1.0, 0.0, 2.0]), np.pi / 2),
                                   [0.0, 1.0, 2.0], atol=1e-15)


class TestFieldEquations(object):
    @settings(max_examples=20, deadline=None)
    @given(st.floats(min_value=0.05, max_value=0.95), st.floats(min_value=0.0, max_value=2 * np.pi),
           st.floats(min_value=0.05, max_value=1.95))
    def test_helmholtz(self, r, phi, z):
        g = CylinderGeometry(1.0, 2.0)
        for idx in (ModeIndex(2, 1, 3, Polarization.Mu1), ModeIndex(1, 2, 1, Polarization.Mu2)):
            for field in FieldKind:
                assert cavity.helmholtz_residual(g, idx, (r, phi, z), field) < 1e-4

    def test_curl(self, geom, sample_modes):
        for idx in sample_modes:
            assert cavity.curl_residual(geom, idx, (0.45, 2.1, 0.8)) < 1e-5

    def test_boundary(self, geom, sample_modes):
        wall = [(1.0, 0.7, 0.9), (1.0, 3.3, 1.6), (0.4, 1.0, 0.0), (0.8, 5.0, 2.0)]
        for idx in sample_modes:
            for point in wall:
                b = cavity.boundary_check(geom, idx, point)
                assert max(b.tangential_u, b.divergence_u, b.normal_v, b.tangential_curl_v) < 1e-8

    def test_boundary_needs_wall_point(self, geom, sample_modes):
        with pytest.raises(DomainError):
            cavity.boundary_check(geom, sample_modes[0], (0.5, 0.0, 1.0))
