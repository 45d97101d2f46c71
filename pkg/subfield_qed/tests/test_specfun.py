import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from subfield_qed import specfun
from subfield_qed.specfun import AuxFunction, SpecialFunctionDomainError, ZeroKind


@pytest.fixture(scope='session')
def zero_tables():
    return {(kind, n): specfun.bessel_zeros(kind, n, 30) for kind in ZeroKind for n in range(6)}


class TestBesselJ(object):
    def test_matches_scipy(self):
        x = np.linspace(0.0, 50.0, 101)
        for n in (0, 1, 5, 20):
            np.testing.assert_allclose(specfun.bessel_j(n, x), special.jv(n, x), rtol=0, atol=1e-14)
            np.testing.assert_allclose(specfun.bessel_j(n, x, derivative=True), special.jvp(n, x), atol=1e-14)

    def test_scalar_in_scalar_out(self):
        assert isinstance(specfun.bessel_j(1, 2.0), float)
        assert specfun.bessel_j(0, 0.0) == 1.0

    def test_order_out_of_range(self):
        with pytest.raises(SpecialFunctionDomainError):
            specfun.bessel_j(-1, 1.0)
        with pytest.raises(SpecialFunctionDomainError):
            specfun.bessel_j(specfun.MAX_BESSEL_ORDER + 1, 1.0)
        with pytest.raises(SpecialFunctionDomainError):
            specfun.bessel_j(1.5, 1.0)

    def test_nonfinite_argument(self):
        with pytest.raises(SpecialFunctionDomainError):
            specfun.bessel_j(0, np.inf)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(min_value=1, max_value=30), st.floats(min_value=0.1, max_value=80.0))
    def test_recurrence(self, n, x):
        # J_{n-1} + J_{n+1} = 2n/x J_n
        lhs = specfun.bessel_j(n - 1, x) + specfun.bessel_j(n + 1, x)
        assert abs(lhs - 2.0 * n / x * specfun.bessel_j(n, x)) < 1e-12 * max(1.0, 2.0 * n / x)


class TestBesselZeros(object):
    def test_known_values(self):
        assert specfun.bessel_zero(ZeroKind.OfBessel, 0, 1) == pytest.approx(2.404825557695773, abs=1e-13)
        assert specfun.bessel_zero(ZeroKind.OfBessel, 1, 1) == pytest.approx(3.831705970207512, abs=1e-13)
        assert specfun.bessel_zero(ZeroKind.OfBesselDerivative, 1, 1) == pytest.approx(1.841183781340659,
                                                                                      abs=1e-13)
        # the trivial zero of J_0' at x = 0 is not counted
        assert specfun.bessel_zero(ZeroKind.OfBesselDerivative, 0, 1) == pytest.approx(3.831705970207512,
                                                                                      abs=1e-13)

    def test_zeros_are_roots(self, zero_tables):
        for (kind, n), zeros in zero_tables.items():
            zeros = np.array(zeros)
            f = special.jv(n, zeros) if kind is ZeroKind.OfBessel else special.jvp(n, zeros)
            assert np.max(np.abs(f)) < 1e-12

    def test_strictly_increasing(self, zero_tables):
        for zeros in zero_tables.values():
            assert np.all(np.diff(zeros) > 0)

    def test_interlacing(self, zero_tables):
        # j'_{n,s} < j_{n,s} < j'_{n,s+1}
        for n in range(1, 6):
            j = np.array(zero_tables[(ZeroKind.OfBessel, n)])
            jp = np.array(zero_tables[(ZeroKind.OfBesselDerivative, n)])
            assert np.all(jp[:-1] < j[:-1])
            assert np.all(j[:-1] < jp[1:])

    def test_growing_count_is_prefix(self):
        short = specfun.bessel_zeros(ZeroKind.OfBessel, 3, 5)
        long = specfun.bessel_zeros(ZeroKind.OfBessel, 3, 100)
        assert long[:5] == short
        assert isinstance(long, tuple)

    def test_invalid_index(self):
        with pytest.raises(SpecialFunctionDomainError):
            specfun.bessel_zero(ZeroKind.OfBessel, 0, 0)
        with pytest.raises(SpecialFunctionDomainError):
            specfun.bessel_zeros(ZeroKind.OfBessel, 0, 0)


class TestHermite(object):
    def test_low_orders(self):
        x = np.linspace(-2.0, 2.0, 9)
        np.testing.assert_allclose(specfun.hermite_h(0, x), np.ones_like(x))
        np.testing.assert_allclose(specfun.hermite_h(1, x), 2 * x)
        np.testing.assert_allclose(specfun.hermite_h(2, x), 4 * x**2 - 2)
        np.testing.assert_allclose(specfun.hermite_h(3, x), 8 * x**3 - 12 * x)

    def test_matches_scipy(self):
        x = np.linspace(-4.0, 4.0, 17)
        for n in range(0, specfun.MAX_HERMITE_ORDER + 1, 5):
            ref = special.eval_hermite(n, x)
            np.testing.assert_allclose(specfun.hermite_h(n, x), ref, rtol=1e-10, atol=1e-12 * np.max(np.abs(ref)))

    @settings(max_examples=50, deadline=None)
    @given(st.integers(min_value=0, max_value=40), st.floats(min_value=-5.0, max_value=5.0))
    def test_parity(self, n, x):
        assert specfun.hermite_h(n, -x) == pytest.approx((-1)**n * specfun.hermite_h(n, x), rel=1e-12, abs=1e-300)

    def test_order_out_of_range(self):
        with pytest.raises(SpecialFunctionDomainError):
            specfun.hermite_h(specfun.MAX_HERMITE_ORDER + 1, 0.5)


class TestAuxSpecial(object):
    def test_dispatch(self):
        assert specfun.aux_special(AuxFunction.Gamma, [5.0]) == pytest.approx(24.0)
        assert specfun.aux_special('BesselK0', [1.0]) == pytest.approx(special.k0(1.0))
        assert specfun.aux_special(AuxFunction.Sinc, [0.0]) == 1.0
        assert specfun.aux_special(AuxFunction.Sinc, [np.pi / 2]) == pytest.approx(2.0 / np.pi)

    def test_kummer_identity(self):
        x = np.linspace(0.0, 10.0, 21)
        lhs = specfun.aux_special(AuxFunction.Hyp1F1, [2, 1, -x]) - specfun.aux_special(AuxFunction.Hyp1F1,
                                                                                         [1, 1, -x])
        np.testing.assert_allclose(lhs, -x * np.exp(-x), atol=1e-12)

    @pytest.mark.parametrize('which,args', [(AuxFunction.Gamma, [2.5]), (AuxFunction.BesselK0, [0.5]),
                                            (AuxFunction.Hyp1F1, [1.0, 2.0, 0.3]), (AuxFunction.Sinc, [1.0])])
    def test_every_function_dispatches(self, which, args):
        assert np.isfinite(specfun.aux_special(which, args))
        assert specfun.aux_special(which.name, args) == specfun.aux_special(which, args)

    def test_dispatch_table_is_complete(self):
        assert set(specfun._AUX) == set(AuxFunction)

    def test_domain_errors(self):
        with pytest.raises(SpecialFunctionDomainError):
            specfun.gamma(0.0)
        with pytest.raises(SpecialFunctionDomainError):
            specfun.bessel_k0(-1.0)
        with pytest.raises(SpecialFunctionDomainError):
            specfun.hyp1f1(1, -2, 0.5)
        with pytest.raises(SpecialFunctionDomainError):
            specfun.aux_special(AuxFunction.Hyp1F1, [1.0])
