"""
Geometry, mode labels and the exact electromagnetic eigenmodes of an ideal
cylindrical cavity of radius R and length L.

Modes are built from the scalar Helmholtz solutions on the disk,
:math:`\\psi_{m,\\mu}(r,\\phi) = c_{m,\\mu} J_{m_2}(k_\\perp r) e^{i m_2 \\phi}`,
and on the axis, :math:`\\sqrt{2/L}\\sin(k_l z)` or :math:`\\sqrt{2/L}\\cos(k_l z)`,
by the curl constructions with pilot vector along the symmetry axis.
Every cylindrical component of a mode is a product

    coefficient * radial(r) * exp(i m2 phi) * longitudinal(z)

which `separated_mode` exposes and `em_mode_3d` evaluates.

Authors: subfield-qed developers
"""

import enum
import itertools
import logging
from dataclasses import dataclass
from dataclasses import field as dataclass_field

import numpy as np
from scipy import constants, special

from subfield_qed import specfun

logger = logging.getLogger(__name__)


class InvalidModeError(ValueError):
    """The mode label does not describe a nonzero cavity mode."""
    pass


class DomainError(ValueError):
    """An evaluation point lies outside the cavity."""
    pass


@dataclass(frozen=True)
class PhysicalConstants:
    """SI constants (CODATA 2018) used throughout the package."""
    c: float = constants.c
    hbar: float = constants.hbar
    epsilon_0: float = constants.epsilon_0
    e: float = constants.e


@dataclass(frozen=True)
class CylinderGeometry:
    """
    Ideal perfectly conducting cylinder.

    Parameters
    ----------
    R : float
        Radius in meters.
    L : float
        Length in meters.
    constants : PhysicalConstants
    """
    R: float
    L: float
    constants: PhysicalConstants = dataclass_field(default_factory=PhysicalConstants)

    def __post_init__(self):
        if not (self.R > 0 and self.L > 0):
            raise ValueError('cavity radius and length must be positive, got R={}, L={}'.format(self.R, self.L))

    @classmethod
    def from_ratios(cls, sigma, R_over_sigma, L_over_R, constants=None):
        """Build the geometry from the dimensionless groups R/sigma and L/R."""
        R = sigma * R_over_sigma
        return cls(R=R, L=R * L_over_R, constants=constants or PhysicalConstants())

    def contains(self, r, z, rtol=1e-12):
        return (-rtol * self.R <= r <= self.R * (1 + rtol)) and (-rtol * self.L <= z <= self.L * (1 + rtol))


class Polarization(enum.Enum):
    """Mu1 is the TE-like family (no z electric component), Mu2 carries the longitudinal correction."""
    Mu1 = 1
    Mu2 = 2


class FieldKind(enum.Enum):
    Electric = 'u'
    Magnetic = 'v'


@dataclass(frozen=True, order=True)
class ModeIndex:
    """
    Label (m1, m2, l, pol) of a cavity mode.

    m1 >= 1 counts radial zeros, m2 >= 0 is the azimuthal number and l >= 0
    the longitudinal number. ``l = 0`` with ``Mu1`` is the zero function and
    is rejected.
    """
    m1: int
    m2: int
    l: int
    pol: Polarization

    def __post_init__(self):
        if isinstance(self.pol, str):
            object.__setattr__(self, 'pol', Polarization[self.pol])
        if self.m1 < 1 or self.m2 < 0 or self.l < 0:
            raise InvalidModeError('invalid mode numbers {}'.format(self))
        if self.m2 > specfun.MAX_BESSEL_ORDER:
            raise InvalidModeError('azimuthal number {} above supported order'.format(self.m2))
        if self.l == 0 and self.pol is Polarization.Mu1:
            raise InvalidModeError('l = 0 with Mu1 is identically zero: {}'.format(self))

    @classmethod
    def parse(cls, text):
        """Parse ``"m1,m2,l,pol"``, e.g. ``"1,0,2,Mu2"``."""
        try:
            m1, m2, l, pol = [s.strip() for s in text.split(',')]
            return cls(int(m1), int(m2), int(l), Polarization[pol])
        except (ValueError, KeyError):
            raise InvalidModeError("cannot parse mode index '{}', expected m1,m2,l,Mu1|Mu2".format(text))

    @property
    def zero_kind(self):
        if self.pol is Polarization.Mu1:
            return specfun.ZeroKind.OfBesselDerivative
        return specfun.ZeroKind.OfBessel

    def __str__(self):
        return '({},{},{},{})'.format(self.m1, self.m2, self.l, self.pol.name)


@dataclass(frozen=True)
class WaveNumbers:
    k_perp: float
    k_long: float
    omega: float

    @property
    def k_abs(self):
        return np.hypot(self.k_perp, self.k_long)


def transverse_zero(idx):
    """The Bessel zero that fixes the transverse wavenumber of `idx`."""
    return specfun.bessel_zero(idx.zero_kind, idx.m2, idx.m1)


def wavenumbers(geom, idx):
    """
    Transverse and longitudinal wavenumbers and the angular frequency.

    Examples
    --------
    >>> w = wavenumbers(CylinderGeometry(1.0, np.pi), ModeIndex(1, 0, 2, Polarization.Mu2))
    >>> round(w.k_perp, 9), round(w.k_long, 12)
    (2.404825558, 2.0)
    """
    k_perp = transverse_zero(idx) / geom.R
    k_long = np.pi * idx.l / geom.L
    return WaveNumbers(k_perp=k_perp, k_long=k_long, omega=geom.constants.c * np.sqrt(k_perp**2 + k_long**2))


def resonant_frequency(geom, m1res, lres):
    """Angular frequency of the on-axis (m2 = 0) Mu2 mode (m1res, 0, lres)."""
    return wavenumbers(geom, ModeIndex(m1res, 0, lres, Polarization.Mu2)).omega


def transverse_normalization(geom, idx):
    """Constant c_{m,mu} that makes the disk mode unit-normalized over the cross section."""
    chi = transverse_zero(idx)
    if idx.pol is Polarization.Mu1:
        norm2 = np.pi * geom.R**2 * (special.jv(idx.m2, chi)**2 - special.jv(idx.m2 + 1, chi)**2)
    else:
        norm2 = np.pi * geom.R**2 * special.jv(idx.m2 + 1, chi)**2
    return 1.0 / np.sqrt(norm2)


def longitudinal_normalization(geom, l):
    # the constant l = 0 solution needs 1/sqrt(L) to be unit-normalized
    return np.sqrt(2.0 / geom.L) if l > 0 else np.sqrt(1.0 / geom.L)


def mode_set(m1_max, m2_max, l_max, polarizations=tuple(Polarization)):
    """All valid mode labels with m1 <= m1_max, m2 <= m2_max, l <= l_max."""
    modes = []
    for m1, m2, l, pol in itertools.product(range(1, m1_max + 1), range(m2_max + 1), range(l_max + 1),
                                            polarizations):
        if l == 0 and pol is Polarization.Mu1:
            continue
        modes.append(ModeIndex(m1, m2, l, pol))
    return modes


def _j_over_r(order, k, r):
    # J_n(k r)/r with the removable singularity at r = 0 for n >= 1
    r = np.asarray(r, dtype=float)
    x = k * r
    small = x < 1e-6
    safe_r = np.where(small, 1.0, r)
    series = (k / 2.0)**order * np.where(small, r, 1.0)**(order - 1) / special.factorial(order) \
        * (1.0 - x**2 / (4.0 * (order + 1)))
    return np.where(small, series, special.jv(order, x) / safe_r)


@dataclass(frozen=True)
class SeparatedMode:
    """
    Product form of one vector mode in cylindrical components (r, phi, z).

    Component ``i`` equals ``coefficients[i] * radial(r)[i] * azimuthal(phi) * longitudinal(z)[i]``.
    Radial factors are ``A = c J/r``, ``B = c k J'`` or ``C = c J``; longitudinal
    factors are ``N sin(k_l z)`` or ``N cos(k_l z)``.
    """
    idx: ModeIndex
    field: FieldKind
    k_perp: float
    k_long: float
    c_norm: float
    n_norm: float
    coefficients: tuple
    radial_kinds: tuple
    longitudinal_kinds: tuple

    def radial(self, r):
        m2, k, c = self.idx.m2, self.k_perp, self.c_norm
        values = {}
        for kind in set(self.radial_kinds):
            if kind == 'A':
                # only ever multiplied by i*m2, so the m2 = 0 case is identically zero
                values[kind] = c * _j_over_r(m2, k, r) if m2 > 0 else np.zeros_like(np.asarray(r, dtype=float))
            elif kind == 'B':
                values[kind] = c * k * special.jvp(m2, k * np.asarray(r, dtype=float))
            else:
                values[kind] = c * special.jv(m2, k * np.asarray(r, dtype=float))
        return np.array([values[kind] for kind in self.radial_kinds])

    def azimuthal(self, phi):
        return np.exp(1j * self.idx.m2 * np.asarray(phi, dtype=float))

    def longitudinal(self, z):
        kz = self.k_long * np.asarray(z, dtype=float)
        trig = {'sin': np.sin(kz), 'cos': np.cos(kz)}
        return self.n_norm * np.array([trig[kind] for kind in self.longitudinal_kinds])

    def transverse(self, r, phi):
        """Coefficient times radial and azimuthal factors, per component."""
        return np.asarray(self.coefficients) * self.radial(r) * self.azimuthal(phi)

    def __call__(self, r, phi, z):
        return self.transverse(r, phi) * self.longitudinal(z)


def mode_structure(pol, field, m2, k_perp, k_long):
    """
    Component coefficients and factor kinds shared by every mode of one family.

    `k_long` may be an array, in which case each coefficient is an array over it.
    Returns ``(coefficients, radial_kinds, longitudinal_kinds)``.
    """
    k_long = np.asarray(k_long, dtype=float)
    k_abs = np.hypot(k_perp, k_long)
    i_m2 = 1j * m2
    te_like = (pol is Polarization.Mu1) == (field is FieldKind.Electric)

    if te_like:
        ones = np.ones_like(k_long)
        coefficients = (i_m2 / k_perp * ones, -1.0 / k_perp * ones, 0.0 * ones)
        radial_kinds = ('A', 'B', 'C')
    else:
        sign = -1.0 if field is FieldKind.Electric else 1.0
        ratio = sign * k_long / (k_perp * k_abs)
        coefficients = (ratio, i_m2 * ratio, k_perp / k_abs)
        radial_kinds = ('B', 'A', 'C')

    # transverse components of u go like sin(k_l z), those of v like cos(k_l z)
    if field is FieldKind.Electric:
        longitudinal_kinds = ('sin', 'sin', 'cos')
    else:
        longitudinal_kinds = ('cos', 'cos', 'sin')
    return coefficients, radial_kinds, longitudinal_kinds


def separated_mode(geom, idx, field=FieldKind.Electric):
    """
    Product representation of the electric (u) or magnetic (v) mode `idx`.

    The four cases are the curl constructions with the pilot vector along z:
    the TE-like u of Mu1 and v of Mu2 are :math:`(\\partial_2, -\\partial_1, 0)\\psi/k_\\perp`,
    the other two are :math:`(\\partial_1\\partial_z, \\partial_2\\partial_z, k_\\perp^2)\\psi/(k_\\perp|k|)`.
    """
    w = wavenumbers(geom, idx)
    coefficients, radial_kinds, longitudinal_kinds = mode_structure(idx.pol, field, idx.m2, w.k_perp, w.k_long)
    return SeparatedMode(idx=idx,
                         field=field,
                         k_perp=w.k_perp,
                         k_long=w.k_long,
                         c_norm=transverse_normalization(geom, idx),
                         n_norm=longitudinal_normalization(geom, idx.l),
                         coefficients=tuple(complex(c) for c in coefficients),
                         radial_kinds=radial_kinds,
                         longitudinal_kinds=longitudinal_kinds)


@dataclass(frozen=True)
class ScalarModes:
    psi_transverse: complex
    psi_long_mu1: float
    psi_long_mu2: float


def _check_point(geom, r, z):
    if not geom.contains(r, z):
        raise DomainError('point (r={}, z={}) lies outside the cavity R={}, L={}'.format(r, z, geom.R, geom.L))


def scalar_modes(geom, idx, point):
    """
    Scalar Helmholtz solutions at ``point = (r, phi, z)``: the normalized disk
    mode of `idx` and both longitudinal solutions for its l.
    """
    r, phi, z = point
    _check_point(geom, r, z)
    w = wavenumbers(geom, idx)
    psi_t = transverse_normalization(geom, idx) * special.jv(idx.m2, w.k_perp * r) * np.exp(1j * idx.m2 * phi)
    n = longitudinal_normalization(geom, idx.l)
    return ScalarModes(psi_transverse=complex(psi_t),
                       psi_long_mu1=float(n * np.sin(w.k_long * z)),
                       psi_long_mu2=float(n * np.cos(w.k_long * z)))


@dataclass(frozen=True)
class PolarizationVectors:
    epsilon: np.ndarray
    kappa: np.ndarray


def polarization_vectors(geom, idx):
    """
    Polarization vectors of the ancilla decomposition, ``u = S U epsilon`` and ``v = T V kappa``.

    Examples
    --------
    >>> p = polarization_vectors(CylinderGeometry(1.0, 2.0), ModeIndex(1, 0, 0, Polarization.Mu2))
    >>> p.epsilon.tolist()
    [-0.0, -0.0, 1.0]
    """
    w = wavenumbers(geom, idx)
    k_perp, k_long, k_abs = w.k_perp, w.k_long, w.k_abs
    transverse = np.array([1.0, -1.0, 0.0]) / np.sqrt(2.0)
    longitudinal = np.array([k_long / np.sqrt(2.0), k_long / np.sqrt(2.0), k_perp]) / k_abs
    if idx.pol is Polarization.Mu1:
        return PolarizationVectors(epsilon=transverse, kappa=longitudinal)
    epsilon = np.array([-longitudinal[0], -longitudinal[1], longitudinal[2]])
    return PolarizationVectors(epsilon=epsilon, kappa=transverse)


@dataclass(frozen=True)
class EMMode:
    u: np.ndarray
    v: np.ndarray


def em_mode_3d(geom, idx, point):
    """
    Electric mode u and magnetic mode v at ``point = (r, phi, z)`` in cylindrical components.

    The magnetic mode satisfies ``v = curl(u)/|k|``; both are unit-normalized
    over the cavity volume.
    """
    r, phi, z = point
    _check_point(geom, r, z)
    u = separated_mode(geom, idx, FieldKind.Electric)(r, phi, z)
    v = separated_mode(geom, idx, FieldKind.Magnetic)(r, phi, z)
    return EMMode(u=np.asarray(u, dtype=complex), v=np.asarray(v, dtype=complex))


def cylindrical_to_cartesian(vector, phi):
    """Rotate (r, phi, z) components into (x, y, z) components."""
    vr, vphi, vz = vector
    return np.array([vr * np.cos(phi) - vphi * np.sin(phi), vr * np.sin(phi) + vphi * np.cos(phi), vz])


def _cartesian_evaluator(geom, idx, field):
    mode = separated_mode(geom, idx, field)

    def value(x):
        r, phi = np.hypot(x[0], x[1]), np.arctan2(x[1], x[0])
        return cylindrical_to_cartesian(np.asarray(mode(r, phi, x[2]), dtype=complex), phi)

    return value


def _jacobian(f, x, h):
    # J[i, j] = d f_i / d x_j by central differences
    columns = []
    for j in range(3):
        step = np.zeros(3)
        step[j] = h
        columns.append((f(x + step) - f(x - step)) / (2.0 * h))
    return np.array(columns).T


def _cartesian_point(point):
    r, phi, z = point
    return np.array([r * np.cos(phi), r * np.sin(phi), z], dtype=float)


def _mode_scale(geom, idx):
    return transverse_normalization(geom, idx) * longitudinal_normalization(geom, idx.l)


def helmholtz_residual(geom, idx, point, field=FieldKind.Electric, h=None):
    """
    Relative residual of ``(Delta + |k|^2) u = 0`` at an interior ``point = (r, phi, z)``,
    with the Cartesian Laplacian taken by second central differences of step ``h`` (default 1e-4 R).
    """
    r, _, z = point
    _check_point(geom, r, z)
    h = 1e-4 * geom.R if h is None else h
    f = _cartesian_evaluator(geom, idx, field)
    x = _cartesian_point(point)
    center = f(x)
    laplacian = np.zeros(3, dtype=complex)
    for j in range(3):
        step = np.zeros(3)
        step[j] = h
        laplacian += (f(x + step) - 2.0 * center + f(x - step)) / h**2
    k2 = wavenumbers(geom, idx).k_abs**2
    return float(np.max(np.abs(laplacian + k2 * center)) / (k2 * _mode_scale(geom, idx)))


def curl_residual(geom, idx, point, h=None):
    """Relative residual of ``v = curl(u) / |k|`` at ``point``, by central differences."""
    h = 1e-5 * geom.R if h is None else h
    u = _cartesian_evaluator(geom, idx, FieldKind.Electric)
    v = _cartesian_evaluator(geom, idx, FieldKind.Magnetic)
    x = _cartesian_point(point)
    J = _jacobian(u, x, h)
    curl = np.array([J[2, 1] - J[1, 2], J[0, 2] - J[2, 0], J[1, 0] - J[0, 1]])
    k_abs = wavenumbers(geom, idx).k_abs
    return float(np.max(np.abs(curl / k_abs - v(x))) / _mode_scale(geom, idx))


@dataclass(frozen=True)
class BoundaryCheck:
    """Boundary traces at one wall point, relative to the mode amplitude."""
    tangential_u: float
    divergence_u: float
    normal_v: float
    tangential_curl_v: float


def boundary_check(geom, idx, point, h=None):
    """
    Evaluate ``n x u``, ``div u``, ``n . v`` and ``n x curl(v)`` at a wall point.

    `point` must lie on the mantle (r = R) or on an end cap (z = 0 or z = L).
    """
    r, phi, z = point
    if np.isclose(r, geom.R):
        normal = np.array([np.cos(phi), np.sin(phi), 0.0])
    elif np.isclose(z, 0.0, atol=1e-12 * geom.L) or np.isclose(z, geom.L):
        normal = np.array([0.0, 0.0, 1.0 if z > 0.5 * geom.L else -1.0])
    else:
        raise DomainError('point {} is not on the cavity wall'.format(point))
    h = 1e-5 * geom.R if h is None else h
    u = _cartesian_evaluator(geom, idx, FieldKind.Electric)
    v = _cartesian_evaluator(geom, idx, FieldKind.Magnetic)
    x = _cartesian_point(point)
    k_abs = wavenumbers(geom, idx).k_abs
    scale = _mode_scale(geom, idx)
    Ju = _jacobian(u, x, h)
    Jv = _jacobian(v, x, h)
    curl_v = np.array([Jv[2, 1] - Jv[1, 2], Jv[0, 2] - Jv[2, 0], Jv[1, 0] - Jv[0, 1]])
    return BoundaryCheck(tangential_u=float(np.max(np.abs(np.cross(normal, u(x)))) / scale),
                         divergence_u=float(abs(np.trace(Ju)) / (k_abs * scale)),
                         normal_v=float(abs(np.dot(normal, v(x))) / scale),
                         tangential_curl_v=float(np.max(np.abs(np.cross(normal, curl_v))) / (k_abs * scale)))
