"""
A Gaussian atom in a Hermite-Gaussian laser beam: paraxial beam modes,
their separable long-wavelength limit, reduced smearing coefficients, the
couplings g and gamma_N, first-order transition probabilities and the
vacuum-to-laser ratio zeta.

The beam is taken at a single central wavenumber k (small bandwidth). The
atom sits at the focus, at the origin of the beam frame.

Authors: subfield-qed developers
"""

import enum
import logging
import math
from dataclasses import dataclass
from dataclasses import field as dataclass_field

import numpy as np
from scipy import special

from subfield_qed import quadrature, specfun
from subfield_qed.cavity import PhysicalConstants
from subfield_qed.interaction import (ATOM_EXTENT, Switching, SwitchingKind, TransitionKind, WindowConvention,
                                      _as_enum, _oscillator_prefactor, log_time_window)

logger = logging.getLogger(__name__)


class BeamPolarization(enum.Enum):
    EpsX = 'x'
    EpsY = 'y'

    @property
    def vector(self):
        return np.array([1.0, 0.0, 0.0]) if self is BeamPolarization.EpsX else np.array([0.0, 1.0, 0.0])


@dataclass(frozen=True)
class HermiteBeam:
    """
    Paraxial beam with waist `w0` (m) at z = 0, central wavenumber `k` (1/m),
    mean photon number `alpha_sq` of the pumped mode and a linear polarization.
    """
    w0: float
    k: float
    alpha_sq: float = 0.0
    pol: BeamPolarization = BeamPolarization.EpsX
    constants: PhysicalConstants = dataclass_field(default_factory=PhysicalConstants)

    def __post_init__(self):
        object.__setattr__(self, 'pol', _as_enum(BeamPolarization, self.pol))
        if not (self.w0 > 0 and self.k > 0):
            raise ValueError('beam waist and wavenumber must be positive, got w0={}, k={}'.format(self.w0, self.k))
        if self.alpha_sq < 0:
            raise ValueError('alpha_sq must be nonnegative, got {}'.format(self.alpha_sq))

    @property
    def rayleigh_length(self):
        return 0.5 * self.k * self.w0**2

    @property
    def omega(self):
        return self.constants.c * self.k

    def waist(self, z):
        return self.w0 * np.sqrt(1.0 + (np.asarray(z, dtype=float) / self.rayleigh_length)**2)

    def curvature_radius(self, z):
        """Radius of curvature of the phase front, infinite at the focus."""
        z = np.asarray(z, dtype=float)
        with np.errstate(divide='ignore'):
            value = np.where(z == 0, np.inf, z * (1.0 + (self.rayleigh_length / np.where(z == 0, 1.0, z))**2))
        return value.item() if value.ndim == 0 else value

    def gouy_phase(self, z):
        return np.arctan(np.asarray(z, dtype=float) / self.rayleigh_length)


@dataclass(frozen=True, order=True)
class BeamModeIndex:
    """Hermite-Gaussian mode numbers (m1, m2) along x and y."""
    m1: int
    m2: int

    def __post_init__(self):
        if self.m1 < 0 or self.m2 < 0:
            raise ValueError('beam mode numbers must be nonnegative, got ({}, {})'.format(self.m1, self.m2))
        if max(self.m1, self.m2) > specfun.MAX_HERMITE_ORDER:
            raise specfun.SpecialFunctionDomainError('beam mode ({}, {}) above the supported Hermite order'.format(
                self.m1, self.m2))

    @classmethod
    def parse(cls, text):
        m1, m2 = [int(s) for s in text.split(',')]
        return cls(m1, m2)


def _hermite_norm(m, w):
    return 1.0 / np.sqrt(2.0**(m.m1 + m.m2 - 1) * math.factorial(m.m1) * math.factorial(m.m2) * np.pi * w**2)


def _profile(m, x, y, w):
    s = math.sqrt(2.0) / w
    return _hermite_norm(m, w) * specfun.hermite_h(m.m1, s * x) * specfun.hermite_h(m.m2, s * y) \
        * np.exp(-(x * x + y * y) / w**2)


def hermite_amplitude(beam, m, point):
    """Slowly varying envelope A_m(x, y, z) solving the paraxial equation."""
    x, y, z = point
    w = beam.waist(z)
    radius = beam.curvature_radius(z)
    curvature = 0.0 if np.isinf(radius) else beam.k * (x * x + y * y) / (2.0 * radius)
    theta = curvature - (m.m1 + m.m2 + 1) * beam.gouy_phase(z)
    return complex(_profile(m, x, y, w) * np.exp(1j * theta))


def hermite_mode_full(beam, m, point):
    """
    Full Hermite-Gaussian mode ``A_m(x, y, z) exp(ikz)`` times the
    polarization vector, as a complex Cartesian 3-vector.
    """
    x, y, z = point
    if not np.all(np.isfinite(point)):
        raise ValueError('evaluation point must be finite, got {}'.format(point))
    return hermite_amplitude(beam, m, point) * np.exp(1j * beam.k * z) * beam.pol.vector


def separable_mode(beam, m, x, y):
    """
    z-independent mode of the long-wavelength limit,
    L2-orthonormal on the plane.

    Examples
    --------
    >>> beam = HermiteBeam(w0=1.0, k=100.0)
    >>> round(separable_mode(beam, BeamModeIndex(0, 0), 0.0, 0.0), 12) == round(math.sqrt(2 / math.pi), 12)
    True
    """
    value = _profile(m, np.asarray(x, dtype=float), np.asarray(y, dtype=float), beam.w0)
    return value.item() if np.ndim(value) == 0 else value


def paraxial_residual(beam, m, point, separable=False, equation='paraxial'):
    """
    Finite-difference residual of a beam envelope, normalized by ``|A| k^2``.

    ``equation='paraxial'`` checks :math:`\\Delta_\\perp A + 2ik\\partial_z A = 0`;
    ``'helmholtz'`` adds :math:`\\partial_z^2 A`, i.e. the full Helmholtz
    equation for ``A exp(ikz)``, whose residual grows like ``(k w0)^-4``.
    With ``separable=True`` the z-frozen `separable_mode` is checked instead.
    """
    if equation not in ('paraxial', 'helmholtz'):
        raise ValueError("unknown equation '{}'".format(equation))
    x, y, z = point
    if separable:
        envelope = lambda x_, y_, z_: complex(separable_mode(beam, m, x_, y_))
    else:
        envelope = lambda x_, y_, z_: hermite_amplitude(beam, m, (x_, y_, z_))

    h = 1e-3 * beam.waist(z)
    hz = 1e-2 * beam.rayleigh_length
    a0 = envelope(x, y, z)
    laplacian = (envelope(x + h, y, z) + envelope(x - h, y, z) + envelope(x, y + h, z) + envelope(x, y - h, z) -
                 4.0 * a0) / h**2
    a_plus, a_minus = envelope(x, y, z + hz), envelope(x, y, z - hz)
    residual = laplacian + 2j * beam.k * (a_plus - a_minus) / (2.0 * hz)
    if equation == 'helmholtz':
        residual += (a_plus - 2.0 * a0 + a_minus) / hz**2
    return abs(residual) / (abs(a0) * beam.k**2)


def _advise_paraxial(atom, beam, m=None):
    if atom.sigma / beam.w0 > 0.05:
        logger.warning('sigma/w0 = {:.3g}: the large-waist approximation needs sigma << w0'.format(
            atom.sigma / beam.w0))
    if m is not None and m.m1 + m.m2 + 1 > 0.1 * beam.rayleigh_length / atom.sigma:
        logger.warning('Beam mode ({}, {}) is not small against z_R/sigma = {:.3g}'.format(
            m.m1, m.m2, beam.rayleigh_length / atom.sigma))


def reduced_smearing(atom, beam, m, z, approximate=False):
    """
    x component of the smearing vector projected onto the separable beam
    mode `m` (original Hermite indices), as a function of z.

    Only odd m1 and even m2 survive. ``approximate=True`` keeps the leading
    order in sigma/w0, using sigma^2 + w0^2 ~ w0^2.
    """
    _advise_paraxial(atom, beam, m)
    if m.m1 % 2 == 0 or m.m2 % 2 == 1:
        return 0.0 * np.asarray(z, dtype=float)
    p1, p2 = (m.m1 - 1) // 2, m.m2 // 2
    sigma, w0 = atom.sigma, beam.w0
    if approximate:
        b = w0**2 / (4.0 * sigma**2)
        ratio = -1.0
    else:
        b = 0.25 * w0**2 * (w0**-2 + sigma**-2)
        ratio = (0.5 - b) / b
    # Gaussian moments of the Hermite factors against exp(-a x^2)
    log_fact = special.gammaln(2 * p1 + 2) - special.gammaln(p1 + 1) + special.gammaln(2 * p2 + 1) \
        - special.gammaln(p2 + 1)
    i_xy = (w0**3 / 8.0) * math.pi / math.sqrt(2.0) * math.exp(log_fact) * ratio**(p1 + p2) / b**2
    z = np.asarray(z, dtype=float)
    value = _oscillator_prefactor(sigma) * _hermite_norm(m, w0) * i_xy * z * np.exp(-z**2 / sigma**2)
    return value.item() if value.ndim == 0 else value


def reduced_smearing_numeric(atom, beam, m, z, tol_rel=1e-10):
    """Plane quadrature of the separable beam mode against ``x psi_g psi_e`` at height z."""
    sigma = atom.sigma
    extent = ATOM_EXTENT

    def integrand(u, v):
        return beam.w0 * separable_mode(beam, m, sigma * u, sigma * v) * u * math.exp(-u * u - v * v)

    res = quadrature.integrate_2d(integrand, quadrature.Rectangle(-extent, extent, -extent, extent),
                                  tol_rel=tol_rel, tol_abs=1e-13)
    return _oscillator_prefactor(sigma) * sigma**3 / beam.w0 * res.value * z * math.exp(-z**2 / sigma**2)


def _log_gamma_term(m1, m2):
    # log of (2m1+1)!(2m2)! / (4^(m1+m2+1/2) (m1! m2!)^2)
    return (special.gammaln(2 * m1 + 2) + special.gammaln(2 * m2 + 1) - (m1 + m2 + 0.5) * math.log(4.0) -
            2.0 * (special.gammaln(m1 + 1) + special.gammaln(m2 + 1)))


def gamma_term(m1, m2):
    """Weight of vacuum mode (m1, m2) in reindexed variables (original (2m1+1, 2m2))."""
    return math.exp(_log_gamma_term(m1, m2))


def gamma_closed(N):
    """
    Closed form of gamma_N.

    Examples
    --------
    >>> round(gamma_closed((1, 0)), 12)
    0.166666666667
    """
    n1, n2 = N
    log_lead = (math.log(4.0) + special.gammaln(2.5 + n1) + special.gammaln(1.5 + n2) - math.log(3.0 * math.pi) -
                special.gammaln(1 + n1) - special.gammaln(1 + n2))
    step = 1.0 if n1 - 1 >= 0 else 0.0
    return (math.exp(log_lead) - 0.75 * step) / 3.0


def gamma_sum(N, exclude=(1, 0)):
    """Direct sum defining gamma_N, without the reindexed pair `exclude`."""
    n1, n2 = N
    total = 0.0
    for m1 in range(n1 + 1):
        for m2 in range(n2 + 1):
            if (m1, m2) != tuple(exclude):
                total += gamma_term(m1, m2)
    return total / 3.0


@dataclass(frozen=True)
class LaserCouplings:
    g: float
    gamma_closed: float
    gamma_sum: float
    gamma_sum_pumped: float


def coupling_g(atom, beam):
    """Mode-independent coupling ``3 c e^2 k^3 sigma^6 exp(-(k sigma)^2 / 2) / (hbar eps0 pi^4 w0^4)`` (m/s^2)."""
    c = beam.constants
    k, sigma = beam.k, atom.sigma
    return 3.0 * c.c * c.e**2 * k**3 * sigma**6 * math.exp(-0.5 * (k * sigma)**2) / (
        c.hbar * c.epsilon_0 * math.pi**4 * beam.w0**4)


def laser_couplings(atom, beam, N):
    """
    The coupling g and gamma_N for vacuum modes up to N = (N1, N2), given
    both in closed form and as the direct sum. ``gamma_sum_pumped`` leaves
    out the pumped mode (original (1, 0), reindexed (0, 0)) instead.
    """
    _advise_paraxial(atom, beam)
    n1, n2 = N
    if n1 < 0 or n2 < 0:
        raise ValueError('mode bounds must be nonnegative, got {}'.format(N))
    return LaserCouplings(g=coupling_g(atom, beam),
                          gamma_closed=gamma_closed(N),
                          gamma_sum=gamma_sum(N),
                          gamma_sum_pumped=gamma_sum(N, exclude=(0, 0)))


def _log_cosh(x):
    x = np.abs(x)
    return x + np.log1p(np.exp(-2.0 * x)) - math.log(2.0)


def log_laser_time_factor(sw, omega, omega_a):
    """Log of ``|f_(-) + conj(f_(+))|^2``."""
    T = sw.T
    if sw.kind is SwitchingKind.TopHat:
        s_minus = specfun.sinc(0.5 * (omega - omega_a) * T)
        s_plus = specfun.sinc(0.5 * (omega + omega_a) * T)
        value = T**2 * (s_minus**2 + s_plus**2 + 2.0 * s_minus * s_plus * math.cos(omega * T))
        return math.log(value) if value > 0 else -np.inf
    if sw.convention is WindowConvention.PRINTED:
        scale = 0.5
    else:
        scale = 1.0
    return (math.log(8.0 * math.pi) + 2.0 * math.log(T) - scale * (omega**2 + omega_a**2) * T**2 +
            2.0 * _log_cosh(scale * omega * omega_a * T**2))


def laser_time_factor(sw, omega, omega_a):
    """
    ``|f_(-) + conj(f_(+))|^2`` for the pumped mode at frequency `omega`.

    Examples
    --------
    >>> sw = Switching(SwitchingKind.Gaussian, 1.0)
    >>> round(laser_time_factor(sw, 0.0, 0.0) / (8 * math.pi), 12)
    1.0
    """
    return math.exp(log_laser_time_factor(sw, omega, omega_a))


def laser_time_factor_displayed(sw, omega, omega_a):
    """The top-hat laser factor in its usual written form, without T^2; only used for comparison."""
    s_minus = specfun.sinc(0.5 * (omega - omega_a) * sw.T)
    s_plus = specfun.sinc(0.5 * (omega + omega_a) * sw.T)
    return s_minus**2 + s_plus**2 + s_minus * s_plus * (2.0 * math.cos(0.5 * omega * sw.T)**2 + 1.0)


def laser_time_factor_numeric(sw, omega, omega_a, tol_rel=1e-10):
    """Time quadrature of ``|integral chi(t) 2 cos(omega t) exp(i Omega t) dt|^2``."""
    T = sw.T
    if sw.kind is SwitchingKind.Gaussian and sw.convention is WindowConvention.PRINTED:
        return 2.0 * laser_time_factor_numeric(Switching(sw.kind, T / math.sqrt(2.0)), omega, omega_a, tol_rel)
    if sw.kind is SwitchingKind.TopHat:
        lo, hi, envelope = 0.0, 1.0, lambda x: 1.0
    else:
        lo, hi, envelope = -ATOM_EXTENT, ATOM_EXTENT, lambda x: math.exp(-0.5 * x * x)
    res = quadrature.integrate_1d(
        lambda x: envelope(x) * 2.0 * math.cos(omega * T * x) * np.exp(1j * omega_a * T * x), lo, hi,
        tol_rel=tol_rel, tol_abs=1e-20, limit=400)
    return abs(T * res.value)**2


@dataclass(frozen=True)
class LaserProbability:
    P: float
    laser_term: float
    vacuum_term: float


def _log_vacuum_window(sw, kind, omega, omega_a):
    return float(log_time_window(sw, 0.5 * (omega + kind.sign * omega_a)))


def laser_probability(atom, beam, sw, kind, N):
    """
    First-order transition probability ``g (|alpha|^2 |f_- + conj(f_+)|^2 + gamma_N |f_(+-)|^2)``
    per unit wavenumber, split into the laser and vacuum terms.
    """
    kind = _as_enum(TransitionKind, kind)
    couplings = laser_couplings(atom, beam, N)
    omega = beam.omega
    laser = couplings.g * beam.alpha_sq * laser_time_factor(sw, omega, atom.omega_a)
    vacuum = couplings.g * couplings.gamma_sum * math.exp(_log_vacuum_window(sw, kind, omega, atom.omega_a))
    return LaserProbability(P=laser + vacuum, laser_term=laser, vacuum_term=vacuum)


@dataclass(frozen=True)
class Zeta:
    value: float
    bound: float
    holds: bool


def zeta(atom, beam, sw, kind, N):
    """
    Ratio of the vacuum term to the laser term, with the bound ``gamma_N / (4 |alpha|^2)``.

    The ratio is formed in log space, so it stays finite when both terms underflow.
    """
    kind = _as_enum(TransitionKind, kind)
    if not beam.alpha_sq > 0:
        raise ValueError('zeta needs a populated laser mode, got alpha_sq = {}'.format(beam.alpha_sq))
    gamma = gamma_sum(N)
    log_laser = log_laser_time_factor(sw, beam.omega, atom.omega_a)
    if log_laser == -np.inf:
        logger.warning('Laser time factor vanishes at omega T = {:.6g}; zeta is unbounded'.format(beam.omega * sw.T))
        value = float('inf')
    else:
        log_value = math.log(gamma) + _log_vacuum_window(sw, kind, beam.omega, atom.omega_a) - \
            math.log(beam.alpha_sq) - log_laser
        value = math.exp(min(log_value, 700.0))
    bound = gamma / (4.0 * beam.alpha_sq)
    return Zeta(value=value, bound=bound, holds=bool(value <= bound * (1.0 + 1e-12)))
