"""
Atom-field interaction engine: a Gaussian two-level atom on the cavity
axis, its dipole smearing vector, overlaps with the cavity modes, switching
windows, first-order subfield transition probabilities, the truncation
error of a subfield subset and the location of the dominant subfield.

Probabilities are accumulated in log space. The sum over longitudinal
modes is cut by a certified bound: beyond the resonance the terms are
dominated by a monotone envelope whose integral bounds the tail.

Authors: subfield-qed developers
"""

import enum
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import constants, special
from scipy.special import logsumexp

from subfield_qed import quadrature, specfun
from subfield_qed.cavity import (FieldKind, ModeIndex, Polarization, mode_structure, resonant_frequency,
                                 separated_mode, transverse_normalization, _j_over_r)

logger = logging.getLogger(__name__)

#: Half width, in units of sigma, of the region where the atom lives.
ATOM_EXTENT = 12.0

#: Terms whose analytic window is this far (natural log) below the largest are skipped by the oracle.
ORACLE_LOG_CUTOFF = 80.0

#: Largest number of l values the oracle path evaluates with quadrature overlaps.
ORACLE_MAX_MODES = 2**16

#: Absolute target for the dimensionless azimuthal and volume integrals of the overlaps;
#: integrals that vanish by symmetry sit at the rounding floor of about 1e-13.
OVERLAP_TOL_ABS = 1e-12


class TailBoundError(RuntimeError):
    """
    The certified tail of a longitudinal sum did not reach the requested
    tolerance within the term budget.

    Attributes
    ----------
    achieved_bound : float
        Relative tail bound reached when the budget ran out.
    terms : int
        Number of terms summed.
    """

    def __init__(self, message, achieved_bound, terms):
        super().__init__(message)
        self.achieved_bound = achieved_bound
        self.terms = terms


class ConvergenceError(RuntimeError):
    """The subfield extension for the full probability could not be certified."""
    pass


class SwitchingKind(enum.Enum):
    TopHat = 'top-hat'
    Gaussian = 'gaussian'


class WindowConvention(enum.Enum):
    """
    EXACT is the exact Gaussian time integral. PRINTED keeps the
    halved exponent of the commonly written transition formula, equal to
    ``2 * EXACT(T / sqrt(2))``. Top-hat windows are the same in both.
    """
    EXACT = 'exact'
    PRINTED = 'printed'


class TransitionKind(enum.Enum):
    """Spontaneous emission e -> g (minus sign) or vacuum excitation g -> e (plus sign)."""
    Emission = -1
    Excitation = 1

    @property
    def sign(self):
        return self.value


def _as_enum(enum_cls, value):
    if isinstance(value, enum_cls):
        return value
    try:
        return enum_cls[value]
    except KeyError:
        return enum_cls(value)


@dataclass(frozen=True)
class Switching:
    """Switching function of the interaction: its kind, duration T (seconds) and Gaussian convention."""
    kind: SwitchingKind
    T: float
    convention: WindowConvention = WindowConvention.EXACT

    def __post_init__(self):
        object.__setattr__(self, 'kind', _as_enum(SwitchingKind, self.kind))
        object.__setattr__(self, 'convention', _as_enum(WindowConvention, self.convention))
        if not self.T > 0:
            raise ValueError('switching time T must be positive, got {}'.format(self.T))

    def chi(self, t):
        """The switching function itself."""
        t = np.asarray(t, dtype=float)
        if self.kind is SwitchingKind.TopHat:
            return ((t >= 0) & (t <= self.T)).astype(float)
        return np.exp(-t**2 / (2.0 * self.T**2))


@dataclass(frozen=True)
class GaussianAtom:
    """
    Two-level atom modelled by the two lowest states of a 3D harmonic oscillator.

    Parameters
    ----------
    sigma : float
        Oscillator length in meters.
    omega_a : float
        Energy gap in rad/s.
    center_z : float, optional
        Axial position of the atom; the cavity midpoint when omitted.
    """
    sigma: float
    omega_a: float
    center_z: float = None

    def __post_init__(self):
        if not (self.sigma > 0 and self.omega_a > 0):
            raise ValueError('sigma and omega_a must be positive, got {} and {}'.format(self.sigma, self.omega_a))

    @classmethod
    def from_oscillator(cls, mass, omega_a, center_z=None, hbar=constants.hbar):
        """Atom whose length is fixed by the oscillator mass (kg): sigma = sqrt(hbar / (M omega_a))."""
        return cls(sigma=math.sqrt(hbar / (mass * omega_a)), omega_a=omega_a, center_z=center_z)

    @classmethod
    def resonant(cls, geom, sigma, resonance, center_z=None):
        """Atom whose gap matches the frequency of a resonant subfield target."""
        return cls(sigma=sigma, omega_a=resonance.omega(geom), center_z=center_z)

    def center(self, geom):
        return 0.5 * geom.L if self.center_z is None else self.center_z


@dataclass(frozen=True)
class Resonance:
    """Resonant target (m1res, lres): the atom gap equals omega of mode (m1res, 0, lres, Mu2)."""
    m1res: int
    lres: int

    def omega(self, geom):
        return resonant_frequency(geom, self.m1res, self.lres)


@dataclass(frozen=True)
class SubfieldSet:
    """Strictly increasing, nonempty list of radial subfield numbers m1 (m2 is fixed to 0)."""
    m1_values: tuple

    def __post_init__(self):
        values = tuple(int(m) for m in self.m1_values)
        if not values:
            raise ValueError('a subfield set must not be empty')
        if values[0] < 1 or any(b <= a for a, b in zip(values, values[1:])):
            raise ValueError('subfield numbers must be positive and strictly increasing, got {}'.format(values))
        object.__setattr__(self, 'm1_values', values)

    @classmethod
    def range(cls, first, last):
        return cls(tuple(range(first, last + 1)))

    def __iter__(self):
        return iter(self.m1_values)

    def __len__(self):
        return len(self.m1_values)

    def __contains__(self, m1):
        return m1 in self.m1_values


@dataclass(frozen=True)
class SummationControl:
    """
    Budget of the certified longitudinal sum.

    ``on_budget='raise'`` raises `TailBoundError` when `max_terms` is reached
    first; ``'estimate'`` adds half the envelope integral and warns.
    """
    tail_tolerance: float = 1e-6
    max_terms: int = 2**22
    chunk: int = 2**14
    on_budget: str = 'raise'

    def __post_init__(self):
        if self.on_budget not in ('raise', 'estimate'):
            raise ValueError("on_budget must be 'raise' or 'estimate', got {!r}".format(self.on_budget))
        if not (0 < self.tail_tolerance < 1) or self.max_terms < 1 or self.chunk < 1:
            raise ValueError('invalid summation control {}'.format(self))


def _advise_localization(geom, atom):
    if geom.R / atom.sigma < 10 or geom.L / atom.sigma < 10:
        logger.warning('Weak localization: R/sigma = {:.3g}, L/sigma = {:.3g} (both should exceed 10)'.format(
            geom.R / atom.sigma, geom.L / atom.sigma))


def _oscillator_prefactor(sigma):
    # psi_g * psi_e = prefactor * (z - z_A) * exp(-rho^2 / sigma^2)
    return math.sqrt(2.0) / (math.pi**1.5 * sigma**4)


@dataclass(frozen=True)
class AtomProfile:
    psi_g: float
    psi_e: float
    F: np.ndarray


def atom_profile(atom, point, geom=None):
    """
    Oscillator states and the smearing vector ``F = (r - r_A) psi_g psi_e``.

    `point` is ``(r, z)`` or ``(r, phi, z)`` in the cavity frame; F is
    returned in cylindrical components ``(F_r, F_phi, F_z)``. Without
    `geom` the atom must carry an explicit ``center_z``.
    """
    if len(point) == 3:
        r, _, z = point
    else:
        r, z = point
    if not (np.isfinite(r) and np.isfinite(z)):
        raise ValueError('evaluation point must be finite, got {}'.format(point))
    if atom.center_z is None and geom is None:
        raise ValueError('atom_profile needs the geometry or an explicit center_z')
    zeta = z - (atom.center_z if atom.center_z is not None else atom.center(geom))
    s = atom.sigma
    psi_g = math.pi**-0.75 * s**-1.5 * math.exp(-(r**2 + zeta**2) / (2.0 * s**2))
    psi_e = math.sqrt(2.0) * zeta / s * psi_g
    product = psi_g * psi_e
    return AtomProfile(psi_g=psi_g, psi_e=psi_e, F=np.array([r * product, 0.0, zeta * product]))


@dataclass(frozen=True)
class WindowFactor:
    f_abs2: object


def log_time_window(sw, delta):
    """Natural log of the analytic window ``|f(delta)|^2``, elementwise."""
    delta = np.asarray(delta, dtype=float)
    T = sw.T
    if sw.kind is SwitchingKind.TopHat:
        with np.errstate(divide='ignore'):
            return 2.0 * np.log(T) + 2.0 * np.log(np.abs(specfun.sinc(delta * T)))
    exponent = 4.0 if sw.convention is WindowConvention.EXACT else 2.0
    return np.log(2.0 * np.pi) + 2.0 * np.log(T) - exponent * (delta * T)**2


def time_window(sw, delta):
    """
    Analytic ``|integral chi(t) exp(2 i delta t) dt|^2``.

    Examples
    --------
    >>> round(time_window(Switching(SwitchingKind.TopHat, 2.0), 0.0).f_abs2, 12)
    4.0
    >>> round(time_window(Switching(SwitchingKind.Gaussian, 1.0), 0.0).f_abs2 / (2 * np.pi), 12)
    1.0
    """
    value = np.exp(log_time_window(sw, delta))
    return WindowFactor(f_abs2=value.item() if np.ndim(value) == 0 else value)


def _window_amplitude_numeric(kind, T, delta, tol_rel):
    delta = np.atleast_1d(np.asarray(delta, dtype=float))
    # integrate in units of T
    if kind is SwitchingKind.TopHat:
        lo, hi, envelope = 0.0, 1.0, lambda x: 1.0
    else:
        lo, hi, envelope = -ATOM_EXTENT, ATOM_EXTENT, lambda x: math.exp(-0.5 * x**2)
    res = quadrature.integrate_1d(lambda x: envelope(x) * np.exp(2j * delta * T * x), lo, hi, tol_rel=tol_rel,
                                  tol_abs=1e-20, limit=400)
    return T * np.asarray(res.value)


def time_window_numeric(sw, delta, tol_rel=1e-10):
    """Time-quadrature counterpart of `time_window`."""
    scalar = np.ndim(delta) == 0
    if sw.kind is SwitchingKind.Gaussian and sw.convention is WindowConvention.PRINTED:
        value = 2.0 * np.abs(_window_amplitude_numeric(sw.kind, sw.T / math.sqrt(2.0), delta, tol_rel))**2
    else:
        value = np.abs(_window_amplitude_numeric(sw.kind, sw.T, delta, tol_rel))**2
    return WindowFactor(f_abs2=float(value[0]) if scalar else value)


def _subfield_wavenumbers(geom, m1):
    chi = specfun.bessel_zero(specfun.ZeroKind.OfBessel, 0, m1)
    return chi, chi / geom.R, abs(float(special.jv(1, chi)))


def _overlap_scale(geom, atom, m1):
    chi, k_perp, j1 = _subfield_wavenumbers(geom, m1)
    return atom.sigma * k_perp / (j1 * geom.R * math.sqrt(math.pi * geom.L)), k_perp


def overlap_analytic(geom, atom, m1, l):
    """
    Closed-form overlap of the smearing vector with mode (m1, 0, l, Mu2).

    Odd l vanishes for an atom at the cavity midpoint; l = 0 carries the
    extra 1/sqrt(2) of its normalization.
    """
    sigma = atom.sigma
    if sigma / geom.R > 0.2 or sigma / geom.L > 0.2:
        logger.warning('overlap_analytic outside its validity domain: sigma/R = {:.3g}, sigma/L = {:.3g}'.format(
            sigma / geom.R, sigma / geom.L))
    if l % 2:
        return 0j
    scale, k_perp = _overlap_scale(geom, atom, m1)
    k_long = math.pi * l / geom.L
    k_abs = math.hypot(k_perp, k_long)
    value = scale / k_abs * (-1)**(l // 2) * math.exp(-(k_perp * sigma / 2.0)**2 - (k_long * sigma / 2.0)**2)
    if l == 0:
        value /= math.sqrt(2.0)
    return complex(value)


@dataclass(frozen=True)
class OverlapDiagnostic:
    """
    The total overlap next to its radial and axial pieces in the form they
    are usually written, and the recombination of those pieces.

    ``ratio = recombined / total``; 1 means the written pieces are consistent.
    """
    total: complex
    radial: complex
    axial_written: complex
    axial_exact: complex
    recombined: complex
    ratio: float


def overlap_diagnostic(geom, atom, m1, l):
    """Compare the closed-form overlap against the sum of its written intermediate pieces."""
    total = overlap_analytic(geom, atom, m1, l)
    x = (math.pi * l / geom.L * atom.sigma)**2
    radial = total * x / 2.0
    axial_written = total * 0.5 * (1.0 - x / 2.0)
    axial_exact = total * (1.0 - x / 2.0)
    recombined = radial + axial_written
    ratio = (recombined / total).real if total != 0 else float('nan')
    return OverlapDiagnostic(total=total,
                             radial=radial,
                             axial_written=axial_written,
                             axial_exact=axial_exact,
                             recombined=recombined,
                             ratio=ratio)


def _radial_hat(kind, m2, kappa, rho):
    # radial factor divided by c_norm, with r = sigma * rho; A and B carry one power 1/sigma
    if kind == 'A':
        return _j_over_r(m2, kappa, rho) if m2 > 0 else np.zeros_like(np.asarray(rho, dtype=float))
    if kind == 'B':
        return kappa * special.jvp(m2, kappa * rho)
    return special.jv(m2, kappa * rho)


_RADIAL_POWER = {'A': -1, 'B': -1, 'C': 0}


def _overlap_family(geom, atom, m1, m2, pol, l_values, tol_rel=1e-10):
    """
    Brute-force overlaps of the smearing vector with the modes (m1, m2, l, pol)
    for every l in `l_values`, per cylindrical component, shape ``(3, n)``.

    The azimuthal, radial and axial factors are integrated separately; the
    axial integrals for all l share one vector-valued adaptive pass.
    """
    sigma, R, L = atom.sigma, geom.R, geom.L
    l_values = np.atleast_1d(np.asarray(l_values, dtype=int))
    kind = specfun.ZeroKind.OfBessel if pol is Polarization.Mu2 else specfun.ZeroKind.OfBesselDerivative
    k_perp = specfun.bessel_zero(kind, m2, m1) / R
    k_long = np.pi * l_values / L
    coefficients, radial_kinds, long_kinds = mode_structure(pol, FieldKind.Electric, m2, k_perp, k_long)
    c_norm = transverse_normalization(geom, ModeIndex(m1, m2, 1, pol))
    n_norm = np.where(l_values > 0, math.sqrt(2.0 / L), math.sqrt(1.0 / L))

    phi_int = quadrature.integrate_1d(lambda phi: np.exp(1j * m2 * phi), 0.0, 2.0 * np.pi, tol_rel=tol_rel,
                                      tol_abs=OVERLAP_TOL_ABS).value

    kappa, rho_max = k_perp * sigma, R / sigma
    rho_points = [ATOM_EXTENT] if ATOM_EXTENT < rho_max else None

    def radial_integrand(rho):
        gauss = np.exp(-rho**2) * rho
        return np.array([_radial_hat(radial_kinds[0], m2, kappa, rho) * rho * gauss,
                         _radial_hat(radial_kinds[2], m2, kappa, rho) * gauss])

    rad = quadrature.integrate_1d(radial_integrand, 0.0, rho_max, tol_rel=tol_rel, tol_abs=1e-13,
                                  points=rho_points, limit=200).value

    z_a = atom.center(geom)
    s_lo, s_hi = -z_a / sigma, (L - z_a) / sigma
    phase = np.pi * l_values * (z_a / L)
    trig = {'sin': np.sin, 'cos': np.cos}

    def axial_integrand(s):
        arg = phase + k_long * sigma * s
        gauss = math.exp(-s * s)
        return np.concatenate([trig[long_kinds[0]](arg) * s * gauss, trig[long_kinds[2]](arg) * s * s * gauss])

    ax = quadrature.integrate_1d(axial_integrand, s_lo, s_hi, tol_rel=tol_rel, tol_abs=1e-13,
                                 points=[-ATOM_EXTENT, ATOM_EXTENT], limit=400).value
    ax = np.asarray(ax).reshape(2, -1)

    pref = _oscillator_prefactor(sigma)
    # sigma powers: radial factor, atom factor (1 for r), Jacobians rho and d(zeta)
    o_r = coefficients[0] * phi_int * c_norm * sigma**(_RADIAL_POWER[radial_kinds[0]] + 1 + 2) * rad[0] \
        * n_norm * sigma**2 * ax[0]
    o_z = coefficients[2] * phi_int * c_norm * sigma**(_RADIAL_POWER[radial_kinds[2]] + 2) * rad[1] \
        * n_norm * sigma**3 * ax[1]
    return pref * np.array([o_r, np.zeros_like(o_r), o_z], dtype=complex)


def _overlap_volume(geom, atom, idx, tol_rel):
    sigma, R, L = atom.sigma, geom.R, geom.L
    sep = separated_mode(geom, idx, FieldKind.Electric)
    scale = sep.c_norm * sep.n_norm
    z_a = atom.center(geom)

    def integrand(rho, s):
        gauss = math.exp(-rho * rho - s * s)
        atom_hat = np.array([rho * s * gauss, 0.0, s * s * gauss])

        def around(phi):
            return sep(sigma * rho, phi, z_a + sigma * s) / scale * atom_hat

        return rho * np.asarray(quadrature.integrate_1d(around, 0.0, 2.0 * np.pi, tol_rel=0.1 * tol_rel,
                                                        tol_abs=OVERLAP_TOL_ABS).value)

    domain = quadrature.Rectangle(0.0, R / sigma, -z_a / sigma, (L - z_a) / sigma,
                                  x_points=(ATOM_EXTENT,) if ATOM_EXTENT < R / sigma else (),
                                  y_points=(-ATOM_EXTENT, ATOM_EXTENT))
    res = quadrature.integrate_2d(integrand, domain, tol_rel=tol_rel, tol_abs=OVERLAP_TOL_ABS, limit=200)
    return _oscillator_prefactor(sigma) * sigma**5 * scale * np.asarray(res.value, dtype=complex)


def overlap_numeric(geom, atom, idx, method='separable', components=False, tol_rel=1e-10):
    """
    Brute-force overlap ``integral F . u dV`` of the smearing vector with mode `idx`.

    Parameters
    ----------
    method : {'separable', 'volume'}
        'separable' integrates the product factors of each component in 1D
        passes; 'volume' runs nested adaptive quadrature over the cavity.
    components : bool
        Return the per-component contributions ``(r, phi, z)`` instead of their sum.

    Raises
    ------
    NonConvergence
    """
    if method == 'separable':
        parts = _overlap_family(geom, atom, idx.m1, idx.m2, idx.pol, [idx.l], tol_rel)[:, 0]
    elif method == 'volume':
        parts = _overlap_volume(geom, atom, idx, tol_rel)
    else:
        raise ValueError("unknown overlap method '{}'".format(method))
    return parts if components else complex(parts.sum())


class _SubfieldSpectrum(object):
    """
    The terms of one subfield's longitudinal sum for l = 2n.

    ``log_term(n)`` is the exact log contribution, ``log_envelope(x)`` its
    monotone majorant beyond ``n_c``.
    """

    def __init__(self, geom, atom, sw, kind, m1):
        c = geom.constants
        self.geom, self.atom, self.sw, self.kind = geom, atom, sw, kind
        _, self.k_perp, _ = _subfield_wavenumbers(geom, m1)
        scale, _ = _overlap_scale(geom, atom, m1)
        self.log_const = (math.log(c.e**2 / (2.0 * c.epsilon_0 * c.hbar)) + 2.0 * math.log(c.c) +
                          2.0 * math.log(scale) - 0.5 * (self.k_perp * atom.sigma)**2)
        self.a = 2.0 * (math.pi * atom.sigma / geom.L)**2
        if kind is TransitionKind.Emission and atom.omega_a > c.c * self.k_perp:
            k_res = math.sqrt((atom.omega_a / c.c)**2 - self.k_perp**2)
            self.n_c = int(math.ceil(k_res * geom.L / (2.0 * math.pi)))
        else:
            self.n_c = 0

    def omega(self, n):
        return self.geom.constants.c * np.sqrt(self.k_perp**2 + (2.0 * np.pi * np.asarray(n) / self.geom.L)**2)

    def delta(self, n):
        return 0.5 * (self.omega(n) + self.kind.sign * self.atom.omega_a)

    def _log_common(self, n):
        n = np.asarray(n, dtype=float)
        return self.log_const - np.log(self.omega(n)) - self.a * n**2

    def log_term(self, n):
        n = np.asarray(n)
        weight = np.where(n == 0, math.log(0.5), 0.0)
        return self._log_common(n) + weight + log_time_window(self.sw, self.delta(n))

    def log_envelope(self, x):
        if self.sw.kind is SwitchingKind.Gaussian:
            return self._log_common(x) + log_time_window(self.sw, self.delta(x))
        delta = np.abs(self.delta(x))
        with np.errstate(divide='ignore'):
            majorant = np.minimum(2.0 * math.log(self.sw.T), -2.0 * np.log(delta))
        return self._log_common(x) + majorant

    def log_tail(self, N):
        """Log of ``integral_N^inf E(x) dx``, a bound on the sum over n > N."""
        head = float(self.log_envelope(N))
        if not np.isfinite(head):
            return head
        X = max(1.0, float(N))
        ratio = lambda s: np.exp(self.log_envelope(N + X * s) - head)
        res = quadrature.integrate_1d(ratio, 0.0, np.inf, tol_rel=1e-3, tol_abs=1e-300, limit=400)
        return head + math.log(X * (res.value + res.error_estimate))


@dataclass(frozen=True)
class SubfieldSum:
    """Result of one certified longitudinal sum."""
    log_probability: float
    terms: int
    log_tail_bound: float

    @property
    def probability(self):
        return math.exp(self.log_probability)

    @property
    def relative_tail(self):
        return math.exp(self.log_tail_bound - self.log_probability)


def _check_centered(geom, atom):
    if atom.center_z is not None and not math.isclose(atom.center_z, 0.5 * geom.L, rel_tol=1e-12):
        raise ValueError('the analytic path requires the atom at the cavity midpoint')


def subfield_log_probability(geom, atom, sw, kind, m1, control=None):
    """
    Log of the subfield probability ``|c_(m1,0)|^2`` with a certified tail.

    Raises
    ------
    TailBoundError
        If `control.max_terms` is exhausted before the relative tail bound
        drops below `control.tail_tolerance` and ``on_budget='raise'``.
    """
    control = control or SummationControl()
    kind = _as_enum(TransitionKind, kind)
    _check_centered(geom, atom)
    spectrum = _SubfieldSpectrum(geom, atom, sw, kind, m1)
    log_tol = math.log(control.tail_tolerance)

    total, n0, chunk, log_tail = -np.inf, 0, control.chunk, np.inf
    while True:
        n1 = min(n0 + chunk, control.max_terms)
        total = np.logaddexp(total, logsumexp(spectrum.log_term(np.arange(n0, n1))))
        n0 = n1
        if n0 - 1 >= spectrum.n_c:
            log_tail = spectrum.log_tail(n0 - 1)
            if log_tail == -np.inf or log_tail - total <= log_tol:
                return SubfieldSum(log_probability=float(total), terms=n0, log_tail_bound=float(log_tail))
        if n0 >= control.max_terms:
            break
        chunk *= 2

    achieved = math.exp(min(log_tail - total, 700.0)) if np.isfinite(log_tail) else float('inf')
    if control.on_budget == 'estimate' and np.isfinite(log_tail):
        logger.warning('Longitudinal sum for m1 = {} stopped at {} terms with relative tail bound {:.3e}; '
                       'adding half the envelope integral'.format(m1, n0, achieved))
        total = np.logaddexp(total, log_tail + math.log(0.5))
        return SubfieldSum(log_probability=float(total), terms=n0, log_tail_bound=float(log_tail))
    raise TailBoundError(
        'longitudinal sum for m1 = {} (R = {:.4g}, L = {:.4g}, T = {:.4g}, {}) reached only a relative tail '
        'bound of {:.3e} after {} terms'.format(m1, geom.R, geom.L, sw.T, sw.kind.value, achieved, n0), achieved, n0)


@dataclass(frozen=True)
class OracleTerms:
    """Per-mode contributions of the brute-force pipeline and the share carried by odd l."""
    l: np.ndarray
    contributions: np.ndarray
    odd_fraction: float

    @property
    def probability(self):
        return float(self.contributions.sum())


def _oracle_family(geom, atom, kind, m1, pol, l_values, sw, tol_rel):
    c = geom.constants
    overlaps = _overlap_family(geom, atom, m1, 0, pol, l_values, tol_rel).sum(axis=0)
    zero_kind = specfun.ZeroKind.OfBessel if pol is Polarization.Mu2 else specfun.ZeroKind.OfBesselDerivative
    k_perp = specfun.bessel_zero(zero_kind, 0, m1) / geom.R
    omega = c.c * np.hypot(k_perp, np.pi * l_values / geom.L)
    delta = 0.5 * (omega + kind.sign * atom.omega_a)
    log_w = log_time_window(sw, delta)
    keep = log_w > np.max(log_w) - ORACLE_LOG_CUTOFF
    if pol is Polarization.Mu1:
        # (m1, 0, 0, Mu1) is not a mode
        keep &= l_values > 0
    window = np.zeros_like(omega)
    if np.any(keep):
        window[keep] = time_window_numeric(sw, delta[keep], tol_rel).f_abs2
    return omega * c.e**2 / (2.0 * c.epsilon_0 * c.hbar) * np.abs(overlaps)**2 * window


def oracle_subfield_terms(geom, atom, sw, kind, m1, l_values, tol_rel=1e-10, polarizations=(Polarization.Mu2,)):
    """
    Contributions ``omega e^2 / (2 eps0 hbar) |O_l|^2 |f_l|^2`` of every mode
    (m1, 0, l, pol) with both the overlap and the window from quadrature.

    Contributions of the requested polarizations are added per l. Windows
    that the analytic envelope places more than `ORACLE_LOG_CUTOFF` below
    the largest one are set to zero.
    """
    kind = _as_enum(TransitionKind, kind)
    l_values = np.atleast_1d(np.asarray(l_values, dtype=int))
    contributions = np.zeros(l_values.shape)
    for pol in polarizations:
        contributions += _oracle_family(geom, atom, kind, m1, _as_enum(Polarization, pol), l_values, sw, tol_rel)
    total = contributions.sum()
    odd = contributions[l_values % 2 == 1].sum()
    return OracleTerms(l=l_values, contributions=contributions, odd_fraction=float(odd / total) if total else 0.0)


def subfield_probability(geom, atom, sw, kind, m1, path='analytic', control=None):
    """
    First-order transition probability carried by subfield (m1, 0).

    ``path='analytic'`` sums closed-form terms with a certified tail;
    ``path='oracle'`` recomputes the same modes with quadrature overlaps
    and windows, including odd l.
    It covers l up to the last analytic term within `ORACLE_LOG_CUTOFF` of the
    largest one and refuses more than `ORACLE_MAX_MODES` modes.
    """
    _advise_localization(geom, atom)
    result = subfield_log_probability(geom, atom, sw, kind, m1, control)
    if path == 'analytic':
        probability = result.probability
    elif path == 'oracle':
        # even and odd l up to the last analytic term within the cutoff of the largest
        log_terms = _SubfieldSpectrum(geom, atom, sw, _as_enum(TransitionKind, kind), m1).log_term(
            np.arange(result.terms))
        significant = np.flatnonzero(log_terms > np.max(log_terms) - ORACLE_LOG_CUTOFF)
        count = 2 * (int(significant[-1]) + 1)
        if count > ORACLE_MAX_MODES:
            raise ValueError('oracle path for m1 = {} needs {} quadrature overlaps, above the limit of {}; '
                             "use path='analytic'".format(m1, count, ORACLE_MAX_MODES))
        logger.debug('Oracle path for m1 = {} evaluates {} modes'.format(m1, count))
        probability = oracle_subfield_terms(geom, atom, sw, kind, m1, np.arange(count)).probability
    else:
        raise ValueError("unknown path '{}'".format(path))
    if probability > 0.1:
        logger.warning('Subfield probability {:.3g} for m1 = {} is outside the perturbative regime'.format(
            probability, m1))
    return probability


def _log_subfield_envelope(geom, atom, sw, kind, m_values):
    """Log of the per-subfield bound ``K W_max (1 + sqrt(pi/a)/2) / omega`` for the given m1."""
    c = geom.constants
    m_values = np.asarray(m_values, dtype=int)
    chi = np.asarray(specfun.bessel_zeros(specfun.ZeroKind.OfBessel, 0, int(m_values.max())))[m_values - 1]
    k_perp = chi / geom.R
    j1 = np.abs(special.jv(1, chi))
    sigma = atom.sigma
    a = 2.0 * (math.pi * sigma / geom.L)**2
    log_k = (math.log(c.e**2 / (2.0 * c.epsilon_0 * c.hbar)) + 2.0 * math.log(c.c) +
             2.0 * np.log(sigma * k_perp / (j1 * geom.R * math.sqrt(math.pi * geom.L))) - 0.5 * (k_perp * sigma)**2)
    omega = c.c * k_perp
    delta = 0.5 * (omega + kind.sign * atom.omega_a)
    if sw.kind is SwitchingKind.Gaussian:
        log_w = log_time_window(sw, delta)
    else:
        with np.errstate(divide='ignore'):
            log_w = np.minimum(2.0 * math.log(sw.T), -2.0 * np.log(np.abs(delta)))
    return log_k + log_w - np.log(omega) + math.log(1.0 + 0.5 * math.sqrt(math.pi / a))


def _log_remainder(geom, atom, sw, kind, M, cap=2**16):
    # explicit envelope sum from M + 1 until it has decayed far below its head
    count = 1024
    while True:
        logs = _log_subfield_envelope(geom, atom, sw, kind, np.arange(M + 1, M + count + 1))
        if logs[-1] < logs.max() - 50.0 and logs[-1] <= logs[-2] or count >= cap:
            if count >= cap:
                logger.warning('Subfield envelope beyond m1 = {} has not decayed after {} terms'.format(M, cap))
            return float(logsumexp(logs))
        count *= 2


@dataclass(frozen=True)
class TransitionSetResult:
    P_N: float
    P_full: float
    delta_N: float
    log_P_N: float
    log_P_full: float
    subfields_computed: int


def transition_set(geom, atom, sw, kind, subfield_set, control=None, tolerance=1e-4, max_subfields=4096,
                   block=16):
    """
    Probability carried by a subset of subfields and its relative truncation error.

    The full probability extends m1 in blocks until the envelope bound of
    the remaining subfields is below `tolerance` times the partial sum.

    Raises
    ------
    ConvergenceError
        If `max_subfields` are summed without certifying the remainder.
    """
    kind = _as_enum(TransitionKind, kind)
    if not isinstance(subfield_set, SubfieldSet):
        subfield_set = SubfieldSet(tuple(subfield_set))
    _advise_localization(geom, atom)
    c = geom.constants
    log_tol = math.log(tolerance)
    first_above = 1
    if kind is TransitionKind.Emission:
        while c.c * specfun.bessel_zero(specfun.ZeroKind.OfBessel, 0, first_above) / geom.R < atom.omega_a:
            first_above += 1

    logs = []
    while True:
        start = len(logs) + 1
        for m1 in range(start, start + block):
            logs.append(subfield_log_probability(geom, atom, sw, kind, m1, control).log_probability)
        M = len(logs)
        if M < max(subfield_set.m1_values) or M < first_above:
            continue
        log_partial = float(logsumexp(logs))
        log_rest = _log_remainder(geom, atom, sw, kind, M)
        logger.debug('Subfields 1..{}: log P = {:.6g}, log remainder bound = {:.6g}'.format(M, log_partial, log_rest))
        if log_rest - log_partial <= log_tol:
            break
        if M >= max_subfields:
            raise ConvergenceError('full probability not certified after {} subfields (R = {:.4g}, L = {:.4g}, '
                                   'T = {:.4g}); remainder bound {:.3e} relative'.format(
                                       M, geom.R, geom.L, sw.T, math.exp(log_rest - log_partial)))

    logs = np.asarray(logs)
    in_set = np.array([m in subfield_set for m in range(1, len(logs) + 1)])
    log_full = float(logsumexp(logs))
    log_n = float(logsumexp(logs[in_set]))
    delta = math.exp(float(logsumexp(logs[~in_set])) - log_full) if np.any(~in_set) else 0.0
    if log_full > math.log(0.1):
        logger.warning('Total transition probability {:.3g} is outside the perturbative regime'.format(
            math.exp(log_full)))
    return TransitionSetResult(P_N=math.exp(log_n),
                               P_full=math.exp(log_full),
                               delta_N=delta,
                               log_P_N=log_n,
                               log_P_full=log_full,
                               subfields_computed=len(logs))


@dataclass(frozen=True)
class MaxSubfieldResult:
    empirical: int
    asymptotic: float
    geometric_estimate: float
    dynamic_estimate: float
    in_regime: bool
    log_probabilities: np.ndarray


def max_subfield_asymptotic(geom, atom, T, kind):
    """
    Closed-form location of the dominant subfield and whether its
    approximation regime ``q chi^2 > pi`` holds. Returns ``(m, in_regime)``.
    """
    kind = _as_enum(TransitionKind, kind)
    omega_tilde = atom.omega_a * geom.R / geom.constants.c
    tau = atom.omega_a * T
    q = (atom.sigma / (2.0 * geom.R))**2 + (tau / (2.0 * omega_tilde))**2
    s = -kind.sign * math.pi * tau**2 / omega_tilde
    b = 2.0 * math.pi**2 * q + s
    m = 4.0 / (b + math.sqrt(32.0 * math.pi**2 * q + b**2))
    chi = math.pi * (m - 0.25)
    return m, q * chi**2 > math.pi


def max_subfield(geom, atom, T, kind, switching=SwitchingKind.Gaussian, convention=WindowConvention.EXACT,
                 search_limit=None, control=None):
    """
    Subfield carrying the largest probability, scanned and estimated.

    ``empirical`` is the argmax of the scanned probabilities over
    ``1..search_limit``; ``asymptotic`` is the closed-form estimate.
    """
    kind = _as_enum(TransitionKind, kind)
    sw = Switching(switching, T, convention)
    asymptotic, in_regime = max_subfield_asymptotic(geom, atom, T, kind)
    if not in_regime:
        logger.warning('max_subfield: parameters outside the asymptotic regime (q chi^2 <= pi); '
                       'the closed form is indicative only')
    geometric = 2.0 * geom.R / (math.pi * math.sqrt(2.0) * atom.sigma)
    tau = atom.omega_a * T
    chi_res = atom.omega_a * geom.R / geom.constants.c
    dynamic = 2.0 * chi_res / (math.pi * tau**2)

    if search_limit is None:
        search_limit = int(min(4096, max(30, 3.0 * max(asymptotic, min(dynamic, geometric)) + 10)))
    logs = np.array([subfield_log_probability(geom, atom, sw, kind, m1, control).log_probability
                     for m1 in range(1, search_limit + 1)])
    empirical = int(np.argmax(logs)) + 1
    if empirical == search_limit:
        logger.warning('max_subfield: argmax sits at the search limit {}'.format(search_limit))
    return MaxSubfieldResult(empirical=empirical,
                             asymptotic=asymptotic,
                             geometric_estimate=geometric,
                             dynamic_estimate=dynamic,
                             in_regime=in_regime,
                             log_probabilities=logs)
