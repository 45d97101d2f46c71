"""
Self-test battery: every invariant of the library checked against an
independent oracle (bisection, quadrature, finite differences, direct
sums) at a loose Quick level or the complete Full level.

Known differences between the closed forms as usually written and the
exact values are measured and logged with the prefix ``DEVIATION``; they do not
fail the run unless their measured size changes.

Authors: subfield-qed developers
"""

import enum
import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np
from scipy import constants, optimize, special

from subfield_qed import cavity, quadrature, reduction, specfun
from subfield_qed.cavity import CylinderGeometry, FieldKind, ModeIndex, Polarization
from subfield_qed.interaction import (GaussianAtom, Resonance, SubfieldSet, SummationControl, Switching,
                                      SwitchingKind, TransitionKind, WindowConvention, max_subfield,
                                      overlap_analytic, overlap_diagnostic, overlap_numeric, subfield_probability,
                                      time_window, time_window_numeric, transition_set)
from subfield_qed.laser import (BeamModeIndex, HermiteBeam, gamma_closed, gamma_sum, hermite_mode_full,
                                laser_time_factor, laser_time_factor_displayed, laser_time_factor_numeric,
                                paraxial_residual, separable_mode, zeta)

logger = logging.getLogger(__name__)

BOHR_RADIUS = constants.physical_constants['Bohr radius'][0]


class SelfTestLevel(enum.Enum):
    Quick = 'quick'
    Full = 'full'


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0
    deviation: bool = False


@dataclass
class SelfTestReport:
    level: SelfTestLevel
    checks: list = field(default_factory=list)

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    @property
    def failures(self):
        return [c for c in self.checks if not c.passed]

    @property
    def deviations(self):
        return [c for c in self.checks if c.deviation]


_CHECKS = []


def _check(name, full_only=False, deviation=False):

    def register(function):
        _CHECKS.append((name, full_only, deviation, function))
        return function

    return register


def _relative(a, b):
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b)) / max(np.max(np.abs(b)), 1e-300))


###################
#  SPECIAL FUNCS  #
###################
def _bisection_zeros(kind, order, count):
    f = (lambda x: special.jv(order, x)) if kind is specfun.ZeroKind.OfBessel else (lambda x: special.jvp(order, x))
    zeros, x, step = [], 1e-3, 0.05
    while len(zeros) < count:
        if f(x) * f(x + step) < 0:
            zeros.append(optimize.brentq(f, x, x + step, xtol=1e-14, rtol=4 * np.finfo(float).eps))
        x += step
    return np.array(zeros)


@_check('bessel zeros match bisection')
def _bessel_zeros(level):
    worst = 0.0
    for kind in specfun.ZeroKind:
        for order in range(4):
            count = 10 if level is SelfTestLevel.Quick else 40
            worst = max(worst, np.max(np.abs(np.array(specfun.bessel_zeros(kind, order, count)) -
                                             _bisection_zeros(kind, order, count))))
    return worst < 1e-10, 'max |zero - bisection| = {:.2e}'.format(worst)


@_check('Kummer identity 1F1(2;1;-x) - 1F1(1;1;-x) = -x exp(-x)')
def _kummer(level):
    x = np.linspace(0.0, 10.0, 41)
    err = np.max(np.abs(specfun.hyp1f1(2, 1, -x) - specfun.hyp1f1(1, 1, -x) + x * np.exp(-x)))
    return err < 1e-10, 'max error {:.2e}'.format(err)


@_check('Hermite recurrence against scipy')
def _hermite(level):
    x = np.linspace(-3.0, 3.0, 13)
    err = max(_relative(specfun.hermite_h(n, x), special.eval_hermite(n, x)) for n in range(21))
    return err < 1e-12, 'max relative error {:.2e}'.format(err)


@_check('adaptive quadrature of an oscillatory integral')
def _quadrature(level):
    res = quadrature.integrate_1d(lambda x: np.cos(50.0 * x) * np.exp(-x), 0.0, 10.0, tol_rel=1e-12, limit=200)
    exact = ((1.0 - np.exp(-(1.0 - 50j) * 10.0)) / (1.0 - 50j)).real
    err = abs(res.value - exact) / exact
    return err < 1e-9, 'relative error {:.2e} after {} evaluations'.format(err, res.evaluations)


###################
#  CAVITY MODES   #
###################
_UNIT_CAVITY = CylinderGeometry(1.0, 2.0)
_SAMPLE_MODES = (ModeIndex(1, 0, 0, Polarization.Mu2), ModeIndex(2, 1, 3, Polarization.Mu1),
                 ModeIndex(1, 2, 1, Polarization.Mu2), ModeIndex(3, 0, 2, Polarization.Mu1))


@_check('Helmholtz residual of the 3D modes')
def _helmholtz(level):
    rng = np.random.default_rng(20)
    points = [(rng.uniform(0.05, 0.95), rng.uniform(0, 2 * np.pi), rng.uniform(0.05, 1.95))
              for _ in range(5 if level is SelfTestLevel.Quick else 20)]
    worst = max(cavity.helmholtz_residual(_UNIT_CAVITY, idx, p, fk) for idx in _SAMPLE_MODES
                for p in points for fk in FieldKind)
    return worst < 1e-4, 'max relative residual {:.2e}'.format(worst)


@_check('boundary conditions of the 3D modes')
def _boundary(level):
    angles = (0.3, 2.0, 4.4)
    wall = [(1.0, a, z) for a in angles for z in (0.4, 1.3)] + [(r, a, z) for r in (0.2, 0.7) for a in angles
                                                                   for z in (0.0, 2.0)]
    worst = 0.0
    for idx in _SAMPLE_MODES:
        for p in wall:
            b = cavity.boundary_check(_UNIT_CAVITY, idx, p)
            worst = max(worst, b.tangential_u, b.divergence_u, b.normal_v, b.tangential_curl_v)
    return worst < 1e-8, 'max boundary trace {:.2e}'.format(worst)


@_check('magnetic mode is the curl of the electric mode')
def _curl(level):
    err = max(cavity.curl_residual(_UNIT_CAVITY, ModeIndex(2, 1, 3, Polarization.Mu1), p)
              for p in ((0.3, 0.5, 0.7), (0.8, 2.0, 1.5)))
    return err < 1e-5, 'max relative residual {:.2e}'.format(err)


@_check('Gram matrix of the 3D modes is the identity')
def _gram(level):
    if level is SelfTestLevel.Quick:
        modes = cavity.mode_set(2, 1, 1)
    else:
        modes = cavity.mode_set(3, 2, 3)
    worst = 0.0
    for fieldkind in FieldKind:
        G = reduction.gram(_UNIT_CAVITY, modes, reduction.GramDomain.Volume, fieldkind, tol_rel=1e-9)
        worst = max(worst, float(np.max(np.abs(G - np.eye(len(modes))))))
    return worst < 1e-6, '{} modes, max |G - 1| = {:.2e}'.format(len(modes), worst)


@_check('reduction: projection, reconstruction and reduced equations')
def _reduction(level):
    idx = ModeIndex(2, 1, 2, Polarization.Mu2)
    projected = reduction.project_numeric(_UNIT_CAVITY, FieldKind.Electric, idx, (2, 1), 0.7, tol_rel=1e-11,
                                          tol_abs=1e-13)
    e_proj = float(np.max(np.abs(projected - reduction.reduced_1d(_UNIT_CAVITY, idx, 0.7).u_z)))
    point = (0.45, 1.1, 0.7)
    e_rec = float(np.max(np.abs(reduction.reconstruct_3d(_UNIT_CAVITY, idx, point).u -
                                cavity.em_mode_3d(_UNIT_CAVITY, idx, point).u)))
    bvp = [reduction.bvp_check_1d(_UNIT_CAVITY, idx, 0.7), reduction.bvp_check_2d(_UNIT_CAVITY, idx, (0.45, 1.1))]
    e_bvp = max(max(b.residual, b.boundary) for b in bvp)
    passed = e_proj < 1e-7 and e_rec < 1e-12 and e_bvp < 1e-6
    return passed, 'projection {:.1e}, reconstruction {:.1e}, reduced residuals {:.1e}'.format(e_proj, e_rec, e_bvp)


###################
#  INTERACTION    #
###################
def _waveguide(R_over_sigma, L_over_R):
    return CylinderGeometry.from_ratios(BOHR_RADIUS, R_over_sigma, L_over_R)


@_check('switching windows match time quadrature')
def _windows(level):
    worst = 0.0
    for kind in SwitchingKind:
        for convention in WindowConvention:
            sw = Switching(kind, 1.3, convention)
            delta = np.array([0.0, 0.4, 1.1, 2.5])
            worst = max(worst, _relative(time_window_numeric(sw, delta).f_abs2, time_window(sw, delta).f_abs2))
    return worst < 1e-8, 'max relative error {:.2e}'.format(worst)


@_check('closed-form overlaps match quadrature')
def _overlaps(level):
    geom = _waveguide(20.0, 5.0)
    atom = GaussianAtom(BOHR_RADIUS, 1e15)
    worst = 0.0
    for m1 in (1, 2, 3):
        for l in (0, 2, 4):
            numeric = overlap_numeric(geom, atom, ModeIndex(m1, 0, l, Polarization.Mu2))
            worst = max(worst, abs(numeric - overlap_analytic(geom, atom, m1, l)) / abs(numeric))
    return worst < 1e-6, 'max relative error {:.2e}'.format(worst)


@_check('analytic subfield probability matches the brute-force pipeline')
def _oracle(level):
    if level is SelfTestLevel.Quick:
        geom, m_values, taus = _waveguide(20.0, 10.0), (1, 2), (1.0,)
    else:
        geom, m_values, taus = _waveguide(20.0, 1e3), range(1, 11), (0.5, 1.0, 2.0)
    atom = GaussianAtom.resonant(geom, BOHR_RADIUS, Resonance(1, 0))
    worst = 0.0
    for tau in taus:
        sw = Switching(SwitchingKind.Gaussian, tau / atom.omega_a)
        for m1 in m_values:
            analytic = subfield_probability(geom, atom, sw, TransitionKind.Emission, m1)
            oracle = subfield_probability(geom, atom, sw, TransitionKind.Emission, m1, path='oracle')
            worst = max(worst, abs(analytic - oracle) / oracle)
    return worst < 0.02, 'max relative difference {:.2e}'.format(worst)


@_check('dominant subfield follows the geometry below resonance', full_only=True)
def _geometric_argmax(level):
    misses = []
    for R_over_sigma in (10.0, 30.0, 60.0):
        geom = _waveguide(R_over_sigma, 10.0)
        atom = GaussianAtom(BOHR_RADIUS, 0.5 * constants.c / geom.R)
        result = max_subfield(geom, atom, 1e-4 / atom.omega_a, TransitionKind.Emission)
        target = round(result.geometric_estimate)
        if abs(result.empirical - target) > 2:
            misses.append('R/sigma={:g}: {} vs {}'.format(R_over_sigma, result.empirical, target))
    return not misses, '; '.join(misses) or 'argmax within 2 of 2R/(pi sqrt(2) sigma)'


@_check('dominant subfield sits near twice the resonant one', full_only=True)
def _resonant_argmax(level):
    geom = _waveguide(1000.0, 100.0)
    atom = GaussianAtom.resonant(geom, BOHR_RADIUS, Resonance(10, 0))
    result = max_subfield(geom, atom, 1.0 / atom.omega_a, TransitionKind.Emission,
                          convention=WindowConvention.PRINTED)
    return abs(result.empirical - 20) <= 2, 'argmax m1 = {} (asymptotic {:.2f})'.format(result.empirical,
                                                                                   result.asymptotic)


def _waveguide_deltas(switching, kind, subfields, taus, omega_a=None, resonance=None):
    geom = _waveguide(20.0, 1e5)
    atom = GaussianAtom.resonant(geom, BOHR_RADIUS, resonance) if resonance else GaussianAtom(BOHR_RADIUS, omega_a)
    control = SummationControl(tail_tolerance=1e-4, on_budget='estimate')
    return [transition_set(geom, atom, Switching(switching, tau / atom.omega_a), kind, SubfieldSet(subfields),
                           control=control, tolerance=1e-3).delta_N for tau in taus]


@_check('Gaussian switching isolates one off-resonant waveguide subfield', full_only=True)
def _waveguide_gaussian(level):
    taus = (5.0, 10.0, 20.0, 35.0, 50.0)
    gauss = _waveguide_deltas(SwitchingKind.Gaussian, TransitionKind.Emission, (1,), taus, omega_a=6e12)
    sudden = _waveguide_deltas(SwitchingKind.TopHat, TransitionKind.Emission, (1,), taus, omega_a=6e12)
    monotone = all(b <= a * (1 + 1e-9) for a, b in zip(gauss, gauss[1:]))
    passed = monotone and gauss[-1] < 0.05 and min(sudden) >= 0.05
    return passed, 'Gaussian delta {:.2e} -> {:.2e}, top-hat min {:.2e}'.format(gauss[0], gauss[-1], min(sudden))


@_check('resonant vacuum excitation does not converge to one subfield', full_only=True)
def _waveguide_excitation(level):
    deltas = _waveguide_deltas(SwitchingKind.Gaussian, TransitionKind.Excitation, (5,), (5.0, 20.0, 50.0),
                               resonance=Resonance(5, 2))
    return min(deltas) > 0.01, 'min delta {:.3f}'.format(min(deltas))


###################
#  LASER          #
###################
@_check('gamma_N closed form equals the direct sum')
def _gamma(level):
    err = max(abs(gamma_closed((n1, n2)) - gamma_sum((n1, n2))) for n1 in range(9) for n2 in range(9))
    one = abs(gamma_closed((1, 0)) - 1.0 / 6.0)
    return err < 1e-10 and one < 1e-12, 'max difference {:.2e}, |gamma_(1,0) - 1/6| = {:.1e}'.format(err, one)


def _laser_setup(omega_ratio, tau, alpha_sq=1e20, omega_a=1e15):
    atom = GaussianAtom(BOHR_RADIUS, omega_a)
    beam = HermiteBeam(w0=1e-6, k=omega_ratio * omega_a / constants.c, alpha_sq=alpha_sq)
    return atom, beam, Switching(SwitchingKind.Gaussian, tau / omega_a)


@_check('zeta stays below gamma_N / (4 |alpha|^2)')
def _zeta_bound(level):
    n = 5 if level is SelfTestLevel.Quick else 20
    N = (8, 8)
    violations, worst, largest = 0, 0.0, 0.0
    for tau in np.linspace(0.2, 4.0, n):
        for ratio in np.linspace(0.2, 3.0, n):
            atom, beam, sw = _laser_setup(ratio, tau)
            z = zeta(atom, beam, sw, TransitionKind.Excitation, N)
            violations += not z.holds
            worst = max(worst, z.value / z.bound)
            largest = max(largest, z.value)
    vacuum_ok = largest <= 2.5e-21 * gamma_sum(N) * (1 + 1e-12)
    return violations == 0 and vacuum_ok, '{} violations, max zeta/bound = {:.3f}'.format(violations, worst)


@_check('laser time factor matches time quadrature')
def _laser_time(level):
    worst = 0.0
    for kind in SwitchingKind:
        sw = Switching(kind, 1.1)
        for omega, omega_a in ((0.5, 1.0), (2.0, 1.5), (3.0, 0.2)):
            worst = max(worst, _relative(laser_time_factor_numeric(sw, omega, omega_a),
                                         laser_time_factor(sw, omega, omega_a)))
    return worst < 1e-8, 'max relative error {:.2e}'.format(worst)


@_check('paraxial beam modes')
def _paraxial(level):
    beam = HermiteBeam(w0=1e-5, k=1e7)
    m = BeamModeIndex(1, 2)
    residual = max(paraxial_residual(beam, m, (x * beam.w0, y * beam.w0, z * beam.rayleigh_length))
                   for x, y, z in ((0.1, 0.2, 0.0), (0.3, -0.2, 0.5), (-0.4, 0.1, 1.0)))
    x, y = 0.3 * beam.w0, -0.2 * beam.w0
    focus = abs(hermite_mode_full(beam, m, (x, y, 0.0))[0] - separable_mode(beam, m, x, y))
    errors = [abs(hermite_mode_full(beam, m, (x, y, z * beam.rayleigh_length))[0] - separable_mode(beam, m, x, y))
              for z in (0.1, 0.3, 1.0)]
    degrading = all(b > a for a, b in zip(errors, errors[1:]))
    return residual < 1e-3 and focus < 1e-12 * abs(separable_mode(beam, m, x, y)) and degrading, \
        'residual {:.1e}, focus mismatch {:.1e}'.format(residual, focus)


###################
#  DEVIATIONS     #
###################
@_check('Gaussian window exponent', deviation=True)
def _dev_gaussian(level):
    sw = Switching(SwitchingKind.Gaussian, 1.0)
    printed = time_window(Switching(SwitchingKind.Gaussian, 1.0, WindowConvention.PRINTED), 1.0).f_abs2
    ratio = printed / time_window_numeric(sw, 1.0).f_abs2
    return abs(ratio - math.exp(2.0)) < 1e-6 * ratio, \
        'printed exp(-2 (Delta T)^2) over quadrature exp(-4 (Delta T)^2) = {:.6f} at Delta T = 1'.format(ratio)


@_check('recombined overlap pieces', deviation=True)
def _dev_overlap(level):
    geom = _waveguide(20.0, 5.0)
    atom = GaussianAtom(BOHR_RADIUS, 1e15)
    d = overlap_diagnostic(geom, atom, 1, 40)
    x = (math.pi * 40 / geom.L * atom.sigma)**2
    return abs(d.ratio - (1 + x / 2) / 2) < 1e-12, \
        'written radial + axial pieces give {:.6f} of the total overlap at l = 40'.format(d.ratio)


@_check('top-hat laser cross term', deviation=True)
def _dev_tophat(level):
    sw = Switching(SwitchingKind.TopHat, 1.0)
    omega, omega_a = 3.0, 1.0
    numeric = laser_time_factor_numeric(sw, omega, omega_a)
    ratio = laser_time_factor_displayed(sw, omega, omega_a) * sw.T**2 / numeric
    return abs(laser_time_factor(sw, omega, omega_a) / numeric - 1) < 1e-8, \
        'written cross term s+ s- (2 cos^2(omega T/2) + 1) gives {:.6f} of the quadrature value'.format(ratio)


@_check('laser amplitude factor', deviation=True)
def _dev_quarter(level):
    T, omega, omega_a = 1.0, 3.0, 1.0
    res = quadrature.integrate_1d(lambda t: math.cos(omega * t) * np.exp(1j * omega_a * t), 0.0, T)
    ratio = abs(res.value)**2 / laser_time_factor(Switching(SwitchingKind.TopHat, T), omega, omega_a)
    return abs(ratio - 0.25) < 1e-10, \
        'Re[alpha exp(-i omega t)] gives {:.6f} |alpha|^2 |f- + conj(f+)|^2; the probability omits it'.format(ratio)


@_check('excluded vacuum mode in gamma_N', deviation=True)
def _dev_gamma(level):
    difference = gamma_sum((8, 8)) - gamma_sum((8, 8), exclude=(0, 0))
    return abs(difference - 1.0 / 12.0) < 1e-12, \
        'excluding the pumped mode instead of the closed-form one changes gamma_N by {:.6f}'.format(difference)


@_check('zeta bound for emission', deviation=True)
def _dev_zeta(level):
    atom, beam, _ = _laser_setup(1.0, 1.0, alpha_sq=1.0)
    sw = Switching(SwitchingKind.Gaussian, math.sqrt(3.0) / atom.omega_a)
    z = zeta(atom, beam, sw, TransitionKind.Emission, (8, 8))
    return not z.holds, 'Gaussian emission zeta / bound = {:.3f} at omega Omega T^2 = 3'.format(z.value / z.bound)


def self_test(level=SelfTestLevel.Quick):
    """
    Run the battery and report each verdict at the REPORT level.

    Parameters
    ----------
    level : SelfTestLevel or str
        Quick runs every check at reduced size; Full adds the scan regressions.

    Returns
    -------
    report : SelfTestReport
    """
    level = level if isinstance(level, SelfTestLevel) else SelfTestLevel(str(level).lower())
    report = SelfTestReport(level)
    for name, full_only, deviation, function in _CHECKS:
        if full_only and level is SelfTestLevel.Quick:
            continue
        start = time.perf_counter()
        try:
            passed, detail = function(level)
        except Exception as e:
            logger.debug('check {!r} raised'.format(name), exc_info=True)
            passed, detail = False, '{}: {}'.format(type(e).__name__, e)
        result = CheckResult(name=name, passed=bool(passed), detail=detail, seconds=time.perf_counter() - start,
                             deviation=deviation)
        report.checks.append(result)
        if deviation and result.passed:
            logger.warning('DEVIATION {}: {}'.format(name, detail))
        logger.report('{} {} ({:.1f} s): {}'.format('PASS' if result.passed else 'FAIL', name, result.seconds,
                                                     detail))
    if report.passed:
        logger.report('self-test {}: all {} checks passed'.format(level.name, len(report.checks)))
    else:
        logger.report('self-test {}: {} failed: {}'.format(level.name, len(report.failures),
                                                           ', '.join(c.name for c in report.failures)))
    return report
