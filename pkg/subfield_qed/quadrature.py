"""
Adaptive numerical integration backing every brute-force oracle in the
package: 1D on finite and semi-infinite intervals, and tensor-product 2D on
rectangles and disks.

The adaptive engine is `scipy.integrate.quad_vec` (21-point Gauss-Kronrod,
bisection of the worst subinterval). Integrands may return scalars or
arrays, real or complex; arrays are integrated in a single adaptive pass
with the error measured in the max norm.

Authors: subfield-qed developers
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy import integrate

logger = logging.getLogger(__name__)

#: Maximum number of subintervals before giving up.
DEFAULT_LIMIT = 60
# quad_vec stopped because rounding error dominates the estimate
ROUNDOFF_STATUS = 2


@dataclass(frozen=True)
class QuadResult:
    """Value of an integral together with its error estimate and cost."""
    value: object
    error_estimate: float
    evaluations: int

    def __post_init__(self):
        if self.error_estimate < 0:
            raise ValueError('error_estimate must be nonnegative')


class NonConvergence(RuntimeError):
    """
    The requested tolerance was not reached within the subdivision limit.

    Attributes
    ----------
    result : QuadResult
        Best available estimate.
    interval : tuple
        The integration interval that failed.
    """

    def __init__(self, message, result, interval):
        super().__init__(message)
        self.result = result
        self.interval = interval


@dataclass(frozen=True)
class Rectangle:
    x0: float
    x1: float
    y0: float
    y1: float
    x_points: tuple = ()
    y_points: tuple = ()


@dataclass(frozen=True)
class Disk:
    """Disk of given radius centred at the origin; integrands receive ``(r, phi)``."""
    radius: float
    r_points: tuple = ()


class _Flattened(object):
    """Wraps an integrand so that quad_vec always sees a flat real vector."""

    def __init__(self, f, probe_at):
        probe = np.asarray(f(probe_at))
        self.f = f
        self.shape = probe.shape
        self.is_complex = np.iscomplexobj(probe)

    def __call__(self, x):
        v = np.asarray(self.f(x))
        if self.is_complex:
            return np.concatenate([v.real.ravel(), v.imag.ravel()])
        return v.ravel().astype(float)

    def restore(self, flat):
        flat = np.asarray(flat)
        if self.is_complex:
            half = flat.size // 2
            flat = flat[:half] + 1j * flat[half:]
        value = flat.reshape(self.shape)
        if value.ndim == 0:
            return value.item()
        return value


def _check_tolerances(tol_rel, tol_abs):
    if tol_rel <= 0 or tol_abs <= 0:
        raise ValueError('tolerances must be positive (tol_rel={}, tol_abs={})'.format(tol_rel, tol_abs))


def integrate_1d(f, a, b, tol_rel=1e-10, tol_abs=1e-12, points=None, limit=DEFAULT_LIMIT):
    """
    Integrate ``f`` over ``[a, b]`` adaptively.

    Parameters
    ----------
    f : callable
        ``f(x)`` returning a real or complex scalar or array.
    a : float
        Finite lower limit.
    b : float
        Upper limit, may be ``numpy.inf``; the semi-infinite case is mapped to
        ``[0, 1)`` by ``x = a + t/(1 - t)``.
    tol_rel, tol_abs : float
        Target ``error <= max(tol_abs, tol_rel * |value|)``.
    points : sequence of float, optional
        Breakpoints inside ``(a, b)`` where the integrand changes character.
    limit : int
        Maximum number of subintervals.

    Returns
    -------
    result : QuadResult

    Raises
    ------
    NonConvergence
        If the tolerance is not met, with the best estimate attached.

    Examples
    --------
    >>> round(integrate_1d(np.sin, 0.0, np.pi).value, 10)
    2.0
    """
    _check_tolerances(tol_rel, tol_abs)
    if not np.isfinite(a):
        raise ValueError('lower limit must be finite')
    if not b > a:
        raise ValueError('integration interval must satisfy b > a, got [{}, {}]'.format(a, b))

    if np.isinf(b):
        g = lambda t: f(a + t / (1.0 - t)) / (1.0 - t)**2
        lo, hi = 0.0, 1.0
        if points is not None:
            points = [(p - a) / (1.0 + p - a) for p in points if p > a]
    else:
        g = f
        lo, hi = a, b
        if points is not None:
            points = [p for p in points if a < p < b]
    if points is not None and len(points) == 0:
        points = None

    wrapped = _Flattened(g, 0.5 * (lo + hi))
    flat, err, info = integrate.quad_vec(wrapped, lo, hi, epsabs=tol_abs, epsrel=tol_rel, norm='max',
                                         limit=limit, points=points, full_output=True)
    result = QuadResult(value=wrapped.restore(flat), error_estimate=float(err), evaluations=int(info.neval) + 1)

    within_target = err <= max(tol_abs, tol_rel * np.max(np.abs(flat), initial=0.0))
    if info.status == ROUNDOFF_STATUS and within_target:
        logger.debug('Rounding error limits the integral over [{}, {}] at error {:.3e}'.format(a, b, err))
    elif info.status != 0 or not within_target:
        raise NonConvergence(
            'integral over [{}, {}] did not converge: error {:.3e} ({})'.format(a, b, err, info.message), result,
            (a, b))
    return result


def integrate_2d(f, domain, tol_rel=1e-10, tol_abs=1e-12, limit=DEFAULT_LIMIT):
    """
    Tensor-product 2D integration built on :func:`integrate_1d`.

    For a `Rectangle` the integrand is called as ``f(x, y)``. For a `Disk` it
    is called as ``f(r, phi)`` and the polar Jacobian ``r`` is applied here.

    The reported error is the outer error plus the outer width times the
    largest inner error.

    Examples
    --------
    >>> round(integrate_2d(lambda r, phi: 1.0, Disk(1.0)).value, 9) == round(np.pi, 9)
    True
    """
    _check_tolerances(tol_rel, tol_abs)
    inner_tol_rel, inner_tol_abs = 0.1 * tol_rel, 0.1 * tol_abs
    cost = {'evaluations': 0, 'error': 0.0}

    if isinstance(domain, Disk):
        lo, hi, outer_points = 0.0, domain.radius, list(domain.r_points) or None

        def inner(r):
            res = integrate_1d(lambda phi: f(r, phi), 0.0, 2.0 * np.pi, inner_tol_rel, inner_tol_abs, limit=limit)
            cost['evaluations'] += res.evaluations
            cost['error'] = max(cost['error'], r * res.error_estimate)
            return r * np.asarray(res.value)

    elif isinstance(domain, Rectangle):
        lo, hi, outer_points = domain.x0, domain.x1, list(domain.x_points) or None
        y_points = list(domain.y_points) or None

        def inner(x):
            res = integrate_1d(lambda y: f(x, y), domain.y0, domain.y1, inner_tol_rel, inner_tol_abs,
                               points=y_points, limit=limit)
            cost['evaluations'] += res.evaluations
            cost['error'] = max(cost['error'], res.error_estimate)
            return np.asarray(res.value)

    else:
        raise TypeError('unsupported integration domain: {!r}'.format(domain))

    try:
        outer = integrate_1d(inner, lo, hi, tol_rel, tol_abs, points=outer_points, limit=limit)
    except NonConvergence as e:
        best = QuadResult(e.result.value, e.result.error_estimate + (hi - lo) * cost['error'], cost['evaluations'])
        raise NonConvergence(str(e), best, e.interval)

    return QuadResult(value=outer.value,
                      error_estimate=outer.error_estimate + (hi - lo) * cost['error'],
                      evaluations=cost['evaluations'])
