"""
Special functions used by the cavity mode builder and the overlap formulas:
Bessel functions of the first kind and their zeros, physicists' Hermite
polynomials, and a handful of auxiliary functions (Gamma, K0, 1F1, sinc).

Evaluation is delegated to `scipy.special`; zeros are Newton-polished and
cached per (kind, order).

Authors: subfield-qed developers
"""

import enum
import functools
import logging

import numpy as np
from scipy import special

logger = logging.getLogger(__name__)

#: Largest Bessel order supported by the mode builder.
MAX_BESSEL_ORDER = 64
#: Largest Hermite order supported by the laser module.
MAX_HERMITE_ORDER = 40


class SpecialFunctionDomainError(ValueError):
    """Raised when a special function is called outside its supported domain."""
    pass


class ZeroKind(enum.Enum):
    """Which function's zeros to look up.

    ``OfBessel`` gives the zeros of :math:`J_n` (Dirichlet modes, Mu2),
    ``OfBesselDerivative`` the zeros of :math:`J_n'` (Neumann modes, Mu1).
    """
    OfBessel = 'J'
    OfBesselDerivative = 'dJ'


class AuxFunction(enum.Enum):
    Gamma = 'gamma'
    BesselK0 = 'k0'
    Hyp1F1 = 'hyp1f1'
    Sinc = 'sinc'


def _check_order(order, limit, name):
    if int(order) != order or order < 0 or order > limit:
        raise SpecialFunctionDomainError('{} order must be an integer in [0, {}], got {}'.format(name, limit, order))
    return int(order)


def _scalar_or_array(value):
    value = np.asarray(value)
    if value.ndim == 0:
        return value.item()
    return value


def bessel_j(order, x, derivative=False):
    """
    Bessel function of the first kind :math:`J_n(x)` or its derivative.

    Parameters
    ----------
    order : int
        Nonnegative integer order, at most `MAX_BESSEL_ORDER`.
    x : float or array_like
        Real, finite argument(s).
    derivative : bool, default=False
        If True, return :math:`J_n'(x)`.

    Returns
    -------
    value : float or numpy.ndarray

    Examples
    --------
    >>> bessel_j(0, 0.0)
    1.0
    >>> abs(bessel_j(0, 1.0, derivative=True) + bessel_j(1, 1.0)) < 1e-15
    True
    """
    order = _check_order(order, MAX_BESSEL_ORDER, 'Bessel')
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise SpecialFunctionDomainError('Bessel argument must be finite')
    if derivative:
        return _scalar_or_array(special.jvp(order, x))
    return _scalar_or_array(special.jv(order, x))


def _second_derivative(order, x):
    # Bessel's equation: x^2 J'' + x J' + (x^2 - n^2) J = 0
    return -special.jvp(order, x) / x - (1.0 - order**2 / x**2) * special.jv(order, x)


def _polish(kind, order, zeros, iterations=3):
    zeros = np.array(zeros, dtype=float)
    for _ in range(iterations):
        if kind is ZeroKind.OfBessel:
            zeros = zeros - special.jv(order, zeros) / special.jvp(order, zeros)
        else:
            zeros = zeros - special.jvp(order, zeros) / _second_derivative(order, zeros)
    return zeros


@functools.lru_cache(maxsize=None)
def _zero_table(kind, order, count):
    if kind is ZeroKind.OfBessel:
        raw = special.jn_zeros(order, count)
    else:
        raw = special.jnp_zeros(order, count)
    zeros = tuple(float(z) for z in _polish(kind, order, raw))
    logger.debug('Cached {} zeros of {} order {}'.format(count, kind.name, order))
    return zeros


def bessel_zeros(kind, order, count):
    """
    The first `count` positive zeros of :math:`J_n` or :math:`J_n'` as a tuple.

    Tables are computed in power-of-two blocks and cached, so repeated calls
    with growing `count` only trigger a handful of evaluations.
    """
    order = _check_order(order, MAX_BESSEL_ORDER, 'Bessel')
    if count < 1:
        raise SpecialFunctionDomainError('zero count must be positive, got {}'.format(count))
    block = 1 << int(np.ceil(np.log2(max(count, 8))))
    return _zero_table(ZeroKind(kind), order, block)[:count]


def bessel_zero(kind, order, index):
    """
    The `index`-th positive zero (1-based) of :math:`J_n` or :math:`J_n'`.

    For ``OfBesselDerivative`` with order 0 the trivial zero at x = 0 is not
    counted, so ``bessel_zero(ZeroKind.OfBesselDerivative, 0, 1) == 3.8317...``.

    Examples
    --------
    >>> round(bessel_zero(ZeroKind.OfBessel, 0, 1), 9)
    2.404825558
    """
    if int(index) != index or index < 1:
        raise SpecialFunctionDomainError('zero index must be a positive integer, got {}'.format(index))
    return bessel_zeros(kind, order, int(index))[int(index) - 1]


def hermite_h(n, x):
    """
    Physicists' Hermite polynomial :math:`H_n(x)` by the three-term recurrence
    :math:`H_{n+1} = 2xH_n - 2nH_{n-1}`.

    Examples
    --------
    >>> hermite_h(3, 1.0)
    -4.0
    """
    n = _check_order(n, MAX_HERMITE_ORDER, 'Hermite')
    x = np.asarray(x, dtype=float)
    h_prev = np.ones_like(x)
    if n == 0:
        return _scalar_or_array(h_prev)
    h = 2.0 * x
    for j in range(1, n):
        h_prev, h = h, 2.0 * x * h - 2.0 * j * h_prev
    return _scalar_or_array(h)


def gamma(x):
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise SpecialFunctionDomainError('Gamma is only supported for positive arguments')
    return _scalar_or_array(special.gamma(x))


def bessel_k0(x):
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise SpecialFunctionDomainError('K0 requires a positive argument')
    return _scalar_or_array(special.k0(x))


def hyp1f1(a, b, x):
    """Kummer's confluent hypergeometric function :math:`{}_1F_1(a; b; x)`."""
    if b <= 0 and float(b).is_integer():
        raise SpecialFunctionDomainError('1F1 is undefined for nonpositive integer b = {}'.format(b))
    return _scalar_or_array(special.hyp1f1(a, b, np.asarray(x, dtype=float)))


def sinc(x):
    """Unnormalized sinc, sin(x)/x with sinc(0) = 1."""
    # numpy's sinc is normalized: sinc(t) = sin(pi t)/(pi t)
    return _scalar_or_array(np.sinc(np.asarray(x, dtype=float) / np.pi))


_AUX = {
    AuxFunction.Gamma: (gamma, 1),
    AuxFunction.BesselK0: (bessel_k0, 1),
    AuxFunction.Hyp1F1: (hyp1f1, 3),
    AuxFunction.Sinc: (sinc, 1),
}


def aux_special(which, args):
    """
    Dispatch to one of the auxiliary functions by name.

    Parameters
    ----------
    which : AuxFunction or str
        One of ``Gamma``, ``BesselK0``, ``Hyp1F1`` (args ``a, b, x``) or ``Sinc``.
    args : sequence of float

    Examples
    --------
    >>> aux_special(AuxFunction.Sinc, [0.0])
    1.0
    """
    if isinstance(which, str):
        which = AuxFunction[which]
    func, nargs = _AUX[which]
    if len(args) != nargs:
        raise SpecialFunctionDomainError('{} takes {} argument(s), got {}'.format(which.name, nargs, len(args)))
    return func(*args)
