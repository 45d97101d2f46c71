"""
Dimensional reduction of the cavity modes.

The 3D modes factor as ``u(y, z) = S_m(y) U_l(z) epsilon`` with matrix-valued
ancilla modes on the cross section (S, T) and on the axis (U, V). Projecting
on the cross-section ancilla gives the 1D reduced modes ``U_l(z) epsilon``;
projecting on the axis ancilla gives the 2D reduced modes ``s`` and ``t``.
This module provides the closed forms, the numeric projection that checks
them, the back transformation, and Gram matrices for every domain.

Authors: subfield-qed developers
"""

import enum
import logging
from dataclasses import dataclass

import numpy as np
from scipy import special

from subfield_qed import quadrature
from subfield_qed.cavity import (FieldKind, ModeIndex, Polarization, DomainError, _j_over_r,
                                 longitudinal_normalization, polarization_vectors, separated_mode,
                                 transverse_normalization, wavenumbers)

logger = logging.getLogger(__name__)


class ReductionKind(enum.Enum):
    To1D = 1
    To2D = 2


@dataclass(frozen=True)
class SubfieldLabel:
    """
    Label of one subfield: the cross-section pair (m1, m2) for a reduction to
    1D, or the axial number l for a reduction to 2D.
    """
    reduction_kind: ReductionKind
    m1: int = None
    m2: int = None
    l: int = None

    def __post_init__(self):
        if self.reduction_kind is ReductionKind.To1D:
            if self.m1 is None or self.m2 is None or self.m1 < 1 or self.m2 < 0 or self.l is not None:
                raise ValueError('a 1D subfield is labelled by m1 >= 1 and m2 >= 0 only')
        elif self.l is None or self.l < 0 or self.m1 is not None or self.m2 is not None:
            raise ValueError('a 2D subfield is labelled by l >= 0 only')

    @classmethod
    def of(cls, idx, reduction_kind):
        if reduction_kind is ReductionKind.To1D:
            return cls(reduction_kind, m1=idx.m1, m2=idx.m2)
        return cls(reduction_kind, l=idx.l)


class GramDomain(enum.Enum):
    Volume = 'V'
    CrossSection = 'Gamma'
    Axis = 'S'


@dataclass(frozen=True)
class Reduced1D:
    u_z: np.ndarray
    v_z: np.ndarray


@dataclass(frozen=True)
class Reduced2D:
    s: np.ndarray
    t: np.ndarray


@dataclass(frozen=True)
class Reconstructed:
    u: np.ndarray
    v: np.ndarray


@dataclass(frozen=True)
class BVPCheck:
    """Relative finite-difference residual of the reduced equation and the largest boundary trace."""
    residual: float
    boundary: float


def _axis_matrices(geom, l, z):
    n = longitudinal_normalization(geom, l)
    kz = np.pi * l / geom.L * z
    U = n * np.diag([np.sin(kz), np.sin(kz), np.cos(kz)])
    V = n * np.diag([np.cos(kz), np.cos(kz), np.sin(kz)])
    return U, V


def reduced_1d(geom, idx, z):
    """
    Reduced 1D electric and magnetic modes ``U_l(z) epsilon`` and ``V_l(z) kappa``.

    For Mu1, ``u(z) = L^{-1/2} (sin k_l z, -sin k_l z, 0)``; for Mu2,
    ``u(z) = (L^{1/2} |k|)^{-1} (-k_l sin, -k_l sin, sqrt(2) k_perp cos)``.
    """
    if not (-1e-12 * geom.L <= z <= geom.L * (1 + 1e-12)):
        raise DomainError('z = {} lies outside [0, {}]'.format(z, geom.L))
    pv = polarization_vectors(geom, idx)
    U, V = _axis_matrices(geom, idx.l, z)
    return Reduced1D(u_z=U @ pv.epsilon, v_z=V @ pv.kappa)


def reduced_2d(geom, idx, point):
    """
    Reduced 2D modes ``s`` (electric) and ``t`` (magnetic) on the disk at ``point = (r, phi)``.

    The Mu2 electric and Mu1 magnetic modes keep their dependence on l through
    :math:`|k_j|`, as the polarization survives the reduction.
    """
    r, phi = point
    if not (0 <= r <= geom.R * (1 + 1e-12)):
        raise DomainError('r = {} lies outside the disk of radius {}'.format(r, geom.R))
    w = wavenumbers(geom, idx)
    k_perp, k_long, k_abs = w.k_perp, w.k_long, w.k_abs
    m2 = idx.m2
    c = transverse_normalization(geom, idx)
    x = k_perp * r
    e = np.exp(1j * m2 * phi)
    J = special.jv(m2, x)
    dJ = 0.5 * (special.jv(m2 - 1, x) - special.jv(m2 + 1, x))
    Jr = _j_over_r(m2, k_perp, r) if m2 > 0 else 0.0

    te = (c / k_perp) * np.array([1j * m2 * Jr, -k_perp * dJ, 0.0]) * e
    tm = c / (k_perp * k_abs) * np.array([k_long * k_perp * dJ, k_long * 1j * m2 * Jr, k_perp**2 * J]) * e
    if idx.pol is Polarization.Mu1:
        s, t = te, tm
    else:
        s = -c / (k_perp * k_abs) * np.array([k_long * k_perp * dJ, k_long * 1j * m2 * Jr, -k_perp**2 * J]) * e
        t = te
    return Reduced2D(s=np.asarray(s, dtype=complex), t=np.asarray(t, dtype=complex))


def _ancilla_matrix(geom, m1, m2, r, phi, target):
    """Cross-section ancilla matrix S_m (electric) or T_m (magnetic) at (r, phi)."""
    blocks = {}
    for pol in Polarization:
        idx = ModeIndex(m1, m2, 1, pol)
        k = wavenumbers(geom, idx).k_perp
        c = transverse_normalization(geom, idx)
        e = np.exp(1j * m2 * phi)
        d1 = c * k * special.jvp(m2, k * r) * e
        d2 = 1j * m2 * c * _j_over_r(m2, k, r) * e if m2 > 0 else 0.0
        psi = c * special.jv(m2, k * r) * e
        curl_like = np.array([[d2, -d2, 0.0], [-d1, d1, 0.0], [0.0, 0.0, 0.0]], dtype=complex)
        grad_like = np.array([[d1, d1, 0.0], [d2, d2, 0.0], [0.0, 0.0, np.sqrt(2.0) * k * psi]], dtype=complex)
        blocks[pol] = (curl_like / (np.sqrt(2.0) * k), grad_like / (np.sqrt(2.0) * k))

    if target is FieldKind.Electric:
        return blocks[Polarization.Mu1][0] + blocks[Polarization.Mu2][1]
    return blocks[Polarization.Mu1][1] + blocks[Polarization.Mu2][0]


def project_numeric(geom, target, idx, ancilla_m, z, tol_rel=1e-10, tol_abs=1e-12):
    """
    Project the 3D mode onto the cross-section ancilla ``ancilla_m = (m1, m2)`` by quadrature:
    :math:`\\int_\\Gamma S_{m'}(y)^\\dagger u(y, z)\\, d^2y`.

    Equals the reduced 1D mode when ``ancilla_m`` matches the mode's (m1, m2)
    and vanishes otherwise.
    """
    m1, m2 = ancilla_m
    mode = separated_mode(geom, idx, target)

    def integrand(r, phi):
        A = _ancilla_matrix(geom, m1, m2, r, phi, target)
        return A.conj().T @ mode(r, phi, z)

    result = quadrature.integrate_2d(integrand, quadrature.Disk(geom.R), tol_rel=tol_rel, tol_abs=tol_abs)
    logger.debug('projection of {} on ancilla {} at z={}: {} evaluations'.format(idx, ancilla_m, z,
                                                                                result.evaluations))
    return np.asarray(result.value, dtype=complex)


def reconstruct_3d(geom, idx, point):
    """
    Back transformation ``u = S_m(y) U_l(z) epsilon`` and ``v = T_m(y) V_l(z) kappa``
    assembled from the ancilla matrices and the reduced modes.
    """
    r, phi, z = point
    reduced = reduced_1d(geom, idx, z)
    S = _ancilla_matrix(geom, idx.m1, idx.m2, r, phi, FieldKind.Electric)
    T = _ancilla_matrix(geom, idx.m1, idx.m2, r, phi, FieldKind.Magnetic)
    return Reconstructed(u=S @ reduced.u_z, v=T @ reduced.v_z)


def _hermitian(matrix):
    return 0.5 * (matrix + matrix.conj().T)


def gram(geom, mode_set, domain, field=FieldKind.Electric, tol_rel=1e-10, tol_abs=1e-12):
    """
    Gram matrix of a set of modes by quadrature.

    Parameters
    ----------
    geom : CylinderGeometry
    mode_set : list of ModeIndex
    domain : GramDomain
        ``Volume`` uses the 3D modes (disk quadrature times axis quadrature of
        the separated factors), ``CrossSection`` the reduced 2D modes and
        ``Axis`` the reduced 1D modes.
    field : FieldKind
        Electric (u, s, u(z)) or magnetic (v, t, v(z)) family.

    Returns
    -------
    matrix : numpy.ndarray
        Hermitian ``len(mode_set) x len(mode_set)`` matrix.

    Notes
    -----
    On the ``Axis`` domain, reduced modes with different (m1, m2) generally
    overlap; those off-diagonal entries are part of the result.
    """
    if len(mode_set) == 0:
        raise ValueError('gram requires a nonempty mode set')
    modes = list(mode_set)

    if domain is GramDomain.Volume:
        separated = [separated_mode(geom, idx, field) for idx in modes]

        def transverse(r, phi):
            values = np.array([s.transverse(r, phi) for s in separated]).T
            return values.conj()[:, :, None] * values[:, None, :]

        def longitudinal(z):
            values = np.array([s.longitudinal(z) for s in separated]).T
            return values[:, :, None] * values[:, None, :]

        cross = quadrature.integrate_2d(transverse, quadrature.Disk(geom.R), tol_rel=tol_rel, tol_abs=tol_abs)
        axis = quadrature.integrate_1d(longitudinal, 0.0, geom.L, tol_rel=tol_rel, tol_abs=tol_abs)
        matrix = np.sum(np.asarray(cross.value) * np.asarray(axis.value), axis=0)
        logger.debug('Volume Gram of {} modes: {} evaluations'.format(len(modes),
                                                                       cross.evaluations + axis.evaluations))

    elif domain is GramDomain.CrossSection:

        def integrand(r, phi):
            reduced = [reduced_2d(geom, idx, (r, phi)) for idx in modes]
            values = np.array([red.s if field is FieldKind.Electric else red.t for red in reduced])
            return values.conj() @ values.T

        matrix = quadrature.integrate_2d(integrand, quadrature.Disk(geom.R), tol_rel=tol_rel,
                                         tol_abs=tol_abs).value

    elif domain is GramDomain.Axis:

        def integrand(z):
            reduced = [reduced_1d(geom, idx, z) for idx in modes]
            values = np.array([red.u_z if field is FieldKind.Electric else red.v_z for red in reduced])
            return values @ values.T

        matrix = quadrature.integrate_1d(integrand, 0.0, geom.L, tol_rel=tol_rel, tol_abs=tol_abs).value

    else:
        raise ValueError('unknown Gram domain {!r}'.format(domain))

    return _hermitian(np.atleast_2d(np.asarray(matrix, dtype=complex)))


def _fd_step(scale):
    return 1e-4 * scale


def bvp_check_1d(geom, idx, z, field=FieldKind.Electric):
    """
    Check the reduced 1D boundary-value problem at an interior point ``z``:
    ``(d^2/dz^2 + k_l^2) u(z) = 0`` by central differences, and ``e_z x u = 0``
    at both ends of the axis.
    """
    h = _fd_step(geom.L)
    w = wavenumbers(geom, idx)
    pick = (lambda red: red.u_z) if field is FieldKind.Electric else (lambda red: red.v_z)
    f = lambda zz: pick(reduced_1d(geom, idx, zz))
    second = (f(z + h) - 2.0 * f(z) + f(z - h)) / h**2
    scale = w.k_abs**2 / np.sqrt(geom.L)
    residual = np.max(np.abs(second + w.k_long**2 * f(z))) / scale
    # e_z x u = (-u_2, u_1, 0); only the electric family carries this condition
    if field is FieldKind.Electric:
        boundary = max(np.max(np.abs(f(zb)[:2])) for zb in (0.0, geom.L)) * np.sqrt(geom.L)
    else:
        boundary = max(abs(f(zb)[2]) for zb in (0.0, geom.L)) * np.sqrt(geom.L)
    return BVPCheck(residual=float(residual), boundary=float(boundary))


def bvp_check_2d(geom, idx, point, boundary_angles=(0.0, 1.0, 2.5, 4.0)):
    """
    Check the reduced 2D boundary-value problem: ``(Delta + k_perp^2) s = 0`` by a
    five-point Cartesian stencil at ``point = (r, phi)``, and ``n x s = 0`` on the rim.
    """
    r, phi = point
    w = wavenumbers(geom, idx)
    h = _fd_step(geom.R)

    def s_cartesian(x, y):
        rr, pp = np.hypot(x, y), np.arctan2(y, x)
        s = reduced_2d(geom, idx, (rr, pp)).s
        return np.array([s[0] * np.cos(pp) - s[1] * np.sin(pp), s[0] * np.sin(pp) + s[1] * np.cos(pp), s[2]])

    x0, y0 = r * np.cos(phi), r * np.sin(phi)
    center = s_cartesian(x0, y0)
    laplacian = (s_cartesian(x0 + h, y0) + s_cartesian(x0 - h, y0) + s_cartesian(x0, y0 + h) +
                 s_cartesian(x0, y0 - h) - 4.0 * center) / h**2
    c = transverse_normalization(geom, idx)
    residual = np.max(np.abs(laplacian + w.k_perp**2 * center)) / (w.k_perp**2 * c)
    rim = [reduced_2d(geom, idx, (geom.R, a)).s for a in boundary_angles]
    boundary = max(np.max(np.abs(s[1:])) for s in rim) / c
    return BVPCheck(residual=float(residual), boundary=float(boundary))
