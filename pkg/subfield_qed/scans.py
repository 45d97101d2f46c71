"""
Parameter scans written as CSV: subfield ratios against a geometry group,
the truncation error of a subfield subset against the switching time, the
gamma_N contour and the vacuum-to-laser ratio zeta.

Scan points are independent library calls; with ``workers > 1`` they run
in a process pool whose ``map`` keeps the parameter order, so the CSV does
not depend on completion order.

Authors: subfield-qed developers
"""

import enum
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from dataclasses import field as dataclass_field

import numpy as np
from scipy import constants

from subfield_qed import reporters
from subfield_qed.cavity import CylinderGeometry
from subfield_qed.interaction import (ConvergenceError, GaussianAtom, Resonance, SubfieldSet, SummationControl,
                                      Switching, SwitchingKind, TailBoundError, TransitionKind, WindowConvention,
                                      subfield_log_probability, transition_set)
from subfield_qed.laser import HermiteBeam, gamma_closed, gamma_sum, zeta
from subfield_qed.quadrature import NonConvergence
from subfield_qed.specfun import SpecialFunctionDomainError

logger = logging.getLogger(__name__)

#: Numerical failures that abort a scan point.
NUMERIC_ERRORS = (NonConvergence, TailBoundError, ConvergenceError, SpecialFunctionDomainError)


class ScanKind(enum.Enum):
    SubfieldRatios = 'SubfieldRatios'
    TruncationError = 'TruncationError'
    GammaContour = 'GammaContour'
    LaserZeta = 'LaserZeta'


class ScanPointError(RuntimeError):
    """A numerical failure at one scan point; the message names the point and the cause."""


@dataclass(frozen=True)
class ScanConfig:
    """
    Resolved scan parameters in SI units, built by `settings.Settings`.

    Only the fields of the chosen `scan_kind` are used.
    """
    scan_kind: ScanKind
    outfname: str
    plot: bool = False
    workers: int = 1
    geometry: dict = dataclass_field(default_factory=dict)
    sigma: float = None
    mass: float = None
    omega_a: float = None
    resonance: Resonance = None
    switching_kinds: tuple = (SwitchingKind.Gaussian,)
    convention: WindowConvention = WindowConvention.EXACT
    transition_kinds: tuple = (TransitionKind.Emission,)
    summation: SummationControl = dataclass_field(default_factory=SummationControl)
    ratio_name: str = None
    ratio_values: tuple = ()
    m1_values: tuple = ()
    T: float = None
    omega_a_T: tuple = ()
    subfields: SubfieldSet = None
    tolerance: float = 1e-4
    max_subfields: int = 4096
    N1_values: tuple = ()
    N2_values: tuple = ()
    beam: dict = dataclass_field(default_factory=dict)
    modes: tuple = (8, 8)
    omega_ratios: tuple = ()


@dataclass
class ScanResult:
    """Columns and rows as written to ``csv_path``, with the summary of the scanned quantity."""
    scan_kind: ScanKind
    columns: list
    rows: list
    summary: dict
    csv_path: str
    plot_path: str = None

    def column(self, name):
        i = self.columns.index(name)
        return [row[i] for row in self.rows]


COLUMNS = {
    ScanKind.TruncationError: ['omega_a_T', 'N_count', 'delta_N', 'kind', 'switching'],
    ScanKind.GammaContour: ['N1', 'N2', 'gamma_closed', 'gamma_sum'],
    ScanKind.LaserZeta: ['omega_a_T', 'omega_over_omega_a', 'zeta', 'bound', 'holds'],
}


def _map(function, tasks, workers):
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(function, tasks))
    return [function(task) for task in tasks]


def _point_failure(point, error):
    return ScanPointError('{} at {}: {}'.format(type(error).__name__, point, error))


def _geometry(scan, ratio_value=None):
    groups = dict(scan.geometry)
    if ratio_value is not None:
        groups[scan.ratio_name] = ratio_value
    sigma = scan.sigma
    if scan.mass is not None:
        sigma = GaussianAtom.from_oscillator(scan.mass, scan.omega_a).sigma
    return CylinderGeometry.from_ratios(sigma, groups['R_over_sigma'], groups['L_over_R']), sigma


def _atom(scan, geom, sigma):
    omega_a = scan.resonance.omega(geom) if scan.resonance is not None else scan.omega_a
    return GaussianAtom(sigma=sigma, omega_a=omega_a)


def _subfield_ratios_point(task):
    scan, ratio_value = task
    geom, sigma = _geometry(scan, ratio_value)
    atom = _atom(scan, geom, sigma)
    T = scan.T if scan.T is not None else scan.omega_a_T[0] / atom.omega_a
    sw = Switching(scan.switching_kinds[0], T, scan.convention)
    kind = scan.transition_kinds[0]
    logs = []
    for m1 in scan.m1_values:
        try:
            logs.append(subfield_log_probability(geom, atom, sw, kind, m1, scan.summation).log_probability)
        except NUMERIC_ERRORS as e:
            raise _point_failure('{} = {:.6g}, m1 = {}'.format(scan.ratio_name, ratio_value, m1), e)
    return logs


def _subfield_ratios(scan):
    all_logs = _map(_subfield_ratios_point, [(scan, v) for v in scan.ratio_values], scan.workers)
    rows, argmax = [], {}
    for ratio_value, logs in zip(scan.ratio_values, all_logs):
        logs = np.asarray(logs)
        i_max = int(np.argmax(logs))
        argmax[ratio_value] = scan.m1_values[i_max]
        for i, m1 in enumerate(scan.m1_values):
            rows.append([m1, ratio_value,
                         math.exp(logs[i]),
                         math.exp(logs[i] - logs[i_max]),
                         scan.resonance is not None and m1 == scan.resonance.m1res,
                         i == i_max])
        logger.report('argmax_m1 at {} = {:.6g}: {}'.format(scan.ratio_name, ratio_value, argmax[ratio_value]))
    columns = ['m1', scan.ratio_name, 'c_abs2', 'c_abs2_normalized', 'is_resonant', 'is_argmax']
    summary = reporters.summarize('c_abs2', [row[2] for row in rows],
                                  labels=['m1={} {}={:.6g}'.format(r[0], scan.ratio_name, r[1]) for r in rows])
    summary['argmax_m1'] = argmax
    return columns, rows, summary


def _truncation_point(task):
    scan, switching, kind, omega_a_T = task
    geom, sigma = _geometry(scan)
    atom = _atom(scan, geom, sigma)
    sw = Switching(switching, omega_a_T / atom.omega_a, scan.convention)
    try:
        result = transition_set(geom, atom, sw, kind, scan.subfields, control=scan.summation,
                                tolerance=scan.tolerance, max_subfields=scan.max_subfields)
    except NUMERIC_ERRORS as e:
        raise _point_failure('omega_a_T = {:.6g}, {}, {}'.format(omega_a_T, kind.name, switching.name), e)
    return result.delta_N


def _truncation_error(scan):
    tasks = [(scan, switching, kind, tau)
             for switching in scan.switching_kinds
             for kind in scan.transition_kinds
             for tau in scan.omega_a_T]
    deltas = _map(_truncation_point, tasks, scan.workers)
    rows = [[tau, len(scan.subfields), delta, kind, switching.name]
            for (_, switching, kind, tau), delta in zip(tasks, deltas)]
    summary = reporters.summarize('delta_N', deltas,
                                  labels=['omega_a_T={:.6g} {} {}'.format(t[3], t[2].name, t[1].name) for t in tasks])
    return COLUMNS[ScanKind.TruncationError], rows, summary


def _gamma_point(task):
    N = task
    return gamma_closed(N), gamma_sum(N)


def _gamma_contour(scan):
    tasks = [(n1, n2) for n1 in scan.N1_values for n2 in scan.N2_values]
    values = _map(_gamma_point, tasks, scan.workers)
    rows = [[n1, n2, closed, direct] for (n1, n2), (closed, direct) in zip(tasks, values)]
    summary = reporters.summarize('gamma_closed', [v[0] for v in values], labels=['N={}'.format(t) for t in tasks])
    summary['max_abs_difference'] = float(max(abs(a - b) for a, b in values))
    return COLUMNS[ScanKind.GammaContour], rows, summary


def _laser_zeta_point(task):
    scan, omega_a_T, ratio = task
    sigma = scan.sigma if scan.mass is None else GaussianAtom.from_oscillator(scan.mass, scan.omega_a).sigma
    atom = GaussianAtom(sigma=sigma, omega_a=scan.omega_a)
    beam = HermiteBeam(w0=scan.beam["w0"], k=ratio * scan.omega_a / constants.c, alpha_sq=scan.beam['alpha_sq'],
                       pol=scan.beam['pol'])
    sw = Switching(scan.switching_kinds[0], omega_a_T / scan.omega_a, scan.convention)
    try:
        z = zeta(atom, beam, sw, scan.transition_kinds[0], scan.modes)
    except NUMERIC_ERRORS as e:
        raise _point_failure('omega_a_T = {:.6g}, omega/omega_a = {:.6g}'.format(omega_a_T, ratio), e)
    return z.value, z.bound, z.holds


def _laser_zeta(scan):
    tasks = [(scan, tau, ratio) for tau in scan.omega_a_T for ratio in scan.omega_ratios]
    values = _map(_laser_zeta_point, tasks, scan.workers)
    rows = [[tau, ratio, value, bound, holds] for (_, tau, ratio), (value, bound, holds) in zip(tasks, values)]
    summary = reporters.summarize('zeta', [v[0] for v in values],
                                  labels=['omega_a_T={:.6g} omega/omega_a={:.6g}'.format(t[1], t[2]) for t in tasks])
    summary['violations'] = int(sum(not v[2] for v in values))
    if summary['violations']:
        logger.warning('zeta exceeds gamma_N / (4 |alpha|^2) at {} of {} points'.format(summary['violations'],
                                                                                       len(values)))
    return COLUMNS[ScanKind.LaserZeta], rows, summary


_SCANS = {
    ScanKind.SubfieldRatios: _subfield_ratios,
    ScanKind.TruncationError: _truncation_error,
    ScanKind.GammaContour: _gamma_contour,
    ScanKind.LaserZeta: _laser_zeta,
}


def run_scan(scan):
    """
    Run a parameter scan and write ``<outfname>.csv`` (and ``<outfname>.svg`` when `scan.plot` is set).

    Parameters
    ----------
    scan : ScanConfig

    Returns
    -------
    result : ScanResult

    Raises
    ------
    ScanPointError
        A quadrature or summation failed; the message names the parameter point.
    """
    logger.info('Running {} scan -> {}.csv'.format(scan.scan_kind.name, scan.outfname))
    columns, rows, summary = _SCANS[scan.scan_kind](scan)
    csv_path = scan.outfname + '.csv'
    with reporters.CSVReporter(csv_path, columns) as csv:
        for row in rows:
            csv.report(row)
    reporters.report_summary(summary, logger)
    result = ScanResult(scan_kind=scan.scan_kind, columns=columns, rows=rows, summary=summary, csv_path=csv_path)
    if scan.plot:
        result.plot_path = plot_scan(result, scan.outfname + '.svg')
    return result


def plot_scan(result, path):
    """Render a scan result to an SVG file with the Agg backend."""
    import matplotlib
    matplotlib.use('Agg')
    import matplotlib.pyplot as plt
    matplotlib.rcParams['svg.hashsalt'] = 'subfield-qed'

    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    kind = result.scan_kind
    if kind is ScanKind.SubfieldRatios:
        ratio = result.columns[1]
        for value in sorted(set(result.column(ratio))):
            sel = [row for row in result.rows if row[1] == value]
            ax.plot([row[0] for row in sel], [row[3] for row in sel], marker='.', label='{} = {:.3g}'.format(
                ratio, value))
        ax.set_xlabel('m1')
        ax.set_ylabel('|c|^2 / max |c|^2')
    elif kind is ScanKind.TruncationError:
        for label in sorted(set((row[3].name, row[4]) for row in result.rows)):
            sel = [row for row in result.rows if (row[3].name, row[4]) == label]
            ax.semilogy([row[0] for row in sel], [max(row[2], 1e-300) for row in sel], marker='.',
                        label='{} {}'.format(*label))
        ax.set_xlabel('Omega_A T')
        ax.set_ylabel('delta_N')
    elif kind is ScanKind.GammaContour:
        n1 = sorted(set(result.column('N1')))
        n2 = sorted(set(result.column('N2')))
        grid = np.array(result.column('gamma_closed')).reshape(len(n1), len(n2))
        mesh = ax.pcolormesh(n2, n1, grid, shading='nearest')
        fig.colorbar(mesh, ax=ax, label='gamma_N')
        ax.set_xlabel('N2')
        ax.set_ylabel('N1')
    else:
        taus = list(dict.fromkeys(result.column('omega_a_T')))
        ratios = list(dict.fromkeys(result.column('omega_over_omega_a')))
        with np.errstate(divide='ignore'):
            grid = np.log10(np.array(result.column('zeta')) / np.array(result.column('bound')))
        if len(taus) > 1 and len(ratios) > 1:
            mesh = ax.pcolormesh(ratios, taus, grid.reshape(len(taus), len(ratios)), shading='nearest')
            fig.colorbar(mesh, ax=ax, label='log10(zeta / bound)')
            ax.set_xlabel('omega / Omega_A')
            ax.set_ylabel('Omega_A T')
        else:
            x = taus if len(taus) > 1 else ratios
            ax.plot(x, grid, marker='.')
            ax.axhline(0.0, color='k', lw=0.5)
            ax.set_xlabel('Omega_A T' if len(taus) > 1 else 'omega / Omega_A')
            ax.set_ylabel('log10(zeta / bound)')
    if kind in (ScanKind.SubfieldRatios, ScanKind.TruncationError):
        ax.legend(fontsize='small')
    fig.tight_layout()
    fig.savefig(path, format='svg', metadata={'Date': None})
    plt.close(fig)
    logger.info('Plot written to {}'.format(path))
    return path
