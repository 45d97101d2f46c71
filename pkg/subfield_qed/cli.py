"""
Command-line front end ``subfield-qed``.

    subfield-qed scan <config.json> [--plot] [--out DIR]
    subfield-qed self-test [--full]
    subfield-qed modes --geometry R,L --index m1,m2,l,pol --grid N

Exit status is 0 on success, 1 on a numerical failure or a failed
self-test and 2 on a configuration error.

Authors: subfield-qed developers
"""

import argparse
import logging
import os
import sys

import numpy as np

from subfield_qed import __version__, cavity, formats, reporters
from subfield_qed.cavity import CylinderGeometry, InvalidModeError, ModeIndex
from subfield_qed.scans import NUMERIC_ERRORS, ScanPointError, run_scan
from subfield_qed.selftest import SelfTestLevel, self_test
from subfield_qed.settings import ConfigError, Settings

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NUMERIC = 1
EXIT_CONFIG = 2

MODE_COLUMNS = ['x', 'y', 'z', 'r', 'phi'] + [
    '{}{}_{}'.format(f, c, part) for f in 'uv' for c in 'xyz' for part in ('re', 'im')
]


def _log_prefix(path):
    if path is None:
        return None
    root, ext = os.path.splitext(path)
    return root if ext == '.log' else path


def _pair(text, name):
    try:
        a, b = [float(s) for s in text.split(',')]
    except ValueError:
        raise ConfigError(name, "expected two comma separated numbers, got '{}'".format(text))
    return a, b


def build_parser():
    parser = argparse.ArgumentParser(prog='subfield-qed',
                                     description='Subfield truncation of cavity QED: scans, checks and mode dumps.')
    parser.add_argument('--version', action='version', version='%(prog)s {}'.format(__version__))
    parser.add_argument('--log-level', default=None, dest='log_level',
                        help='DEBUG, INFO, REPORT, WARNING or ERROR (default: INFO).')
    parser.add_argument('--log-file', default=None, dest='log_file', help='Also write the log to this file.')
    commands = parser.add_subparsers(dest='command', metavar='COMMAND')
    commands.required = True

    scan = commands.add_parser('scan', help='Run a JSON-configured parameter scan and write CSV.')
    scan.add_argument('config', help='Path to the JSON (or YAML) scan configuration.')
    scan.add_argument('--plot', action='store_true', help='Also render <outfname>.svg.')
    scan.add_argument('--out', default=None, help='Output directory (overrides output.directory).')
    scan.set_defaults(handler=_scan)

    check = commands.add_parser('self-test', help='Run the invariant and oracle battery.')
    check.add_argument('--full', action='store_true', help='Run the complete battery including scan regressions.')
    check.set_defaults(handler=_self_test)

    modes = commands.add_parser('modes', help='Dump one 3D cavity mode on an N x N grid at z = L/2 as CSV.')
    modes.add_argument('--geometry', required=True, help='Cavity radius and length in metres: R,L')
    modes.add_argument('--index', required=True, help='Mode label m1,m2,l,pol with pol Mu1 or Mu2.')
    modes.add_argument('--grid', required=True, type=int, help='Points per side of the square grid (>= 2).')
    modes.add_argument('--output', default='-', help="CSV path, '-' for stdout (default).")
    modes.set_defaults(handler=_modes)
    return parser


def _init_logging(args, stream=True):
    reporters.init_logger(logging.getLogger('subfield_qed'), args.log_level or 'INFO', stream,
                          _log_prefix(args.log_file))


def _scan(args):
    overrides = {'output': {}, 'logger': {}}
    if args.out is not None:
        overrides['output']['directory'] = args.out
    if args.plot:
        overrides['output']['plot'] = True
    if args.log_level is not None:
        overrides['logger']['level'] = args.log_level
    if args.log_file is not None:
        overrides['logger']['filename'] = _log_prefix(args.log_file)
    cfg = Settings(args.config, overrides=overrides).asDict()
    result = run_scan(cfg['ScanConfig'])
    logger.info('Wrote {} rows to {}'.format(len(result.rows), result.csv_path))
    return EXIT_OK


def _self_test(args):
    _init_logging(args)
    report = self_test(SelfTestLevel.Full if args.full else SelfTestLevel.Quick)
    return EXIT_OK if report.passed else EXIT_NUMERIC


def mode_grid(geom, idx, n):
    """
    Rows of the electric and magnetic mode in Cartesian components on an
    ``n x n`` grid spanning the disk in the plane ``z = L/2``.

    Grid points outside the disk are skipped.
    """
    if n < 2:
        raise ConfigError('grid', 'expected at least 2 points per side, got {}'.format(n))
    axis = np.linspace(-geom.R, geom.R, n)
    z = 0.5 * geom.L
    rows = []
    for y in axis:
        for x in axis:
            r, phi = float(np.hypot(x, y)), float(np.arctan2(y, x))
            if r > geom.R:
                continue
            mode = cavity.em_mode_3d(geom, idx, (r, phi, z))
            values = []
            for vector in (mode.u, mode.v):
                for component in cavity.cylindrical_to_cartesian(vector, phi):
                    values.extend([float(component.real), float(component.imag)])
            rows.append([float(x), float(y), z, r, phi] + values)
    return rows


def _modes(args):
    # stdout carries the CSV
    _init_logging(args, stream=args.output != '-')
    R, L = _pair(args.geometry, 'geometry')
    try:
        geom = CylinderGeometry(R, L)
    except ValueError as e:
        raise ConfigError('geometry', str(e))
    try:
        idx = ModeIndex.parse(args.index)
    except InvalidModeError as e:
        raise ConfigError('index', str(e))
    rows = mode_grid(geom, idx, args.grid)
    if args.output == '-':
        sys.stdout.write(','.join(MODE_COLUMNS) + '\n')
        for row in rows:
            sys.stdout.write(formats.format_row(row) + '\n')
    else:
        with reporters.CSVReporter(args.output, MODE_COLUMNS) as csv:
            for row in rows:
                csv.report(row)
    logger.info('Mode {} at {} grid points'.format(idx, len(rows)))
    return EXIT_OK


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except ConfigError as e:
        logger.error('Configuration error: {}'.format(e))
        return EXIT_CONFIG
    except ScanPointError as e:
        logger.error('Numerical failure: {}'.format(e))
        return EXIT_NUMERIC
    except NUMERIC_ERRORS as e:
        logger.error('Numerical failure: {}: {}'.format(type(e).__name__, e))
        return EXIT_NUMERIC


if __name__ == '__main__':
    sys.exit(main())
