"""
Parses the scan configuration: a JSON (or YAML) document naming the scan
kind, the dimensionless groups of the geometry, the atom, the switching,
the grids and where the output goes.

Authors: subfield-qed developers
"""

import json
import logging
import os

import numpy as np
import yaml
from openmm import unit
from scipy import constants

from subfield_qed import reporters, utils
from subfield_qed.cavity import InvalidModeError
from subfield_qed.interaction import (Resonance, SubfieldSet, SummationControl, SwitchingKind, TransitionKind,
                                      WindowConvention, _as_enum)
from subfield_qed.laser import BeamPolarization
from subfield_qed.scans import ScanConfig, ScanKind

logger = logging.getLogger(__name__)

#: Bohr radius, the default atom size.
BOHR_RADIUS = 0.0529177210903 * unit.nanometer

_DEFAULT_UNITS = {
    ('atom', 'sigma'): unit.nanometer,
    ('atom', 'omega_a'): unit.second**-1,
    ('atom', 'mass'): unit.dalton,
    ('switching', 'T'): unit.second,
    ('beam', 'w0'): unit.micrometer,
    ('beam', 'k'): unit.micrometer**-1,
}

_COMMON_KEYS = {'scan_kind', 'output', 'logger', 'workers'}

_KIND_KEYS = {
    ScanKind.SubfieldRatios: {'geometry', 'atom', 'resonance', 'switching', 'transition', 'grid', 'summation'},
    ScanKind.TruncationError: {'geometry', 'atom', 'resonance', 'switching', 'transition', 'subfields', 'grid',
                               'summation', 'tolerance', 'max_subfields'},
    ScanKind.GammaContour: {'grid'},
    ScanKind.LaserZeta: {'atom', 'beam', 'switching', 'transition', 'modes', 'grid'},
}

_SECTION_KEYS = {
    'output': {'outfname', 'directory', 'plot'},
    'logger': {'level', 'stream', 'filename'},
    'geometry': {'L_over_R', 'R_over_sigma'},
    'atom': {'sigma', 'mass', 'omega_a'},
    'resonance': {'m1res', 'lres'},
    'switching': {'kind', 'convention', 'omega_a_T', 'T'},
    'summation': {'tail_tolerance', 'max_terms', 'chunk', 'on_budget'},
    'beam': {'w0', 'k', 'alpha_sq', 'pol'},
}

_GRID_KEYS = {
    ScanKind.SubfieldRatios: {'ratio', 'values', 'start', 'stop', 'num', 'spacing', 'm1'},
    ScanKind.TruncationError: {'omega_a_T'},
    ScanKind.GammaContour: {'N1', 'N2'},
    ScanKind.LaserZeta: {'omega_a_T', 'omega_over_omega_a'},
}


class ConfigError(ValueError):
    """Invalid configuration; `key` names the offending entry."""

    def __init__(self, key, message):
        super().__init__("{}: {}".format(key, message))
        self.key = key


class Settings(object):
    """
    Function that will parse the configuration file for a parameter scan.

    Parameters
    ----------
    config : str or dict
        Path to a JSON/YAML file, a JSON/YAML document or an already parsed dict.
    overrides : dict, optional
        Nested entries applied on top of the file, e.g. from command-line flags.
    """

    def __init__(self, config, overrides=None):
        source = config if isinstance(config, str) and os.path.isfile(config) else None
        config = Settings.load_yaml(config)
        if not isinstance(config, dict):
            raise ConfigError('<root>', 'the configuration must be a mapping, got {}'.format(type(config).__name__))
        for section, entries in (overrides or {}).items():
            if isinstance(entries, dict):
                config.setdefault(section, {})
                if not isinstance(config[section], dict):
                    raise ConfigError(section, 'expected a mapping')
                config[section].update(entries)
            else:
                config[section] = entries
        if source is not None:
            config.setdefault('output', {}).setdefault('outfname', os.path.splitext(os.path.basename(source))[0])
        self.config = Settings.set_Parameters(config)

    @staticmethod
    def load_yaml(yaml_config):
        """
        Reads the configuration file and returns a dict. Documents starting
        with ``{`` are parsed as JSON, anything else as YAML.
        Parse errors are raised as `ConfigError` with the line and column.
        """
        if isinstance(yaml_config, dict):
            return dict(yaml_config)
        try:
            if os.path.isfile(yaml_config):
                with open(yaml_config, 'r') as stream:
                    text = stream.read()
            else:
                text = yaml_config
            # YAML 1.1 reads 1e20 as a string
            if text.lstrip().startswith('{'):
                config = json.loads(text)
            else:
                config = yaml.safe_load(text)
        except IOError as e:
            raise ConfigError(yaml_config, 'unable to open file ({})'.format(e))
        except json.JSONDecodeError as e:
            raise ConfigError(yaml_config if len(str(yaml_config)) < 200 else '<document>',
                              'parsing error on line {} column {}'.format(e.lineno, e.colno))
        except yaml.YAMLError as e:
            message = 'parsing error'
            if hasattr(e, 'problem_mark'):
                mark = e.problem_mark
                message += ' on line {} column {}'.format(mark.line + 1, mark.column + 1)
            raise ConfigError(yaml_config if len(str(yaml_config)) < 200 else '<document>', message)
        return config

    @staticmethod
    def check_Keys(config):
        """Rejects unknown keys at the top level and inside every known section."""
        if 'scan_kind' not in config:
            raise ConfigError('scan_kind', 'missing; one of {}'.format([k.name for k in ScanKind]))
        try:
            kind = ScanKind[config['scan_kind']]
        except (KeyError, TypeError):
            raise ConfigError('scan_kind', 'unknown scan kind {!r}; valid options: {}'.format(
                config['scan_kind'], [k.name for k in ScanKind]))
        allowed = _COMMON_KEYS | _KIND_KEYS[kind]
        for key in config:
            if key not in allowed:
                raise ConfigError(key, 'unknown key for scan kind {}'.format(kind.name))
        for section, keys in _SECTION_KEYS.items():
            if section in config:
                if not isinstance(config[section], dict):
                    raise ConfigError(section, 'expected a mapping')
                for key in config[section]:
                    if key not in keys:
                        raise ConfigError('{}.{}'.format(section, key), 'unknown key')
        if 'grid' in config:
            if not isinstance(config['grid'], dict):
                raise ConfigError('grid', 'expected a mapping')
            for key in config['grid']:
                if key not in _GRID_KEYS[kind]:
                    raise ConfigError('grid.{}'.format(key), 'unknown key for scan kind {}'.format(kind.name))
        return config

    @staticmethod
    def set_Output(config):
        """
        Parses/updates the config (dict) with the path prefix for the output files.
        """
        output = config.setdefault('output', {})
        directory = output.get('directory', '.')
        os.makedirs(directory, exist_ok=True)
        outfname = output.get('outfname', config['scan_kind'].lower())
        config['outfname'] = os.path.join(directory, outfname)
        output.setdefault('plot', False)
        return config

    @staticmethod
    def set_Logger(config):
        """
        Initializes the package logger and parses/updates the config (dict)
        with the level, the stream flag and the file path of the .log file.
        """
        settings = config.setdefault('logger', {})
        level = str(settings.get('level', 'INFO')).upper()
        stream = bool(settings.get('stream', True))
        outfname = settings.get('filename', config['outfname'])
        reporters.addLoggingLevel('REPORT', logging.WARNING - 5)
        if not isinstance(logging.getLevelName(level), int):
            raise ConfigError('logger.level', "'{}' is not a logging level".format(level))
        config['Logger'] = reporters.init_logger(logging.getLogger('subfield_qed'), level, stream, outfname)
        return config

    @staticmethod
    def set_Units(config):
        """
        Parses/updates the config (dict) values with parameters that should have
        units on them. If no unit is provided, the default units are assumed.

            sigma: nanometer
            omega_a: 1/second
            mass: dalton
            T: second
            w0: micrometer
            k: 1/micrometer
        """
        for (section, param), default in _DEFAULT_UNITS.items():
            if section not in config or param not in config[section]:
                continue
            user_input = config[section][param]
            key = '{}.{}'.format(section, param)
            if unit.is_quantity(user_input):
                quantity = user_input
            elif isinstance(user_input, str):
                try:
                    quantity = utils.parse_unit_quantity(user_input)
                except ValueError as e:
                    raise ConfigError(key, str(e))
            elif isinstance(user_input, (int, float)) and not isinstance(user_input, bool):
                logger.warning("Units for '{} = {}' not specified. Setting units to '{}'".format(
                    param, user_input, default))
                quantity = user_input * default
            else:
                raise ConfigError(key, 'expected a number or a quantity string, got {!r}'.format(user_input))
            if not quantity.unit.is_compatible(default):
                raise ConfigError(key, "unit '{}' is not compatible with '{}'".format(quantity.unit, default))
            config[section][param] = quantity
        return config

    @staticmethod
    def set_Scan(config):
        """
        Validates the scan parameters and stores the resolved `ScanConfig` (SI floats) under 'ScanConfig'.
        """
        kind = ScanKind[config['scan_kind']]
        workers = _positive_int(config.get('workers', 1), 'workers')
        common = dict(scan_kind=kind,
                      outfname=config['outfname'],
                      plot=bool(config['output'].get('plot', False)),
                      workers=workers)
        grid = config.get('grid', {})
        try:
            if kind is ScanKind.GammaContour:
                scan = ScanConfig(N1_values=_int_range(grid, 'N1', lower=0),
                                  N2_values=_int_range(grid, 'N2', lower=0),
                                  **common)
            elif kind is ScanKind.LaserZeta:
                scan = ScanConfig(**common, **_laser_parameters(config, grid))
            else:
                scan = ScanConfig(**common, **_cavity_parameters(config, grid, kind))
        except InvalidModeError as e:
            raise ConfigError('resonance', str(e))
        config['ScanConfig'] = scan
        return config

    @staticmethod
    def set_Parameters(config):
        """
        MAIN execution function for updating/correcting (placing units) in the config
        """
        try:
            config = Settings.check_Keys(config)
            config = Settings.set_Output(config)
            config = Settings.set_Logger(config)
            config = Settings.set_Units(config)
            config = Settings.set_Scan(config)
        except ConfigError as e:
            logger.error('Configuration error: {}'.format(e))
            raise
        except Exception as e:
            logger.exception(e)
            raise
        logger.debug('Resolved configuration:\n{}'.format(json.dumps(config, sort_keys=True, indent=2,
                                                                      default=str)))
        return config

    def asDict(self):
        return self.config

    def asOrderedDict(self):
        from collections import OrderedDict
        return OrderedDict(sorted(self.config.items(), key=lambda t: t[0]))

    def asYAML(self):
        return yaml.dump(json.loads(self.asJSON()))

    def asJSON(self, pprint=False):
        if pprint:
            return json.dumps(self.config, sort_keys=True, indent=2, skipkeys=True, default=str)
        return json.dumps(self.config, default=str)


def _positive_int(value, key, lower=1):
    if isinstance(value, bool) or not isinstance(value, int) or value < lower:
        raise ConfigError(key, 'expected an integer >= {}, got {!r}'.format(lower, value))
    return value


def _number(value, key, positive=True):
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not np.isfinite(value):
        raise ConfigError(key, 'expected a number, got {!r}'.format(value))
    if positive and not value > 0:
        raise ConfigError(key, 'must be positive, got {!r}'.format(value))
    return float(value)


def _float_grid(grid, key):
    """Explicit ``values`` or a ``start/stop/num`` range with linear or log spacing."""
    if not isinstance(grid, dict):
        raise ConfigError(key, 'expected a grid mapping')
    if 'values' in grid:
        if set(grid) - {'values'}:
            raise ConfigError(key, "'values' cannot be combined with a range")
        values = grid['values']
        if not isinstance(values, list) or not values:
            raise ConfigError(key + '.values', 'must be a nonempty list')
        return tuple(_number(v, key + '.values') for v in values)
    for name in grid:
        if name not in ('start', 'stop', 'num', 'spacing'):
            raise ConfigError('{}.{}'.format(key, name), 'unknown key')
    for name in ('start', 'stop', 'num'):
        if name not in grid:
            raise ConfigError('{}.{}'.format(key, name), 'missing')
    start = _number(grid['start'], key + '.start')
    stop = _number(grid['stop'], key + '.stop')
    num = _positive_int(grid['num'], key + '.num', lower=2)
    if start == stop:
        raise ConfigError(key, 'empty range [{}, {}]'.format(start, stop))
    spacing = grid.get('spacing', 'linear')
    if spacing == 'linear':
        values = np.linspace(start, stop, num)
    elif spacing == 'log':
        values = np.geomspace(start, stop, num)
    else:
        raise ConfigError(key + '.spacing', "expected 'linear' or 'log', got {!r}".format(spacing))
    return tuple(float(v) for v in values)


def _int_range(grid, key, lower):
    if key not in grid:
        raise ConfigError('grid.' + key, 'missing')
    bounds = grid[key]
    if not isinstance(bounds, dict) or set(bounds) != {'start', 'stop'}:
        raise ConfigError('grid.' + key, 'expected {start, stop}')
    start = _positive_int(bounds['start'], 'grid.{}.start'.format(key), lower=lower)
    stop = _positive_int(bounds['stop'], 'grid.{}.stop'.format(key), lower=lower)
    if stop < start:
        raise ConfigError('grid.' + key, 'empty range [{}, {}]'.format(start, stop))
    return tuple(range(start, stop + 1))


def _enum_list(cls, value, key, single=False):
    values = value if isinstance(value, list) else [value]
    if not values or (single and len(values) != 1):
        raise ConfigError(key, 'expected {}'.format('a single value' if single else 'a nonempty list'))
    try:
        return tuple(_as_enum(cls, v) for v in values)
    except (KeyError, ValueError):
        raise ConfigError(key, 'invalid value {!r}; valid options: {}'.format(value, [m.name for m in cls]))


def _atom_parameters(config, need_omega):
    atom = config.get('atom', {})
    if 'sigma' in atom and 'mass' in atom:
        raise ConfigError('atom', "give either 'sigma' or 'mass', not both")
    omega_a = utils.to_si(atom['omega_a']) if 'omega_a' in atom else None
    if need_omega and omega_a is None:
        raise ConfigError('atom.omega_a', 'missing')
    if omega_a is not None and not omega_a > 0:
        raise ConfigError('atom.omega_a', 'must be positive')
    mass = utils.to_si(atom['mass']) if 'mass' in atom else None
    if mass is not None and not mass > 0:
        raise ConfigError('atom.mass', 'must be positive')
    sigma = utils.to_si(atom.get('sigma', BOHR_RADIUS))
    if not sigma > 0:
        raise ConfigError('atom.sigma', 'must be positive')
    return dict(sigma=sigma, mass=mass, omega_a=omega_a)


def _switching_parameters(config, single):
    switching = config.get('switching', {})
    return dict(switching_kinds=_enum_list(SwitchingKind, switching.get('kind', 'Gaussian'), 'switching.kind',
                                           single),
                convention=_enum_list(WindowConvention, switching.get('convention', 'EXACT'),
                                      'switching.convention', True)[0],
                transition_kinds=_enum_list(TransitionKind, config.get('transition', 'Emission'), 'transition',
                                            single))


def _summation(config):
    try:
        return SummationControl(**config.get('summation', {}))
    except (TypeError, ValueError) as e:
        raise ConfigError('summation', str(e))


def _cavity_parameters(config, grid, kind):
    geometry = config.get('geometry', {})
    params = _atom_parameters(config, need_omega=False)
    resonance = None
    if 'resonance' in config:
        res = config['resonance']
        resonance = Resonance(_positive_int(res.get('m1res'), 'resonance.m1res'),
                              _positive_int(res.get('lres', 0), 'resonance.lres', lower=0))
    if resonance is None and params['omega_a'] is None:
        raise ConfigError('atom.omega_a', "missing; give 'atom.omega_a' or a 'resonance'")
    if resonance is not None and params['omega_a'] is not None:
        raise ConfigError('resonance', "give either 'resonance' or 'atom.omega_a', not both")
    if params['mass'] is not None and params['omega_a'] is None:
        raise ConfigError('atom.mass', "an oscillator mass needs an explicit 'atom.omega_a'")
    params.update(resonance=resonance, summation=_summation(config))
    params.update(_switching_parameters(config, single=kind is ScanKind.SubfieldRatios))
    switching = config.get('switching', {})

    if kind is ScanKind.SubfieldRatios:
        ratio = grid.get('ratio')
        if ratio not in ('L_over_R', 'R_over_sigma'):
            raise ConfigError('grid.ratio', "expected 'L_over_R' or 'R_over_sigma', got {!r}".format(ratio))
        fixed = 'R_over_sigma' if ratio == 'L_over_R' else 'L_over_R'
        if fixed not in geometry:
            raise ConfigError('geometry.' + fixed, 'missing')
        if ratio in geometry:
            raise ConfigError('geometry.' + ratio, 'is scanned by grid.ratio and cannot be fixed')
        range_spec = {k: v for k, v in grid.items() if k not in ('ratio', 'm1')}
        if ('T' in switching) == ('omega_a_T' in switching):
            raise ConfigError('switching', "give exactly one of 'omega_a_T' or 'T'")
        m1 = grid.get('m1', {'start': 1, 'stop': 40})
        params.update(ratio_name=ratio,
                      ratio_values=_float_grid(range_spec, 'grid'),
                      geometry={fixed: _number(geometry[fixed], 'geometry.' + fixed)},
                      m1_values=_int_range({'m1': m1}, 'm1', lower=1),
                      T=utils.to_si(switching['T']) if 'T' in switching else None,
                      omega_a_T=((_number(switching['omega_a_T'], 'switching.omega_a_T'),)
                                 if 'omega_a_T' in switching else ()))
        return params

    for name in ('L_over_R', 'R_over_sigma'):
        if name not in geometry:
            raise ConfigError('geometry.' + name, 'missing')
    if 'omega_a_T' not in grid:
        raise ConfigError('grid.omega_a_T', 'missing')
    if 'T' in switching or 'omega_a_T' in switching:
        raise ConfigError('switching', 'the switching time is scanned by grid.omega_a_T')
    subfields = config.get('subfields', 'resonant')
    if subfields == 'resonant':
        if resonance is None:
            raise ConfigError('subfields', "'resonant' needs a 'resonance' section")
        subfields = [resonance.m1res]
    try:
        subfield_set = SubfieldSet(tuple(subfields))
    except (TypeError, ValueError) as e:
        raise ConfigError('subfields', str(e))
    params.update(geometry={name: _number(geometry[name], 'geometry.' + name)
                            for name in ('L_over_R', 'R_over_sigma')},
                  omega_a_T=_float_grid(grid['omega_a_T'], 'grid.omega_a_T'),
                  subfields=subfield_set,
                  tolerance=_number(config.get('tolerance', 1e-4), 'tolerance'),
                  max_subfields=_positive_int(config.get('max_subfields', 4096), 'max_subfields'))
    return params


def _laser_parameters(config, grid):
    params = _atom_parameters(config, need_omega=True)
    params.update(_switching_parameters(config, single=True))
    beam = config.get('beam', {})
    if 'w0' not in beam:
        raise ConfigError('beam.w0', 'missing')
    if 'alpha_sq' not in beam:
        raise ConfigError('beam.alpha_sq', 'missing')
    if 'omega_a_T' not in grid:
        raise ConfigError('grid.omega_a_T', 'missing')
    if ('k' in beam) == ('omega_over_omega_a' in grid):
        raise ConfigError('grid.omega_over_omega_a', "give exactly one of 'beam.k' or 'grid.omega_over_omega_a'")
    modes = config.get('modes', [8, 8])
    if not isinstance(modes, list) or len(modes) != 2:
        raise ConfigError('modes', 'expected [N1, N2]')
    if 'k' in beam:
        omega_ratios = (utils.to_si(beam["k"]) * constants.c / params['omega_a'],)
    else:
        omega_ratios = _float_grid(grid['omega_over_omega_a'], 'grid.omega_over_omega_a')
    try:
        pol = BeamPolarization[beam.get('pol', 'EpsX')]
    except KeyError:
        raise ConfigError('beam.pol', 'expected EpsX or EpsY')
    params.update(beam={'w0': utils.to_si(beam['w0']),
                        'alpha_sq': _number(beam['alpha_sq'], 'beam.alpha_sq'),
                        'pol': pol},
                  modes=(_positive_int(modes[0], 'modes[0]', lower=0), _positive_int(modes[1], 'modes[1]', lower=0)),
                  omega_a_T=_float_grid(grid['omega_a_T'], 'grid.omega_a_T'),
                  omega_ratios=omega_ratios)
    return params
