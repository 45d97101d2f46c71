"""
Provides utility functions for unit handling and packaged data files.

Authors: subfield-qed developers
"""

import logging
import os
import re
from importlib import resources

from openmm import unit
from scipy import constants

logger = logging.getLogger(__name__)

_QUANTITY = re.compile(r'^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([*/])\s*(.+?)\s*$')
_UNIT_TOKEN = re.compile(r'\s*([*/])?\s*([A-Za-z_]\w*)(?:\s*\*\*\s*([-+]?\d+))?\s*')


def _unit_expression(text):
    result = None
    pos = 0
    first = True
    while pos < len(text):
        match = _UNIT_TOKEN.match(text, pos)
        if match is None or match.end() == pos or (match.group(1) is None) != first:
            raise ValueError('cannot parse unit expression {!r}'.format(text))
        op, name, power = match.groups()
        if not hasattr(unit, name) or not isinstance(getattr(unit, name), unit.Unit):
            raise ValueError('unknown unit {!r} in {!r}'.format(name, text))
        factor = getattr(unit, name)**(int(power) if power else 1)
        if result is None:
            result = factor
        elif op == '*':
            result = result * factor
        else:
            result = result / factor
        pos = match.end()
        first = False
    if result is None:
        raise ValueError('empty unit expression')
    return result


def parse_unit_quantity(unit_quantity_str):
    """
    Utility for parsing parameters from the configuration file that require units.

    Parameters
    ----------
    unit_quantity_str : str
        A string specifying a quantity and its units, i.e. ``'0.0529177 * nanometers'``
        or ``'6e12 / second'``.

    Returns
    -------
    unit_quantity : openmm.unit.Quantity

    Examples
    --------
    >>> parse_unit_quantity('6e12 / second').value_in_unit(unit.second**-1)
    6000000000000.0
    >>> round(parse_unit_quantity('2.5 * micrometer').value_in_unit(unit.nanometer), 9)
    2500.0
    """
    match = _QUANTITY.match(str(unit_quantity_str))
    if match is None:
        raise ValueError('cannot parse quantity {!r}'.format(unit_quantity_str))
    value, op, expression = match.groups()
    u = _unit_expression(expression)
    if op == '/':
        return unit.Quantity(float(value), u**-1)
    return unit.Quantity(float(value), u)


#: SI target of each physical dimension used by the configuration.
_SI_UNITS = (unit.meter, unit.second, unit.second**-1, unit.meter**-1)


def to_si(quantity):
    """
    Plain float of a quantity in SI base units (m, s, 1/s, 1/m, kg).
    """
    if not unit.is_quantity(quantity):
        return float(quantity)
    if quantity.unit.is_compatible(unit.dalton):
        return quantity.value_in_unit(unit.dalton) * constants.atomic_mass
    for target in _SI_UNITS:
        if quantity.unit.is_compatible(target):
            return float(quantity.value_in_unit(target))
    raise ValueError('no SI conversion for unit {}'.format(quantity.unit))


def get_data_filename(package_root, relative_path):
    """Get the full path to one of the files shipped inside the package.

    In the source distribution, these files are in ``subfield_qed/examples/``
    or ``subfield_qed/tests/data/``; on installation they move to the user's
    site-packages directory.

    Parameters
    ----------
    package_root : str
        Name of the included/installed python package
    relative_path : str
        Path to the file within the python package

    Returns
    -------
    fn : str
        Full path to file
    """
    fn = str(resources.files(package_root).joinpath(relative_path))
    if not os.path.exists(fn):
        raise ValueError("Sorry! %s does not exist. If you just added it, you'll have to re-install" % fn)
    return fn
