"""
Output formats: the level-dependent log formatter and the text
serialization used for every number written to a CSV file.

Authors: subfield-qed developers
"""

import enum
import logging
import numbers

import numpy as np

from subfield_qed import reporters


class LoggerFormatter(logging.Formatter):
    """
    Formats the output of the `logging.Logger` object by level. This also
    adds the custom level 'REPORT' used for scan summaries and self-test
    verdicts.

    Examples
    --------
    Below the logger streams a REPORT message to `sys.stdout` without any
    additional information, and an INFO message with its level name.

    >>> from subfield_qed.formats import LoggerFormatter
    >>> import logging, sys
    >>> logger = logging.getLogger('doctest-formats')
    >>> handler = logging.StreamHandler(stream=sys.stdout)
    >>> handler.setFormatter(LoggerFormatter())
    >>> logger.addHandler(handler)
    >>> logger.setLevel(logging.INFO)
    >>> logger.report('argmax m1 = 19')
    argmax m1 = 19
    >>> logger.info('scan finished')
    INFO: scan finished
    """

    dbg_fmt = "%(levelname)s: [%(module)s.%(funcName)s] %(message)s"
    info_fmt = "%(levelname)s: %(message)s"
    rep_fmt = "%(message)s"

    def __init__(self):
        super().__init__(fmt="%(levelname)s: %(msg)s", datefmt="%H:%M:%S", style='%')
        reporters.addLoggingLevel('REPORT', logging.WARNING - 5)

    def format(self, record):
        format_orig = self._style._fmt

        if record.levelno == logging.DEBUG:
            self._style._fmt = LoggerFormatter.dbg_fmt
        elif record.levelno == logging.REPORT:
            self._style._fmt = LoggerFormatter.rep_fmt
        else:
            self._style._fmt = LoggerFormatter.info_fmt

        result = logging.Formatter.format(self, record)
        self._style._fmt = format_orig
        return result


def format_float(value):
    """
    Serialize a float with 17 significant digits, enough to round-trip any double.

    Examples
    --------
    >>> format_float(0.1)
    '0.10000000000000001'
    >>> format_float(2.0)
    '2'
    """
    return '{:.17g}'.format(float(value))


def format_value(value):
    """Text of one CSV cell: booleans and integers verbatim, enums by name, floats with `format_float`."""
    if isinstance(value, (bool, np.bool_)):
        return 'true' if value else 'false'
    if isinstance(value, enum.Enum):
        return value.name
    if isinstance(value, numbers.Integral):
        return str(int(value))
    if isinstance(value, numbers.Real):
        return format_float(value)
    return str(value)


def format_row(values, separator=','):
    return separator.join(format_value(v) for v in values)
