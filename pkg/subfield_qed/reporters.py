"""
Logging setup and the reporters that write scan results: a CSV writer
with a fixed column schema and the summary record of a scanned quantity.

Authors: subfield-qed developers
"""

import logging
import sys

import numpy as np

from subfield_qed import formats

logger = logging.getLogger(__name__)

#: Marks handlers installed by `init_logger`, so a second call replaces them.
_HANDLER_TAG = '_subfield_qed_handler'


def addLoggingLevel(levelName, levelNum, methodName=None):
    """
    Comprehensively adds a new logging level to the `logging` module and the
    currently configured logging class.

    `levelName` becomes an attribute of the `logging` module with the value
    `levelNum`. `methodName` becomes a convenience method for both `logging`
    itself and the class returned by `logging.getLoggerClass()` (usually just
    `logging.Logger`). If `methodName` is not specified, `levelName.lower()` is
    used.

    Registering the same name with the same number again is a no-op; a
    different number for an existing name is logged as a warning and
    overrides it.

    Parameters
    ----------
    levelName : str
        The new level name to be added to the `logging` module.
    levelNum : int
        The level number indicated for the logging module.
    methodName : str, default=None
        The method to call on the logging module for the new level name.
        For example if provided 'trace', you would call `logging.trace()`.

    Example
    -------
    >>> addLoggingLevel('TRACE', logging.DEBUG - 5)
    >>> logging.getLogger(__name__).setLevel("TRACE")
    >>> logging.getLogger(__name__).trace('that worked')
    >>> logging.TRACE
    5
    """
    if not methodName:
        methodName = levelName.lower()

    if getattr(logging, levelName, None) == levelNum and hasattr(logging.getLoggerClass(), methodName):
        return
    if hasattr(logging, levelName):
        logger.warning('{} already defined in logging module'.format(levelName))

    def logForLevel(self, message, *args, **kwargs):
        if self.isEnabledFor(levelNum):
            self._log(levelNum, message, args, **kwargs)

    def logToRoot(message, *args, **kwargs):
        logging.log(levelNum, message, *args, **kwargs)

    logging.addLevelName(levelNum, levelName)
    setattr(logging, levelName, levelNum)
    setattr(logging.getLoggerClass(), methodName, logForLevel)
    setattr(logging, methodName, logToRoot)


def init_logger(logger, level=logging.INFO, stream=True, outfname=None):
    """Initialize the Logger module with the given level and outfname.

    Handlers installed by an earlier call are removed first.

    Parameters
    ----------
    logger : logging.Logger
        Usually the package logger ``logging.getLogger('subfield_qed')``.
    level : int or str
        DEBUG, INFO, REPORT, WARNING, ERROR or CRITICAL.
    stream : bool, default = True
        If True, the logger streams to sys.stdout.
    outfname : str, optional
        The output file path prefix; the log goes to ``outfname + '.log'``.

    Returns
    -------
    logger : logging.Logger
        The logging object with the handlers added.
    """
    fmt = formats.LoggerFormatter()
    if isinstance(level, str):
        level = logging.getLevelName(level.upper())
        if not isinstance(level, int):
            raise ValueError('unknown logging level {!r}'.format(level))

    for handler in [h for h in logger.handlers if getattr(h, _HANDLER_TAG, False)]:
        logger.removeHandler(handler)
        handler.close()

    handlers = []
    if stream:
        handlers.append(logging.StreamHandler(stream=sys.stdout))
    if outfname:
        handlers.append(logging.FileHandler(outfname + '.log'))
    handlers.append(logging.NullHandler())
    for handler in handlers:
        handler.setFormatter(fmt)
        setattr(handler, _HANDLER_TAG, True)
        logger.addHandler(handler)

    logger.setLevel(level)
    return logger


class CSVReporter(object):
    """
    Writes rows under a fixed header, every float with 17 significant digits.

    Parameters
    ----------
    file : str
        Output path.
    columns : list of str
        Header, written once on construction.
    separator : str, default=','
    """

    def __init__(self, file, columns, separator=','):
        self.columns = list(columns)
        self._separator = separator
        self._rows = 0
        self._out = open(file, 'w', newline='')
        self._out.write(self._separator.join(self.columns) + '\n')

    def report(self, row):
        if len(row) != len(self.columns):
            raise ValueError('row has {} values for {} columns'.format(len(row), len(self.columns)))
        self._out.write(formats.format_row(row, self._separator) + '\n')
        self._rows += 1

    @property
    def rows(self):
        return self._rows

    def close(self):
        self._out.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def summarize(name, values, labels=None):
    """
    Summary record of a scanned quantity: minimum, maximum and the label of the maximum.

    Non-finite values are ignored; `labels` defaults to the row index.
    """
    values = np.asarray(values, dtype=float)
    finite = np.isfinite(values)
    if not np.any(finite):
        return {'quantity': name, 'min': float('nan'), 'max': float('nan'), 'argmax': None, 'count': len(values)}
    masked = np.where(finite, values, -np.inf)
    i_max = int(np.argmax(masked))
    labels = list(range(len(values))) if labels is None else list(labels)
    return {
        'quantity': name,
        'min': float(np.min(values[finite])),
        'max': float(values[i_max]),
        'argmax': labels[i_max],
        'count': int(len(values)),
    }


def report_summary(summary, log=None):
    """Write a summary record at the REPORT level."""
    log = logger if log is None else log
    addLoggingLevel('REPORT', logging.WARNING - 5)
    log.report('{quantity}: min = {min:.6g}, max = {max:.6g}, argmax = {argmax} ({count} points)'.format(**summary))
