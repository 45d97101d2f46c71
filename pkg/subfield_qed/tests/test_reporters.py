import logging

import numpy as np
import pytest

from subfield_qed import formats, reporters
from subfield_qed.interaction import SwitchingKind


@pytest.fixture
def package_logger():
    log = logging.getLogger('subfield_qed.test_reporters')
    yield log
    for handler in list(log.handlers):
        log.removeHandler(handler)
        handler.close()


class TestLogging(object):
    def test_report_level(self):
        reporters.addLoggingLevel('REPORT', logging.WARNING - 5)
        assert logging.REPORT == logging.WARNING - 5
        assert logging.getLevelName(logging.REPORT) == 'REPORT'
        assert hasattr(logging.getLoggerClass(), 'report')

    def test_formatter_by_level(self):
        fmt = formats.LoggerFormatter()

        def record(level, msg):
            return logging.LogRecord('subfield_qed.scans', level, __file__, 1, msg, None, None, func='run_scan')

        assert fmt.format(record(logging.REPORT, 'argmax m1 = 19')) == 'argmax m1 = 19'
        assert fmt.format(record(logging.INFO, 'scan finished')) == 'INFO: scan finished'
        assert fmt.format(record(logging.DEBUG, 'detail')) == 'DEBUG: [test_reporters.run_scan] detail'

    def test_init_logger_replaces_handlers(self, package_logger, tmpdir):
        prefix = str(tmpdir.join('scan'))
        reporters.init_logger(package_logger, 'REPORT', stream=True, outfname=prefix)
        reporters.init_logger(package_logger, 'INFO', stream=False, outfname=prefix)
        kinds = sorted(type(h).__name__ for h in package_logger.handlers)
        assert kinds == ['FileHandler', 'NullHandler']
        assert package_logger.level == logging.INFO
        package_logger.info('written to file')
        for handler in package_logger.handlers:
            handler.flush()
        assert 'INFO: written to file' in tmpdir.join('scan.log').read()

    def test_init_logger_unknown_level(self, package_logger):
        with pytest.raises(ValueError):
            reporters.init_logger(package_logger, 'CHATTY', stream=False)

    def test_report_summary(self, caplog):
        caplog.set_level(logging.REPORT, logger='subfield_qed.reporters')
        summary = reporters.summarize('delta_N', [1e-3, 2e-2, 5e-4], labels=['a', 'b', 'c'])
        reporters.report_summary(summary)
        assert 'delta_N: min = 0.0005, max = 0.02, argmax = b (3 points)' in caplog.text


class TestFormats(object):
    def test_float_round_trip(self):
        for value in (0.1, 1.0 / 3.0, 6.02214076e23, 5e-324, -2.5):
            assert float(formats.format_float(value)) == value

    def test_cells(self):
        assert formats.format_value(True) == 'true'
        assert formats.format_value(np.bool_(False)) == 'false'
        assert formats.format_value(np.int64(7)) == '7'
        assert formats.format_value(SwitchingKind.TopHat) == 'TopHat'
        assert formats.format_value(np.float64(0.5)) == '0.5'
        assert formats.format_value('Gaussian') == 'Gaussian'
        assert formats.format_row([1, 0.25, False], separator=';') == '1;0.25;false'


class TestCSVReporter(object):
    def test_header_and_rows(self, tmpdir):
        path = str(tmpdir.join('rows.csv'))
        with reporters.CSVReporter(path, ['N1', 'gamma', 'holds']) as csv:
            csv.report([1, 0.1, True])
            csv.report([2, 1.0 / 3.0, False])
            assert csv.rows == 2
        lines = open(path).read().splitlines()
        assert lines == ['N1,gamma,holds', '1,0.10000000000000001,true', '2,0.33333333333333331,false']

    def test_row_length(self, tmpdir):
        with reporters.CSVReporter(str(tmpdir.join('bad.csv')), ['a', 'b']) as csv:
            with pytest.raises(ValueError):
                csv.report([1.0])


class TestSummarize(object):
    def test_ignores_nonfinite(self):
        summary = reporters.summarize('zeta', [1.0, np.inf, np.nan, 3.0])
        assert summary == {'quantity': 'zeta', 'min': 1.0, 'max': 3.0, 'argmax': 3, 'count': 4}

    def test_all_nonfinite(self):
        summary = reporters.summarize('zeta', [np.nan])
        assert summary['argmax'] is None
        assert np.isnan(summary['max'])
