import json
import logging

import numpy as np
import pytest

from subfield_qed import cavity, cli, selftest, utils
from subfield_qed.cavity import CylinderGeometry, ModeIndex


@pytest.fixture(autouse=True)
def quiet_package_logger():
    yield
    log = logging.getLogger('subfield_qed')
    for handler in list(log.handlers):
        log.removeHandler(handler)
        handler.close()


class TestScanCommand(object):
    def test_gamma_scan(self, tmpdir):
        config = utils.get_data_filename('subfield_qed', 'tests/data/gamma_small.json')
        assert cli.main(['--log-level', 'WARNING', 'scan', config, '--out', str(tmpdir), '--plot']) == cli.EXIT_OK
        lines = tmpdir.join('gamma_small.csv').read().splitlines()
        assert lines[0] == 'N1,N2,gamma_closed,gamma_sum'
        assert len(lines) == 1 + 4 * 2
        assert tmpdir.join('gamma_small.svg').check()
        assert tmpdir.join('gamma_small.log').check()

    def test_config_error(self, tmpdir):
        config = tmpdir.join('typo.json')
        config.write(json.dumps({'scan_kind': 'GammaContour', 'grid': {'N1': {'start': 0, 'stop': 1}},
                                 'gird': {}}))
        assert cli.main(['scan', str(config), '--out', str(tmpdir)]) == cli.EXIT_CONFIG

    def test_parse_error(self, tmpdir):
        config = utils.get_data_filename('subfield_qed', 'tests/data/broken.json')
        assert cli.main(['scan', config, '--out', str(tmpdir)]) == cli.EXIT_CONFIG

    def test_numerical_failure(self, tmpdir):
        config = tmpdir.join('budget.json')
        config.write(json.dumps({
            'scan_kind': 'TruncationError',
            'geometry': {'R_over_sigma': 20, 'L_over_R': 10},
            'atom': {'omega_a': '1e15 / second'},
            'switching': {'kind': 'TopHat'},
            'subfields': [1],
            'summation': {'max_terms': 10, 'chunk': 4},
            'grid': {'omega_a_T': {'values': [1.0]}},
        }))
        assert cli.main(['scan', str(config), '--out', str(tmpdir)]) == cli.EXIT_NUMERIC


class TestModesCommand(object):
    def test_stdout_csv(self, capsys):
        assert cli.main(['modes', '--geometry', '1,2', '--index', '1,0,1,Mu2', '--grid', '5']) == cli.EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == ','.join(cli.MODE_COLUMNS)
        # 13 of the 25 grid points lie inside the unit disk
        assert len(lines) == 1 + 13

    def test_grid_matches_mode(self):
        geom, idx = CylinderGeometry(1.0, 2.0), ModeIndex.parse('2,1,3,Mu1')
        rows = cli.mode_grid(geom, idx, 4)
        x, y, z, r, phi = rows[0][:5]
        mode = cavity.em_mode_3d(geom, idx, (r, phi, z))
        ux = cavity.cylindrical_to_cartesian(mode.u, phi)[0]
        assert rows[0][5] == pytest.approx(ux.real)
        assert rows[0][6] == pytest.approx(ux.imag)
        assert np.hypot(x, y) <= geom.R

    def test_file_output(self, tmpdir):
        out = str(tmpdir.join('mode.csv'))
        assert cli.main(['modes', '--geometry', '1,2', '--index', '1,1,0,Mu2', '--grid', '3', '--output', out]) == 0
        assert tmpdir.join('mode.csv').read().startswith('x,y,z,r,phi,ux_re')

    @pytest.mark.parametrize('argv', [
        ['modes', '--geometry', '1', '--index', '1,0,1,Mu2', '--grid', '5'],
        ['modes', '--geometry', '1,-2', '--index', '1,0,1,Mu2', '--grid', '5'],
        ['modes', '--geometry', '1,2', '--index', '1,0,0,Mu1', '--grid', '5'],
        ['modes', '--geometry', '1,2', '--index', '1,0,1,Mu2', '--grid', '1'],
    ])
    def test_invalid_arguments(self, argv):
        assert cli.main(argv) == cli.EXIT_CONFIG


class TestSelfTestCommand(object):
    def test_failed_check_exit_status(self, monkeypatch):
        monkeypatch.setattr(selftest, '_CHECKS', [('always fails', False, False, lambda level: (False, 'no'))])
        assert cli.main(['self-test']) == cli.EXIT_NUMERIC

    def test_passing_battery_exit_status(self, monkeypatch):
        monkeypatch.setattr(selftest, '_CHECKS', [('always passes', False, False, lambda level: (True, 'ok'))])
        assert cli.main(['self-test', '--full']) == cli.EXIT_OK
