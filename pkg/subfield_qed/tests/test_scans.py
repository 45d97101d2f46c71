import dataclasses
import logging
import math
import os

import pytest
from scipy import constants

from subfield_qed import laser, scans
from subfield_qed.interaction import (Resonance, SubfieldSet, SummationControl, SwitchingKind, TransitionKind,
                                      WindowConvention)
from subfield_qed.laser import BeamPolarization
from subfield_qed.scans import ScanConfig, ScanKind, ScanPointError

BOHR = constants.physical_constants['Bohr radius'][0]


def gamma_scan(tmpdir, name='gamma', **extra):
    return ScanConfig(scan_kind=ScanKind.GammaContour, outfname=str(tmpdir.join(name)), N1_values=(0, 1, 2),
                      N2_values=(0, 1), **extra)


def zeta_scan(tmpdir, **extra):
    extra.setdefault('transition_kinds', (TransitionKind.Excitation,))
    return ScanConfig(scan_kind=ScanKind.LaserZeta, outfname=str(tmpdir.join('zeta')), sigma=BOHR, omega_a=1e15,
                      switching_kinds=(SwitchingKind.Gaussian,),
                      beam={'w0': 1e-6, 'alpha_sq': 1e20, 'pol': BeamPolarization.EpsX}, modes=(8, 8),
                      omega_a_T=(0.5, 2.0), omega_ratios=(0.5, 1.0, 2.0), **extra)


class TestGammaContour(object):
    def test_rows(self, tmpdir):
        result = scans.run_scan(gamma_scan(tmpdir))
        assert result.columns == ['N1', 'N2', 'gamma_closed', 'gamma_sum']
        assert len(result.rows) == 6
        for n1, n2, closed, direct in result.rows:
            assert closed == pytest.approx(laser.gamma_sum((n1, n2)), abs=1e-12)
            assert direct == laser.gamma_sum((n1, n2))
        assert result.summary['max_abs_difference'] < 1e-10
        lines = open(result.csv_path).read().splitlines()
        assert lines[0] == 'N1,N2,gamma_closed,gamma_sum'
        assert len(lines) == 7

    def test_workers_do_not_change_output(self, tmpdir):
        serial = scans.run_scan(gamma_scan(tmpdir, name='serial'))
        pooled = scans.run_scan(gamma_scan(tmpdir, name='pooled', workers=2))
        assert open(serial.csv_path, 'rb').read() == open(pooled.csv_path, 'rb').read()

    def test_plot(self, tmpdir):
        result = scans.run_scan(gamma_scan(tmpdir, plot=True))
        assert result.plot_path == str(tmpdir.join('gamma.svg'))
        assert '<svg' in open(result.plot_path).read()


class TestLaserZeta(object):
    def test_bound_holds(self, tmpdir):
        result = scans.run_scan(zeta_scan(tmpdir))
        assert len(result.rows) == 6
        assert all(result.column('holds'))
        assert result.summary['violations'] == 0
        for value, bound in zip(result.column('zeta'), result.column('bound')):
            assert value <= bound

    def test_emission_violations_are_reported(self, tmpdir, caplog):
        caplog.set_level(logging.WARNING, logger='subfield_qed.scans')
        scan = zeta_scan(tmpdir, transition_kinds=(TransitionKind.Emission,))
        scan = dataclasses.replace(scan, omega_a_T=(math.sqrt(3.0),), omega_ratios=(1.0,))
        result = scans.run_scan(scan)
        assert result.summary['violations'] == 1
        assert 'zeta exceeds' in caplog.text

    def test_plot_single_row(self, tmpdir):
        scan = zeta_scan(tmpdir, plot=True)
        scan = dataclasses.replace(scan, omega_a_T=(1.0,))
        result = scans.run_scan(scan)
        assert os.path.exists(result.plot_path)


class TestTruncationError(object):
    def test_point_failure_names_point(self, tmpdir):
        scan = ScanConfig(scan_kind=ScanKind.TruncationError, outfname=str(tmpdir.join('trunc')),
                          geometry={'R_over_sigma': 20.0, 'L_over_R': 10.0}, sigma=BOHR, omega_a=1e15,
                          switching_kinds=(SwitchingKind.TopHat,), subfields=SubfieldSet((1,)),
                          summation=SummationControl(max_terms=10, chunk=4), omega_a_T=(1.0,))
        with pytest.raises(ScanPointError) as excinfo:
            scans.run_scan(scan)
        assert 'TailBoundError' in str(excinfo.value)
        assert 'omega_a_T = 1' in str(excinfo.value)

    @pytest.mark.slow
    def test_resonant_cavity(self, tmpdir):
        scan = ScanConfig(scan_kind=ScanKind.TruncationError, outfname=str(tmpdir.join('cavity')),
                          geometry={'R_over_sigma': 20.0, 'L_over_R': 10.0}, sigma=BOHR, resonance=Resonance(5, 2),
                          switching_kinds=(SwitchingKind.Gaussian,), subfields=SubfieldSet((5,)),
                          omega_a_T=(5.0, 20.0), tolerance=1e-3, plot=True)
        result = scans.run_scan(scan)
        deltas = result.column('delta_N')
        assert all(0.0 <= d <= 1.0 for d in deltas)
        # off-resonant subfields fade as T grows
        assert deltas[1] < deltas[0]
        assert result.summary['quantity'] == 'delta_N'


class TestSubfieldRatios(object):
    @pytest.mark.slow
    def test_dominant_subfield_near_twice_resonant(self, tmpdir):
        scan = ScanConfig(scan_kind=ScanKind.SubfieldRatios, outfname=str(tmpdir.join('ratios')),
                          geometry={'R_over_sigma': 1000.0}, sigma=BOHR, resonance=Resonance(10, 0),
                          convention=WindowConvention.PRINTED, ratio_name='L_over_R', ratio_values=(100.0,),
                          m1_values=tuple(range(1, 31)), omega_a_T=(1.0,),
                          summation=SummationControl(tail_tolerance=1e-6, on_budget='estimate'))
        result = scans.run_scan(scan)
        assert result.columns == ['m1', 'L_over_R', 'c_abs2', 'c_abs2_normalized', 'is_resonant', 'is_argmax']
        assert sum(result.column('is_argmax')) == 1
        assert max(result.column('c_abs2_normalized')) == 1.0
        argmax = result.summary['argmax_m1'][100.0]
        assert abs(argmax - 2 * 10) <= 2
        assert result.rows[argmax - 1][result.columns.index('is_argmax')]
