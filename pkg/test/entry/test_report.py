import json
import os

import numpy as np
import pandas as pd
import pytest

from flowlab.entry import emit_report, records_frame, summarize, report_kind, REPORT_COLUMNS
from flowlab.monitor import MonotonicityRecord, HarnackSample
from flowlab.tensorlab import IdentityRecord
from flowlab.utils import EmptyReport, ValidationError, ReportIOError


def _monotonicity(residual: float = 1e-4):
    return [MonotonicityRecord(t=0.1 * i, tau=1 - 0.1 * i, theta=1.0, dtheta_dt=-0.5 + residual, termA=-0.5,
                               termB=0.0, termC=0.0, residual=residual) for i in range(3)]


def _harnack():
    return [
        HarnackSample((0.1, 0.2), 0.0, 1.0, 'lyh_trace', (1.0, 0.0), -0.25),
        HarnackSample((0.3, 0.4), 0.0, 1.0, 'dim2', (0.0, 1.0), 0.75),
    ]


@pytest.mark.unittest
class TestEntryReport:
    def test_kind(self):
        assert report_kind(_monotonicity()) == 'monotonicity'
        assert report_kind(_harnack()) == 'harnack'
        assert report_kind([IdentityRecord('div_ric', 2, 0, 0.0)]) == 'identity'
        with pytest.raises(EmptyReport):
            report_kind([])
        with pytest.raises(ValidationError):
            report_kind([IdentityRecord('div_ric', 2, 0, 0.0)] + _harnack())
        with pytest.raises(ValidationError):
            report_kind(['row'])

    def test_frame(self):
        df = records_frame(_harnack())
        assert list(df.columns) == list(REPORT_COLUMNS['harnack'])
        assert df['point_y'].tolist() == [0.2, 0.4]
        assert records_frame(_monotonicity())['residual'].tolist() == [1e-4] * 3

    def test_summarize_identity(self):
        records = [IdentityRecord('div_ric', 2, i, 1e-9 * i) for i in range(3)] + \
                  [IdentityRecord('second_bianchi', 3, 0, 1e-3)]
        summary = summarize(records, {'div_ric': 1e-7, 'second_bianchi': 1e-7, 'commutation_1form': 1e-7})
        assert summary['records'] == 4
        assert summary['max_residual'] == pytest.approx(1e-3)
        assert summary['checks']['div_ric']['passed']
        assert summary['checks']['div_ric']['count'] == 3
        assert not summary['checks']['second_bianchi']['passed']
        assert not summary['checks']['commutation_1form']['passed']
        assert not summary['passed']

    def test_summarize_monotonicity(self):
        summary = summarize(_monotonicity(1e-4), {'relative_residual': 1e-2})
        assert summary['checks']['relative_residual']['max_residual'] == pytest.approx(2e-4)
        assert summary['passed']
        assert not summarize(_monotonicity(0.1), {'relative_residual': 1e-2})['passed']

    def test_summarize_harnack(self):
        summary = summarize(_harnack())
        assert summary['checks']['dim2']['positive']
        assert not summary['checks']['lyh_trace']['positive']
        assert summary['checks']['lyh_trace']['min_value'] == -0.25
        assert summary['passed']

    def test_emit(self, tmp_path):
        out_dir = str(tmp_path / 'nested' / 'reports')
        csv_path, json_path = emit_report(_monotonicity(), out_dir, 'balance', config={'seed': 1}, seed=1,
                                          thresholds={'relative_residual': 1e-2})
        assert os.path.isfile(csv_path) and os.path.isfile(json_path)
        df = pd.read_csv(csv_path)
        assert np.allclose(df['tau'], [1.0, 0.9, 0.8])
        with open(json_path, 'r', encoding='utf-8') as f:
            summary = json.load(f)
        assert summary['config'] == {'seed': 1}
        assert summary['kind'] == 'monotonicity'

    def test_emit_errors(self, tmp_path):
        with pytest.raises(EmptyReport):
            emit_report([], str(tmp_path), 'empty')
        blocker = tmp_path / 'file'
        blocker.write_text('x', encoding='utf-8')
        with pytest.raises(ReportIOError):
            emit_report(_harnack(), str(blocker), 'harnack')
