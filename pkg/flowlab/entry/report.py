"""
Overview:
    CSV reports and JSON summaries of scenario records.

    Floats are written in their shortest round-trip decimal form, so identical records always give
    byte-identical files.
"""
import json
import os
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from ditk import logging
from hbutils.string import plural_word

from ..monitor import MonotonicityRecord, HarnackSample
from ..tensorlab import IdentityRecord
from ..utils.error import ValidationError, EmptyReport, ReportIOError

#: Column order of every report kind.
REPORT_COLUMNS = {
    'monotonicity': ('t', 'tau', 'theta', 'dtheta_dt', 'termA', 'termB', 'termC', 'residual'),
    'harnack': ('t', 'point_x', 'point_y', 'kind', 'value'),
    'identity': ('check_name', 'dim', 'point_index', 'residual'),
}

_RECORD_KINDS = [
    (MonotonicityRecord, 'monotonicity'),
    (HarnackSample, 'harnack'),
    (IdentityRecord, 'identity'),
]


def report_kind(records: Sequence) -> str:
    """
    Kind of a homogeneous record list, ``monotonicity``, ``harnack`` or ``identity``.

    :raises EmptyReport: When ``records`` is empty.
    """
    if not records:
        raise EmptyReport('Nothing to report, the record list is empty.')
    for cls, kind in _RECORD_KINDS:
        if isinstance(records[0], cls):
            if not all(isinstance(r, cls) for r in records):
                raise ValidationError(f'Report records should all be {cls.__name__}.')
            return kind
    raise ValidationError(f'Unsupported record type - {type(records[0]).__name__}.')


def _row(record, kind: str) -> Dict[str, Any]:
    if kind == 'harnack':
        return {'t': record.t, 'point_x': record.location[0], 'point_y': record.location[1],
                'kind': record.kind, 'value': record.value}
    else:
        return {name: getattr(record, name) for name in REPORT_COLUMNS[kind]}


def records_frame(records: Sequence) -> pd.DataFrame:
    """
    Records as a data frame with the columns of their report kind.

    Examples::
        >>> from flowlab.entry import records_frame
        >>> from flowlab.tensorlab import IdentityRecord
        >>> list(records_frame([IdentityRecord('div_ric', 2, 0, 1e-12)]).columns)
        ['check_name', 'dim', 'point_index', 'residual']
    """
    records = list(records)
    kind = report_kind(records)
    return pd.DataFrame([_row(r, kind) for r in records], columns=list(REPORT_COLUMNS[kind]))


def _stats(values) -> Dict[str, float]:
    values = np.asarray(values, dtype=float)
    return {'max_residual': float(np.max(values)), 'mean_residual': float(np.mean(values))}


def summarize(records: Sequence, thresholds: Optional[Mapping[str, float]] = None) -> Dict[str, Any]:
    """
    Residual statistics of the records, with pass or fail against every given threshold.

    Identity records are grouped by check name. Monotonicity records report the absolute residual and
    are checked by their relative residual (key ``relative_residual``). Harnack samples are grouped by
    quadratic kind with their value range.
    """
    records = list(records)
    kind = report_kind(records)
    thresholds = dict(thresholds or {})
    summary: Dict[str, Any] = {'kind': kind, 'records': len(records)}
    checks: Dict[str, Any] = {}

    if kind == 'identity':
        summary.update(_stats([r.residual for r in records]))
        names = list(dict.fromkeys([r.check_name for r in records] + list(thresholds)))
        for name in names:
            values = [r.residual for r in records if r.check_name == name]
            entry: Dict[str, Any] = _stats(values) if values else {'max_residual': None, 'mean_residual': None}
            entry['count'] = len(values)
            if name in thresholds:
                entry['threshold'] = thresholds[name]
                entry['passed'] = bool(values) and entry['max_residual'] <= thresholds[name]
            checks[name] = entry

    elif kind == 'monotonicity':
        summary.update(_stats([abs(r.residual) for r in records]))
        entry = {'max_residual': float(max(r.relative_residual() for r in records)),
                 'mean_residual': float(np.mean([r.relative_residual() for r in records])),
                 'count': len(records)}
        if 'relative_residual' in thresholds:
            entry['threshold'] = thresholds['relative_residual']
            entry['passed'] = entry['max_residual'] <= thresholds['relative_residual']
        checks['relative_residual'] = entry

    else:
        for name in dict.fromkeys(r.kind for r in records):
            values = np.array([r.value for r in records if r.kind == name])
            checks[name] = {'count': int(values.shape[0]), 'min_value': float(np.min(values)),
                            'max_value': float(np.max(values)), 'mean_value': float(np.mean(values)),
                            'positive': bool(np.min(values) > 0)}

    summary['checks'] = checks
    summary['passed'] = all(c.get('passed', True) for c in checks.values())
    return summary


def emit_report(records: Sequence, out_dir: str, name: str, config: Optional[Mapping[str, Any]] = None,
                seed: Optional[int] = None, thresholds: Optional[Mapping[str, float]] = None) -> Tuple[str, str]:
    """
    Write ``<name>.csv`` and the summary ``<name>.json`` into ``out_dir``.

    :param records: Homogeneous list of records.
    :type records: Sequence
    :param out_dir: Report directory, created when missing.
    :type out_dir: str
    :param name: Base name of both files.
    :type name: str
    :param config: Resolved configuration echoed in the summary.
    :param seed: Seed echoed in the summary.
    :param thresholds: Acceptance thresholds, see :func:`summarize`.
    :returns: Paths of the CSV file and of the JSON summary.
    :rtype: Tuple[str, str]
    :raises EmptyReport: When ``records`` is empty.
    :raises ReportIOError: When the files cannot be written.
    """
    records: List = list(records)
    df = records_frame(records)
    summary = summarize(records, thresholds)
    summary['config'] = dict(config or {})
    summary['seed'] = seed

    csv_path = os.path.join(out_dir, f'{name}.csv')
    json_path = os.path.join(out_dir, f'{name}.json')
    try:
        os.makedirs(out_dir, exist_ok=True)
        df.to_csv(csv_path, index=False, encoding='utf-8')
        with open(json_path, 'w', encoding='utf-8') as f:
            json.dump(summary, f, sort_keys=True, ensure_ascii=False, indent=4)
    except OSError as err:
        raise ReportIOError(f'Unable to write report {name!r} to {out_dir!r} - {err}.') from err

    logging.info(f'Report {name!r} written with {plural_word(len(records), "record")} to {csv_path!r}, '
                 f'{"passed" if summary["passed"] else "failed"}.')
    return csv_path, json_path
