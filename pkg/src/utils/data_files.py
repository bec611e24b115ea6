"""
Readers and writers for the simulator's data files: column-text sweeps,
waveforms and reports, and YAML parameter and network documents.

Column-text files carry one header row; lines starting with '#' are comments.
"""
import csv
import json
import os
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import yaml

from src.models.array import BeamPattern, SchemeComparison
from src.models.circuit import AngleImpedance, ImpedanceEnvelope, ImpedanceSweep, PztCircuitParams
from src.models.errors import ArisError, InputFileError
from src.models.loads import parse_load_token
from src.models.network import CascadedNetwork, MatchReport
from src.models.signals import ExperimentReport, Waveform

SWEEP_HEADER = ['freq_hz', 're_ohm', 'im_ohm']
BEAM_HEADER = ['angle_deg', 're', 'im', 'mag', 'mag_norm']
ANGLE_HEADER = ['layer', 'angle_deg', 're_ohm', 'im_ohm']
# Relative jitter tolerated in the time column of a waveform file.
SAMPLING_TOLERANCE = 1e-6


def _fmt(value: float) -> str:
    return f"{value:.17g}"


def _read_rows(path: str, header: Sequence[Sequence[str]]) -> Tuple[List[str], List[Tuple[int, List[str]]]]:
    """
    Read a column-text file, skipping comments and blank lines.

    Args:
        path: File to read
        header: Accepted header layouts

    Returns:
        Tuple: (header found, [(line number, fields)])
    """
    if not os.path.exists(path):
        raise InputFileError(path, 0, "file not found")
    rows = []
    found = None
    with open(path, 'r', encoding='utf-8', newline='') as f:
        for line_number, line in enumerate(f, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith('#'):
                continue
            fields = [field.strip() for field in next(csv.reader([stripped]))]
            if found is None:
                if fields not in [list(h) for h in header]:
                    expected = ' or '.join(','.join(h) for h in header)
                    raise InputFileError(path, line_number, f"expected header {expected}, got {stripped}")
                found = fields
                continue
            if len(fields) != len(found):
                raise InputFileError(path, line_number, f"expected {len(found)} columns, got {len(fields)}")
            rows.append((line_number, fields))
    if found is None:
        raise InputFileError(path, 0, "missing header row")
    return found, rows


def _to_float(path: str, line_number: int, text: str, column: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise InputFileError(path, line_number, f"column {column}: '{text}' is not a number")


def read_sweep(path: str) -> ImpedanceSweep:
    """
    Read an impedance sweep (freq_hz,re_ohm,im_ohm).

    Args:
        path: CSV file

    Returns:
        ImpedanceSweep: Parsed sweep
    """
    _, rows = _read_rows(path, [SWEEP_HEADER])
    entries = []
    previous = 0.0
    for line_number, fields in rows:
        f, re_z, im_z = (_to_float(path, line_number, text, name) for text, name in zip(fields, SWEEP_HEADER))
        if not f > previous:
            raise InputFileError(path, line_number, f"frequencies must be positive and increasing, got {f}")
        previous = f
        entries.append((f, complex(re_z, im_z)))
    try:
        return ImpedanceSweep(tuple(entries))
    except ArisError as e:
        raise InputFileError(path, 0, str(e))


def write_sweep(path: str, sweep: ImpedanceSweep, comment: Optional[str] = None):
    with open(path, 'w', encoding='utf-8', newline='') as f:
        if comment:
            f.write(f"# {comment}\n")
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(SWEEP_HEADER)
        for freq, z in sweep.entries:
            writer.writerow([_fmt(freq), _fmt(z.real), _fmt(z.imag)])


def read_waveform(path: str) -> Tuple[Waveform, bool]:
    """
    Read a waveform file: t_seconds,value (real recording) or t_seconds,re,im
    (analytic signal).

    Args:
        path: CSV file

    Returns:
        Tuple[Waveform, bool]: The waveform and whether it was real-valued
    """
    header, rows = _read_rows(path, [['t_seconds', 'value'], ['t_seconds', 're', 'im']])
    if len(rows) < 2:
        raise InputFileError(path, 0, "a waveform needs at least two samples")
    is_real = len(header) == 2
    times = []
    samples = []
    for line_number, fields in rows:
        values = [_to_float(path, line_number, text, name) for text, name in zip(fields, header)]
        times.append(values[0])
        samples.append(complex(values[1], 0.0 if is_real else values[2]))

    step = times[1] - times[0]
    if not step > 0:
        raise InputFileError(path, rows[1][0], "time column must be increasing")
    for index in range(1, len(times)):
        expected = times[0] + index * step
        if abs(times[index] - expected) > SAMPLING_TOLERANCE * step * max(1, index):
            raise InputFileError(path, rows[index][0], "time column is not uniformly sampled")
    return Waveform(1.0 / step, np.array(samples, dtype=complex), times[0]), is_real


def write_waveform(path: str, waveform: Waveform, real: bool = False):
    with open(path, 'w', encoding='utf-8', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        if real:
            writer.writerow(['t_seconds', 'value'])
            for t, s in zip(waveform.times, waveform.samples):
                writer.writerow([_fmt(t), _fmt(s.real)])
        else:
            writer.writerow(['t_seconds', 're', 'im'])
            for t, s in zip(waveform.times, waveform.samples):
                writer.writerow([_fmt(t), _fmt(s.real), _fmt(s.imag)])


def write_beam(path: str, pattern: BeamPattern):
    """
    Write beam.csv; angles are counterclockwise from the array axis.
    """
    with open(path, 'w', encoding='utf-8', newline='') as f:
        f.write("# angle_deg: 0 along the array axis (+x), 90 broadside, counterclockwise\n")
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(BEAM_HEADER)
        for s in pattern.samples:
            writer.writerow([_fmt(s.angle_deg), _fmt(s.pressure.real), _fmt(s.pressure.imag),
                             _fmt(s.magnitude), _fmt(s.normalized)])


def write_metrics(path: str, comparisons: Iterable[SchemeComparison]):
    """
    Write metrics.csv: one row per lobe of every scheme.
    """
    with open(path, 'w', encoding='utf-8', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(['scheme', 'lobe', 'angle_deg', 'mag_norm', 'grating', 'main_mag', 'joint_main_mag'])
        for row in comparisons:
            m = row.metrics
            writer.writerow([row.scheme, 'main', _fmt(m.main_lobe_angle), _fmt(1.0), 0,
                             _fmt(m.main_mag), _fmt(row.joint_main_mag)])
            for lobe in m.side_lobes:
                kind = 'first_side' if lobe == m.first_side_lobe else 'side'
                writer.writerow([row.scheme, kind, _fmt(lobe.angle_deg), _fmt(lobe.normalized),
                                 int(lobe in m.grating_lobes), '', ''])


def write_match_report(path: str, report: MatchReport):
    with open(path, 'w', encoding='utf-8', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(['entry_index', 'tier_count', 'freq_hz', 'gamma_mag'])
        for row in report.rows:
            writer.writerow([row.entry_index, row.tier_count, _fmt(row.freq_hz), _fmt(row.gamma_mag)])


def write_extraction_report(path: str, report: ExperimentReport):
    with open(path, 'w', encoding='utf-8', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(['load_token', 'phase_deg', 'amplitude', 'theory_phase_deg', 'theory_amplitude'])
        for row in report.rows:
            writer.writerow([row.label, _fmt(row.phase_deg), _fmt(row.amplitude),
                             _fmt(row.theory_phase_deg), _fmt(row.theory_amplitude)])


def _load_yaml(path: str) -> dict:
    if not os.path.exists(path):
        raise InputFileError(path, 0, "file not found")
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = yaml.safe_load(f)
    except yaml.MarkedYAMLError as e:
        line = e.problem_mark.line + 1 if e.problem_mark is not None else 0
        raise InputFileError(path, line, str(e.problem))
    if not isinstance(data, dict):
        raise InputFileError(path, 1, "expected a key-value document")
    return data


def _dump_yaml(path: str, data: dict):
    with open(path, 'w', encoding='utf-8') as f:
        yaml.safe_dump(data, f, sort_keys=True, default_flow_style=False)


def read_params(path: str) -> PztCircuitParams:
    data = _load_yaml(path)
    try:
        return PztCircuitParams.from_dict(data)
    except KeyError as e:
        raise InputFileError(path, 0, f"missing key {e}")
    except (TypeError, ValueError, ArisError) as e:
        raise InputFileError(path, 0, str(e))


def write_params(path: str, params: PztCircuitParams):
    _dump_yaml(path, params.to_dict())


def read_envelope_endpoints(path: str) -> Tuple[PztCircuitParams, PztCircuitParams]:
    """
    Read an endpoints document with 'alpha' and 'beta' parameter sections.
    """
    data = _load_yaml(path)
    try:
        return PztCircuitParams.from_dict(data['alpha']), PztCircuitParams.from_dict(data['beta'])
    except KeyError as e:
        raise InputFileError(path, 0, f"missing key {e}")
    except (TypeError, ValueError, ArisError) as e:
        raise InputFileError(path, 0, str(e))


def read_network(path: str) -> CascadedNetwork:
    data = _load_yaml(path)
    try:
        return CascadedNetwork.from_dict(data)
    except KeyError as e:
        raise InputFileError(path, 0, f"missing key {e}")
    except (TypeError, ValueError, ArisError) as e:
        raise InputFileError(path, 0, str(e))


def write_network(path: str, network: CascadedNetwork):
    _dump_yaml(path, network.to_dict())


def load_angle_table(path: str) -> List[AngleImpedance]:
    """
    Read layer impedances recorded against incident angle
    (layer,angle_deg,re_ohm,im_ohm; a part may be left empty).

    Args:
        path: CSV file

    Returns:
        List[AngleImpedance]: Rows in file order
    """
    _, rows = _read_rows(path, [ANGLE_HEADER])
    table = []
    for line_number, fields in rows:
        layer_text, angle_text, re_text, im_text = fields
        try:
            layer = int(layer_text)
        except ValueError:
            raise InputFileError(path, line_number, f"layer '{layer_text}' is not an integer")
        angle = _to_float(path, line_number, angle_text, 'angle_deg')
        resistance = _to_float(path, line_number, re_text, 're_ohm') if re_text else None
        reactance = _to_float(path, line_number, im_text, 'im_ohm') if im_text else None
        table.append(AngleImpedance(layer, angle, resistance, reactance))
    return table


def load_table1(path: str) -> Dict[str, List[Tuple[str, ...]]]:
    """
    Read per-element load tokens for each coding scheme from a JSON document
    of the form {"schemes": {"iq": [["Op", "R1000"], ...], ...}}.

    Args:
        path: JSON file

    Returns:
        Dict[str, List[Tuple[str, ...]]]: Token rows per scheme
    """
    if not os.path.exists(path):
        raise InputFileError(path, 0, "file not found")
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise InputFileError(path, e.lineno, e.msg)
    schemes = data.get('schemes') if isinstance(data, dict) else None
    if not isinstance(schemes, dict):
        raise InputFileError(path, 0, "missing 'schemes' section")
    table = {}
    for name, rows in schemes.items():
        parsed = []
        for row in rows:
            try:
                for token in row:
                    parse_load_token(token)
            except ArisError as e:
                raise InputFileError(path, 0, f"scheme {name}: {e}")
            parsed.append(tuple(row))
        table[name] = parsed
    return table


def write_envelope(path: str, envelope: ImpedanceEnvelope):
    _dump_yaml(path, {'n_d': envelope.n_d, 'entries': [entry.to_dict() for entry in envelope.entries]})


def read_envelope(path: str) -> ImpedanceEnvelope:
    data = _load_yaml(path)
    try:
        return ImpedanceEnvelope(tuple(PztCircuitParams.from_dict(entry) for entry in data['entries']))
    except KeyError as e:
        raise InputFileError(path, 0, f"missing key {e}")
    except (TypeError, ValueError, ArisError) as e:
        raise InputFileError(path, 0, str(e))
