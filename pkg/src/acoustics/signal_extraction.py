"""
Multipath reception model and the reference-subtraction pipeline that
recovers the reflector's amplitude and phase.

A reception is the ambient sum (direct path plus paths that never touch the
reflector) plus the reflector's summed layer coefficients times every
reflector-path copy of the burst. Recording the reflector with all layers
open and with all layers shorted gives two references: their mean is the
ambient sum, half their difference is the open-reflector wave.
"""
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.signal import hilbert

from src.acoustics.iq_modulation import combined_gamma
from src.models.errors import DomainError, ExtractionError, ParameterError
from src.models.loads import LayerAssignment
from src.models.signals import (DeviationRow, ExperimentReport, ExtractionResult, MultipathChannel,
                                ReflectorScene, SourceBurst, Waveform)
from src.utils.logger import Logger

# Reference power in the window below this fraction of the peak power is degenerate.
DEGENERATE_REFERENCE = 1e-12
STEADY_FRACTION = 0.5


def synthesize_received(channel: MultipathChannel, scene: ReflectorScene, burst: SourceBurst,
                        duration: Optional[float] = None) -> Waveform:
    """
    Analytic reception for one reflector state.

    Args:
        channel: Ambient taps and reflector-path delays
        scene: Layer coefficients of the reflector
        burst: Source burst
        duration: Record length in seconds (default: longest delay plus the burst)

    Returns:
        Waveform: Received analytic signal starting at t = 0
    """
    if duration is None:
        duration = channel.max_delay + burst.duration
    if channel.max_delay >= duration:
        raise DomainError(f"delay {channel.max_delay} s exceeds the synthesis duration {duration} s")

    t = np.arange(int(math.ceil(duration * burst.sample_rate))) / burst.sample_rate
    received = np.zeros(len(t), dtype=complex)
    for tap in channel.ambient_taps:
        received += tap.amplitude * np.exp(1j * tap.phase) * burst.analytic(t - tap.delay)
    total = scene.total
    if total != 0:
        for delay in channel.reflector_delays:
            received += total * burst.analytic(t - delay)
    return Waveform(burst.sample_rate, received)


def _check_aligned(*waves: Waveform):
    first = waves[0]
    for wave in waves[1:]:
        if wave.sample_rate != first.sample_rate or len(wave) != len(first) or wave.t0 != first.t0:
            raise ParameterError("waveforms must share sample rate, start time and length")


def ambient_component(r_opop: Waveform, r_shsh: Waveform) -> Waveform:
    """
    Load-independent part of the reception: (r_opop + r_shsh) / 2.
    """
    _check_aligned(r_opop, r_shsh)
    return Waveform(r_opop.sample_rate, (r_opop.samples + r_shsh.samples) / 2.0, r_opop.t0)


def extract_reflection(r_load: Waveform, r_opop: Waveform, r_shsh: Waveform) -> Waveform:
    """
    Reflected wave of a load state: the reception minus the ambient component.

    Args:
        r_load: Reception with the load state under test
        r_opop: Reception with all layers open
        r_shsh: Reception with all layers shorted

    Returns:
        Waveform: The reflected wave
    """
    _check_aligned(r_load, r_opop, r_shsh)
    ambient = ambient_component(r_opop, r_shsh)
    return Waveform(r_load.sample_rate, r_load.samples - ambient.samples, r_load.t0)


def open_reference(r_opop: Waveform, r_shsh: Waveform) -> Waveform:
    """
    Reflected wave with all layers open: (r_opop - r_shsh) / 2.
    """
    _check_aligned(r_opop, r_shsh)
    return Waveform(r_opop.sample_rate, (r_opop.samples - r_shsh.samples) / 2.0, r_opop.t0)


def steady_state_window(channel: MultipathChannel, burst: SourceBurst,
                        fraction: float = STEADY_FRACTION) -> Tuple[float, float]:
    """
    Central part of the interval in which every path carries the burst.

    Args:
        channel: The multipath channel
        burst: The source burst
        fraction: Share of the overlap kept around its centre

    Returns:
        Tuple[float, float]: (t_start, t_end) in seconds
    """
    if not 0 < fraction <= 1:
        raise ParameterError(f"window fraction must lie in (0, 1], got {fraction}")
    start, end = channel.max_delay, channel.min_delay + burst.duration
    if end <= start:
        raise ExtractionError(f"no steady-state overlap: paths span {start} s to {end} s")
    centre, half = (start + end) / 2.0, fraction * (end - start) / 2.0
    return centre - half, centre + half


def window_from_reference(b_open: Waveform, fraction: float = STEADY_FRACTION,
                          level: float = 0.5) -> Tuple[float, float]:
    """
    Analysis window for recordings without a channel model: the central part
    of the span where |b_open| exceeds level times its peak.
    """
    magnitude = np.abs(b_open.samples)
    peak = float(np.max(magnitude)) if len(magnitude) else 0.0
    if peak == 0.0:
        raise ExtractionError("open reference is zero everywhere")
    active = np.nonzero(magnitude >= level * peak)[0]
    times = b_open.times
    start, end = float(times[active[0]]), float(times[active[-1]])
    centre, half = (start + end) / 2.0, fraction * (end - start) / 2.0
    return centre - half, centre + half


def normalized_coefficient(b: Waveform, b_open: Waveform, window: Tuple[float, float],
                           label: str = '') -> ExtractionResult:
    """
    Least-squares complex ratio of a reflected wave to the open reference.

    Args:
        b: Reflected wave of the load state
        b_open: Open-reflector reference
        window: (t_start, t_end) in seconds
        label: Load token or description carried into the result

    Returns:
        ExtractionResult: Ratio, window and the reflected wave
    """
    _check_aligned(b, b_open)
    t_start, t_end = window
    times = b.times
    if t_start >= t_end or t_start < times[0] or t_end > times[-1]:
        raise ParameterError(f"window {window} lies outside the waveform extent [{times[0]}, {times[-1]}]")
    mask = (times >= t_start) & (times <= t_end)
    if not np.any(mask):
        raise ExtractionError(f"window {window} holds no samples")

    reference = b_open.samples[mask]
    power = float(np.sum(np.abs(reference) ** 2))
    peak_power = float(np.max(np.abs(b_open.samples) ** 2))
    if peak_power == 0.0 or power / np.count_nonzero(mask) < DEGENERATE_REFERENCE * peak_power:
        raise ExtractionError("open reference is degenerate in the analysis window")

    coefficient = complex(np.sum(np.conj(reference) * b.samples[mask]) / power)
    result = ExtractionResult(coefficient, (float(t_start), float(t_end)), b, label)
    Logger().debug(f"extracted {label or 'reflection'}: {result.amplitude:.4f} at {result.phase_deg:.2f} deg")
    return result


def theoretical_coefficient(assignment: LayerAssignment, z0: float = 1000.0) -> complex:
    """
    Open-normalized reflection predicted for a load assignment.
    """
    return combined_gamma(assignment, z0).normalized


def demodulate(waveform: Waveform, carrier_hz: float) -> Waveform:
    """
    Analytic signal of a real recording, mixed down by the carrier.

    Args:
        waveform: Real-valued recording (imaginary parts are ignored)
        carrier_hz: Carrier frequency in Hz

    Returns:
        Waveform: Complex baseband signal on the same time grid
    """
    if not carrier_hz > 0:
        raise ParameterError(f"carrier must be > 0 Hz, got {carrier_hz}")
    analytic = hilbert(np.real(waveform.samples))
    return Waveform(waveform.sample_rate, analytic * np.exp(-2j * math.pi * carrier_hz * waveform.times), waveform.t0)


def experiment_report(measured: Sequence[ExtractionResult], theoretical: Sequence[complex],
                      labels: Optional[Sequence[str]] = None) -> ExperimentReport:
    """
    Per-load-state phase and amplitude deviations of measurements from theory.

    Args:
        measured: Extracted (or reported) reflections
        theoretical: Predicted normalized coefficients, same order
        labels: Row labels (default: the measured labels)

    Returns:
        ExperimentReport: Rows with deviations and summary statistics
    """
    if len(measured) != len(theoretical):
        raise ParameterError(f"{len(measured)} measurements for {len(theoretical)} predictions")
    if labels is not None and len(labels) != len(measured):
        raise ParameterError("one label per measurement is required")
    rows: List[DeviationRow] = []
    for index, (result, theory) in enumerate(zip(measured, theoretical)):
        label = labels[index] if labels is not None else result.label
        rows.append(DeviationRow(label, result.phase_deg, result.amplitude,
                                 math.degrees(math.atan2(theory.imag, theory.real)), abs(theory)))
    report = ExperimentReport(rows)
    Logger().info(f"experiment report: {len(rows)} states, mean |phase deviation| "
                  f"{report.mean_abs_phase_deviation:.2f} deg")
    return report
