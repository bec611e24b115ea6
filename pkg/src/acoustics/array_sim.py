"""
Reflected field of an array of point reflectors under plane-wave excitation.

Each element re-radiates the incident wave scaled by its coefficient as a 2-D
point source with 1/r spreading. A backed array radiates only into the
half-plane its reflectors face (+y); an unbacked one radiates everywhere.
"""
import cmath
import math
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.signal import find_peaks

from src.acoustics.iq_modulation import TIE_TOLERANCE, assign_loads, combined_gamma, gamma_of_load
from src.models.array import (ArrayConfig, ArrayScenario, BeamMetrics, BeamPattern, BeamSample,
                              CodingScheme, IncidentWave, Lobe, ProbeRing, QuantizedProfile,
                              SchemeComparison, SchemeKind)
from src.models.errors import DomainError, MetricError, ParameterError
from src.models.loads import LoadState, ReflectionTarget, parse_load_token
from src.utils.logger import Logger

MIN_DISTANCE = 1e-3
GRATING_THRESHOLD = 0.8
PEAK_PROMINENCE = 1e-6
PLATEAU_DECIMALS = 9
REFERENCE_STEPS = 360

_ONE_BIT_LEVELS = ((1.0 + 0j, LoadState.open()), (-1.0 + 0j, LoadState.short()))
_TWO_BIT_LEVELS = (
    (1.0 + 0j, LoadState.open()),
    (1j, LoadState.inductive(1.0)),
    (-1.0 + 0j, LoadState.short()),
    (-1j, LoadState.capacitive(1.0)),
)


def _wrap(phase: float) -> float:
    return math.atan2(math.sin(phase), math.cos(phase))


def _unit(angle_deg: float) -> np.ndarray:
    rad = math.radians(angle_deg)
    return np.array([math.cos(rad), math.sin(rad)])


def desired_profile(array: ArrayConfig, wave: IncidentWave, steer_angle: float,
                    focus_distance: Optional[float] = None, reference: float = 0.0) -> List[ReflectionTarget]:
    """
    Full-amplitude targets whose contributions toward steer_angle are
    co-phased, compensating the incident path phase at each element.

    Without a focus distance the elements are phased for the far-field
    direction. With one, they are phased on the point at that distance along
    the steering direction; both agree for an element at the origin.

    Args:
        array: Reflector geometry
        wave: Incident plane wave
        steer_angle: Steering direction in degrees
        focus_distance: Distance of the focal point from the origin in metres
        reference: Phase in radians added to every target

    Returns:
        List[ReflectionTarget]: One target per element
    """
    if focus_distance is not None and not focus_distance > 0:
        raise ParameterError(f"focus distance must be > 0, got {focus_distance}")
    k = wave.wavenumber
    direction = np.asarray(wave.direction, dtype=float)
    steer = _unit(steer_angle)
    targets = []
    for position in array.positions:
        phase = k * float(direction @ position)
        if focus_distance is None:
            phase -= k * float(steer @ position)
        else:
            to_focus = focus_distance * steer - position
            phase += k * (math.hypot(to_focus[0], to_focus[1]) - focus_distance)
        targets.append(ReflectionTarget(1.0, _wrap(phase + reference)))
    return targets


def _nearest_level(coefficient: complex, levels) -> Tuple[complex, LoadState]:
    best = levels[0]
    best_distance = abs(coefficient - best[0])
    for level in levels[1:]:
        distance = abs(coefficient - level[0])
        if distance < best_distance - TIE_TOLERANCE:
            best, best_distance = level, distance
    return best


def quantize_profile(targets: Sequence[ReflectionTarget], scheme: CodingScheme, z0: float = 1000.0) -> QuantizedProfile:
    """
    Effective coefficients and load tokens of a coding scheme.

    Continuous coding reproduces the targets. IQ uses the two-layer sum of
    the assigned loads, which shares the unit scale of the targets. 1-bit and
    2-bit connect only the first layer and snap to {+1, -1} or {+1, +j, -1, -j}.

    Args:
        targets: Per-element reflection targets
        scheme: Coding scheme
        z0: Characteristic impedance in ohms

    Returns:
        QuantizedProfile: Coefficients and tokens per element
    """
    coefficients = []
    tokens = []
    for target in targets:
        if scheme.kind is SchemeKind.CONTINUOUS:
            coefficients.append(target.coefficient)
            tokens.append(())
        elif scheme.kind is SchemeKind.IQ:
            assignment = assign_loads(target, scheme.stages, z0)
            coefficients.append(combined_gamma(assignment, z0).total)
            tokens.append(assignment.tokens)
        else:
            levels = _ONE_BIT_LEVELS if scheme.kind is SchemeKind.ONE_BIT else _TWO_BIT_LEVELS
            value, load = _nearest_level(target.coefficient, levels)
            coefficients.append(value)
            tokens.append((load.token,))
    return QuantizedProfile(scheme.name, tuple(coefficients), tuple(tokens))


def profile_from_tokens(rows: Iterable[Sequence[str]], z0: float = 1000.0, scheme: str = 'table1') -> QuantizedProfile:
    """
    Coefficients of fixed per-element load tokens; each element contributes the
    sum over its connected layers.

    Args:
        rows: Per-element token sequences (one token per connected layer)
        z0: Characteristic impedance in ohms
        scheme: Label carried into the profile

    Returns:
        QuantizedProfile: Coefficients and the tokens as given
    """
    coefficients = []
    tokens = []
    for row in rows:
        row = tuple(row)
        if not row:
            raise ParameterError("every element needs at least one load token")
        coefficients.append(complex(sum(gamma_of_load(parse_load_token(t), z0) for t in row)))
        tokens.append(row)
    return QuantizedProfile(scheme, tuple(coefficients), tuple(tokens))


def field_at_point(array: ArrayConfig, coefficients: Sequence[complex], wave: IncidentWave, point) -> complex:
    """
    Reflected pressure at a point (incident field excluded).

    Args:
        array: Reflector geometry
        coefficients: Per-element complex coefficients
        wave: Incident plane wave
        point: Observation point (x, y) in metres

    Returns:
        complex: Pressure in Pa
    """
    if len(coefficients) != len(array):
        raise ParameterError(f"{len(coefficients)} coefficients for {len(array)} elements")
    k = wave.wavenumber
    direction = np.asarray(wave.direction, dtype=float)
    point = np.asarray(point, dtype=float)
    real_parts = []
    imag_parts = []
    for coefficient, position in zip(coefficients, array.positions):
        offset = point - position
        r = math.hypot(offset[0], offset[1])
        if r < MIN_DISTANCE:
            raise DomainError(f"point {tuple(point)} lies within {MIN_DISTANCE} m of element {tuple(position)}")
        if array.backed and offset[1] < 0:
            continue
        term = (wave.amplitude * complex(coefficient)
                * cmath.exp(-1j * k * float(direction @ position)) * cmath.exp(-1j * k * r) / r)
        real_parts.append(term.real)
        imag_parts.append(term.imag)
    return complex(math.fsum(real_parts), math.fsum(imag_parts))


def beam_pattern(array: ArrayConfig, coefficients: Sequence[complex], wave: IncidentWave,
                 ring: ProbeRing) -> BeamPattern:
    """
    Sample the reflected field on a probe ring and normalize by its maximum.

    Args:
        array: Reflector geometry
        coefficients: Per-element coefficients
        wave: Incident plane wave
        ring: Probe ring

    Returns:
        BeamPattern: Samples in ascending angle; is_zero set for a null field
    """
    angles = ring.angles_deg()
    pressures = [field_at_point(array, coefficients, wave, p) for p in ring.points()]
    magnitudes = [abs(p) for p in pressures]
    peak = max(magnitudes)
    is_zero = peak == 0.0
    samples = [BeamSample(float(a), p, m, 0.0 if is_zero else m / peak)
               for a, p, m in zip(angles, pressures, magnitudes)]
    return BeamPattern(samples, is_zero)


def beam_metrics(pattern: BeamPattern) -> BeamMetrics:
    """
    Main lobe, side lobes and grating lobes of a pattern.

    Peaks are found on the circular sequence of probes after rounding the
    normalized pattern to PLATEAU_DECIMALS; a lobe must stand out from its
    surroundings by PEAK_PROMINENCE, so ripple on a plateau does not count.

    Args:
        pattern: A nonzero beam pattern

    Returns:
        BeamMetrics: Lobe summary
    """
    if pattern.is_zero or not pattern.samples:
        raise MetricError("lobe metrics are undefined for a zero pattern")
    normalized = np.round(pattern.normalized, PLATEAU_DECIMALS)
    angles = pattern.angles
    count = len(normalized)

    # Rotate so a global minimum sits at both ends; no circular peak is lost.
    shift = int(np.argmin(normalized))
    rotated = np.roll(normalized, -shift)
    peaks, _ = find_peaks(np.append(rotated, rotated[0]), prominence=PEAK_PROMINENCE)
    indices = sorted((int(p) + shift) % count for p in peaks)
    if not indices:
        indices = [int(np.argmax(normalized))]

    main_index = max(indices, key=lambda i: (normalized[i], -i))
    lobes = [Lobe(float(angles[i]), float(normalized[i])) for i in indices]
    main_position = indices.index(main_index)
    side_lobes = [lobe for i, lobe in zip(indices, lobes) if i != main_index]
    grating_lobes = [lobe for lobe in side_lobes if lobe.normalized >= GRATING_THRESHOLD]

    first_side = None
    if side_lobes:
        before = lobes[(main_position - 1) % len(lobes)]
        after = lobes[(main_position + 1) % len(lobes)]
        first_side = before if before.normalized >= after.normalized else after

    return BeamMetrics(float(angles[main_index]), float(pattern.magnitudes[main_index]),
                       side_lobes, grating_lobes, first_side)


def focal_reference(scenario: ArrayScenario, scheme: CodingScheme) -> float:
    """
    Common target phase, on a REFERENCE_STEPS grid, that maximizes a quantized
    scheme's pressure at the focal point. Continuous coding and unfocused
    scenarios keep a zero reference.

    Args:
        scenario: The array scenario
        scheme: Coding scheme

    Returns:
        float: Reference phase in radians
    """
    if scenario.focus_distance is None or scheme.kind is SchemeKind.CONTINUOUS:
        return 0.0
    focal_point = scenario.focus_distance * _unit(scenario.steer_deg)
    best_reference = 0.0
    best_magnitude = -1.0
    for step in range(REFERENCE_STEPS):
        reference = 2.0 * math.pi * step / REFERENCE_STEPS
        targets = desired_profile(scenario.array, scenario.wave, scenario.steer_deg,
                                  scenario.focus_distance, reference)
        profile = quantize_profile(targets, scheme, scenario.z0)
        magnitude = abs(field_at_point(scenario.array, profile.coefficients, scenario.wave, focal_point))
        if magnitude > best_magnitude + 1e-12:
            best_reference, best_magnitude = reference, magnitude
    return best_reference


def scheme_pattern(scenario: ArrayScenario, scheme: CodingScheme) -> Tuple[QuantizedProfile, BeamPattern]:
    """
    Steer the scenario's array with a coding scheme and sample its beam.
    """
    targets = desired_profile(scenario.array, scenario.wave, scenario.steer_deg,
                              scenario.focus_distance, focal_reference(scenario, scheme))
    profile = quantize_profile(targets, scheme, scenario.z0)
    return profile, beam_pattern(scenario.array, profile.coefficients, scenario.wave, scenario.ring)


def compare_schemes(scenario: ArrayScenario, schemes: Optional[Sequence[str]] = None) -> List[SchemeComparison]:
    """
    Beam metrics of several coding schemes on identical geometry and steering.

    Args:
        scenario: The array scenario
        schemes: Scheme names (defaults to iq, 1bit, 2bit, continuous)

    Returns:
        List[SchemeComparison]: One row per scheme, main lobes normalized jointly
    """
    logger = Logger()
    names = schemes or ('iq', '1bit', '2bit', 'continuous')
    rows = []
    for name in names:
        scheme = CodingScheme.parse(name, scenario.stages)
        _, pattern = scheme_pattern(scenario, scheme)
        metrics = beam_metrics(pattern)
        rows.append(SchemeComparison(scheme.name, pattern, metrics))
        side = metrics.first_side_lobe.normalized if metrics.first_side_lobe else 0.0
        logger.info(f"{scheme.name}: main lobe {metrics.main_lobe_angle:.2f} deg, "
                    f"|p|={metrics.main_mag:.4g} Pa, first side lobe {side:.3f}")

    strongest = max(row.metrics.main_mag for row in rows)
    for row in rows:
        row.joint_main_mag = row.metrics.main_mag / strongest
    return rows
