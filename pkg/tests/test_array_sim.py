import cmath
import math

import numpy as np
import pytest

from src.acoustics import array_sim
from src.models.array import (ArrayConfig, ArrayScenario, BeamPattern, BeamSample, CodingScheme, IncidentWave,
                              ProbeRing)
from src.models.errors import DomainError, MetricError, ParameterError
from src.models.loads import ReflectionTarget, StageSet

FREQUENCY = 41_100.0
WAVE = IncidentWave.from_arrival_angle(FREQUENCY, 90.0)
FAR_RING = ProbeRing.with_step(0.25, 25.0)


def eight_elements(spacing_wavelengths):
    return ArrayConfig.uniform_linear(8, spacing_wavelengths * WAVE.wavelength)


def scenario(spacing_wavelengths=2.0, steer=45.0, ring=FAR_RING, stages=(0.3, 0.6, 0.9)):
    return ArrayScenario(eight_elements(spacing_wavelengths), WAVE, steer, ring, StageSet(stages))


def test_normal_incidence_travels_toward_the_array():
    np.testing.assert_allclose(WAVE.direction, (0.0, -1.0), atol=1e-15)
    assert WAVE.wavelength == pytest.approx(1500.0 / FREQUENCY)


def test_single_element_profile_has_zero_phase():
    targets = array_sim.desired_profile(ArrayConfig(((0.0, 0.0),)), WAVE, 30.0)
    assert len(targets) == 1
    assert targets[0].phi_r == pytest.approx(0.0)


def test_broadside_profile_is_mirror_symmetric():
    targets = array_sim.desired_profile(eight_elements(0.5), WAVE, 90.0)
    phases = [t.phi_r for t in targets]
    np.testing.assert_allclose(phases, phases[::-1], atol=1e-12)


def test_profile_phase_increment():
    array = eight_elements(2.0)
    targets = array_sim.desired_profile(array, WAVE, 45.0)
    step = -WAVE.wavenumber * 2.0 * WAVE.wavelength * math.cos(math.radians(45.0))
    for a, b in zip(targets, targets[1:]):
        increment = cmath.phase(b.coefficient / a.coefficient)
        assert increment == pytest.approx(math.atan2(math.sin(step), math.cos(step)), abs=1e-9)


def test_continuous_profile_is_unquantized():
    targets = array_sim.desired_profile(eight_elements(2.0), WAVE, 45.0)
    profile = array_sim.quantize_profile(targets, CodingScheme.parse('continuous'))
    np.testing.assert_allclose(np.abs(profile.coefficients), 1.0)
    np.testing.assert_allclose(profile.coefficients, [t.coefficient for t in targets])


def test_two_bit_snaps_to_nearest_quadrant():
    target = ReflectionTarget(1.0, math.radians(-69.7))
    profile = array_sim.quantize_profile([target], CodingScheme.parse('2bit'))
    assert profile.coefficients[0] == -1j
    assert profile.tokens[0] == ('C10',)


def test_one_bit_levels():
    targets = [ReflectionTarget(1.0, 0.3), ReflectionTarget(1.0, 2.5)]
    profile = array_sim.quantize_profile(targets, CodingScheme.parse('1-bit'))
    assert profile.coefficients == (1.0, -1.0)
    assert profile.tokens == (('Op',), ('Sh',))


def test_iq_profile_carries_two_layer_tokens():
    targets = array_sim.desired_profile(eight_elements(2.0), WAVE, 45.0)
    profile = array_sim.quantize_profile(targets, CodingScheme.parse('iq'))
    assert all(len(tokens) == 2 for tokens in profile.tokens)
    for target, coefficient in zip(targets, profile.coefficients):
        assert coefficient.real == pytest.approx(target.coefficient.real, abs=1e-12)
        assert abs(coefficient.imag - target.coefficient.imag) <= 0.15 + 1e-12


def test_unknown_scheme():
    with pytest.raises(ParameterError):
        CodingScheme.parse('3bit')


def test_profile_from_tokens_sums_layers():
    profile = array_sim.profile_from_tokens([('Op', 'Op'), ('Sh',), ('R2000', 'C09')])
    assert profile.coefficients[0] == pytest.approx(2.0)
    assert profile.coefficients[1] == pytest.approx(-1.0)
    assert profile.coefficients[2] == pytest.approx(1.0 / 3.0 - 0.9j)


def test_single_source_spreads_as_one_over_r():
    array = ArrayConfig(((0.0, 0.0),))
    for r in (0.1, 0.75, 3.0):
        p = array_sim.field_at_point(array, [1.0], WAVE, (0.0, r))
        assert abs(p) == pytest.approx(1.0 / r, rel=1e-12)


def test_antisymmetric_pair_cancels_on_axis():
    array = ArrayConfig(((-0.05, 0.0), (0.05, 0.0)))
    assert abs(array_sim.field_at_point(array, [1.0, -1.0], WAVE, (0.0, 0.6))) < 1e-12


def test_field_matches_direct_sum():
    array = eight_elements(2.0)
    targets = array_sim.desired_profile(array, WAVE, 45.0)
    coefficients = [t.coefficient for t in targets]
    k = WAVE.wavenumber
    point = (0.75 * math.cos(math.radians(40.0)), 0.75 * math.sin(math.radians(40.0)))
    expected = 0j
    for c, (x, y) in zip(coefficients, array.element_positions):
        r = math.hypot(point[0] - x, point[1] - y)
        expected += c * cmath.exp(1j * k * y) * cmath.exp(-1j * k * r) / r
    assert array_sim.field_at_point(array, coefficients, WAVE, point) == pytest.approx(expected, rel=1e-12)


def test_point_behind_a_backed_reflector_receives_nothing():
    array = ArrayConfig(((0.0, 0.0),))
    assert array_sim.field_at_point(array, [1.0], WAVE, (0.0, -0.5)) == 0


def test_unbacked_reflector_radiates_both_ways():
    array = ArrayConfig(((0.0, 0.0),), backed=False)
    front = array_sim.field_at_point(array, [1.0], WAVE, (0.0, 0.5))
    back = array_sim.field_at_point(array, [1.0], WAVE, (0.0, -0.5))
    assert abs(back) == pytest.approx(2.0)
    assert back == pytest.approx(front, rel=1e-12)


def test_point_on_an_element_is_a_domain_error():
    array = ArrayConfig(((0.0, 0.0),))
    with pytest.raises(DomainError):
        array_sim.field_at_point(array, [1.0], WAVE, (0.0, 1e-4))


def test_coefficient_count_must_match():
    with pytest.raises(ParameterError):
        array_sim.field_at_point(eight_elements(0.5), [1.0], WAVE, (0.0, 1.0))


def test_zero_coefficients_give_a_zero_pattern():
    pattern = array_sim.beam_pattern(eight_elements(0.5), [0j] * 8, WAVE, ProbeRing(radius=0.75, count=36))
    assert pattern.is_zero
    assert np.all(pattern.magnitudes == 0)
    assert np.all(pattern.normalized == 0)
    with pytest.raises(MetricError):
        array_sim.beam_metrics(pattern)


def test_pattern_is_normalized():
    pattern = array_sim.beam_pattern(eight_elements(0.5), [1.0] * 8, WAVE, ProbeRing(radius=0.75, count=72))
    assert max(pattern.normalized) == pytest.approx(1.0)
    assert list(pattern.angles) == sorted(pattern.angles)


@pytest.mark.parametrize("backed", [True, False])
def test_single_element_has_one_lobe(backed):
    ring = ProbeRing(radius=0.75, count=360)
    pattern = array_sim.beam_pattern(ArrayConfig(((0.0, 0.0),), backed), [1.0], WAVE, ring)
    metrics = array_sim.beam_metrics(pattern)
    assert metrics.side_lobes == []
    assert metrics.grating_lobes == []
    assert metrics.first_side_lobe is None


def test_lobe_at_the_end_of_the_sequence_is_found():
    values = [0.0, 0.2, 0.1, 0.05, 0.3, 1.0]
    samples = [BeamSample(i * 60.0, complex(v), v, v) for i, v in enumerate(values)]
    metrics = array_sim.beam_metrics(BeamPattern(samples))
    assert metrics.main_lobe_angle == 300.0
    assert [lobe.angle_deg for lobe in metrics.side_lobes] == [60.0]


@pytest.mark.parametrize("steer", [15.0, 30.0, 45.0, 60.0])
def test_far_field_main_lobe_follows_steering(steer):
    array = eight_elements(0.5)
    assert FAR_RING.radius >= array.far_field_distance(WAVE.wavelength)
    profile, pattern = array_sim.scheme_pattern(scenario(0.5, steer), CodingScheme.parse('continuous'))
    assert array_sim.beam_metrics(pattern).main_lobe_angle == pytest.approx(steer, abs=2.0)


def test_wide_spacing_produces_grating_lobes():
    for name in ('continuous', 'iq'):
        _, pattern = array_sim.scheme_pattern(scenario(2.0), CodingScheme.parse(name))
        metrics = array_sim.beam_metrics(pattern)
        assert metrics.grating_lobes
        assert all(lobe.normalized >= 0.8 for lobe in metrics.grating_lobes)


def test_half_wavelength_spacing_has_no_grating_lobes():
    _, pattern = array_sim.scheme_pattern(scenario(0.5), CodingScheme.parse('continuous'))
    assert array_sim.beam_metrics(pattern).grating_lobes == []


def test_shipped_steering_scenario_has_a_grating_lobe(fig12_config):
    shipped = fig12_config.array_scenario()
    assert len(shipped.array) == 8
    assert shipped.focus_distance == pytest.approx(shipped.ring.radius)
    _, pattern = array_sim.scheme_pattern(shipped, CodingScheme.parse('iq', shipped.stages))
    metrics = array_sim.beam_metrics(pattern)
    assert metrics.main_lobe_angle == pytest.approx(45.0)
    assert metrics.grating_lobes


def test_coding_scheme_comparison_orderings():
    rows = {row.scheme: row for row in array_sim.compare_schemes(scenario(2.0))}
    assert set(rows) == {'iq', '1bit', '2bit', 'continuous'}
    side = {name: rows[name].metrics.first_side_lobe.normalized for name in ('iq', '2bit', '1bit')}
    assert side['iq'] < side['2bit'] < side['1bit']
    assert rows['iq'].joint_main_mag >= rows['2bit'].joint_main_mag
    assert rows['iq'].joint_main_mag >= rows['1bit'].joint_main_mag
    assert max(row.joint_main_mag for row in rows.values()) == pytest.approx(1.0)


def test_iq_main_lobe_close_to_continuous():
    rows = {row.scheme: row for row in array_sim.compare_schemes(scenario(2.0), ['iq', 'continuous'])}
    ratio = rows['iq'].metrics.main_mag / rows['continuous'].metrics.main_mag
    assert 0.85 <= ratio <= 1.15


def test_focused_profile_co_phases_the_focal_point():
    array = eight_elements(2.0)
    focal_point = 0.75 * np.array([math.cos(math.radians(45.0)), math.sin(math.radians(45.0))])
    targets = array_sim.desired_profile(array, WAVE, 45.0, focus_distance=0.75)
    p = array_sim.field_at_point(array, [t.coefficient for t in targets], WAVE, focal_point)
    spreading = sum(1.0 / math.hypot(*(focal_point - position)) for position in array.positions)
    assert abs(p) == pytest.approx(spreading, rel=1e-12)


def test_focus_distance_must_be_positive():
    with pytest.raises(ParameterError):
        array_sim.desired_profile(eight_elements(2.0), WAVE, 45.0, focus_distance=0.0)
    with pytest.raises(ParameterError):
        ArrayScenario(eight_elements(2.0), WAVE, 45.0, focus_distance=-1.0)


def test_focal_reference_is_zero_without_focus():
    assert array_sim.focal_reference(scenario(2.0), CodingScheme.parse('iq')) == 0.0


def test_focused_comparison_on_the_shipped_ring(fig14_config):
    shipped = fig14_config.array_scenario()
    assert shipped.ring.radius == pytest.approx(0.75)
    rows = {row.scheme: row for row in array_sim.compare_schemes(shipped)}
    for row in rows.values():
        assert row.metrics.main_lobe_angle == pytest.approx(45.0)
    assert rows['iq'].joint_main_mag == pytest.approx(1.0)
    assert rows['iq'].joint_main_mag >= rows['1bit'].joint_main_mag
    assert rows['iq'].joint_main_mag >= rows['2bit'].joint_main_mag
    assert rows['iq'].metrics.grating_lobes


def test_scaling_the_coefficients_scales_the_field():
    array = eight_elements(2.0)
    coefficients = [t.coefficient for t in array_sim.desired_profile(array, WAVE, 45.0)]
    scale = 0.3 - 1.7j
    ring = ProbeRing(radius=0.75, count=72)
    base = array_sim.beam_pattern(array, coefficients, WAVE, ring)
    scaled = array_sim.beam_pattern(array, [scale * c for c in coefficients], WAVE, ring)
    np.testing.assert_allclose(scaled.pressures, scale * base.pressures, rtol=1e-12, atol=1e-12)
    np.testing.assert_allclose(scaled.normalized, base.normalized, atol=1e-12)


def test_mirrored_scenario_gives_a_mirrored_pattern():
    ring = ProbeRing(radius=0.75, count=72)
    array = eight_elements(2.0)
    original = ArrayScenario(array, IncidentWave.from_arrival_angle(FREQUENCY, 60.0), 45.0, ring)
    mirrored = ArrayScenario(array, IncidentWave.from_arrival_angle(FREQUENCY, 120.0), 135.0, ring)
    _, a = array_sim.scheme_pattern(original, CodingScheme.parse('continuous'))
    _, b = array_sim.scheme_pattern(mirrored, CodingScheme.parse('continuous'))
    mirror_index = [(36 - i) % 72 for i in range(72)]
    np.testing.assert_allclose(b.magnitudes[mirror_index], a.magnitudes, rtol=1e-9, atol=1e-12)


def test_element_order_does_not_matter():
    array = eight_elements(2.0)
    coefficients = [t.coefficient for t in array_sim.desired_profile(array, WAVE, 45.0)]
    order = [3, 0, 7, 5, 1, 6, 2, 4]
    shuffled = ArrayConfig(tuple(array.element_positions[i] for i in order))
    point = (0.2, 0.6)
    expected = array_sim.field_at_point(array, coefficients, WAVE, point)
    actual = array_sim.field_at_point(shuffled, [coefficients[i] for i in order], WAVE, point)
    assert abs(actual - expected) <= 1e-12 * abs(expected)


def test_far_field_pressure_halves_when_the_radius_doubles():
    near = scenario(0.5, ring=ProbeRing.with_step(1.0, 25.0))
    far = scenario(0.5, ring=ProbeRing.with_step(1.0, 50.0))
    assert near.ring.radius >= near.array.far_field_distance(WAVE.wavelength)
    _, a = array_sim.scheme_pattern(near, CodingScheme.parse('continuous'))
    _, b = array_sim.scheme_pattern(far, CodingScheme.parse('continuous'))
    main = array_sim.beam_metrics(a)
    assert array_sim.beam_metrics(b).main_mag == pytest.approx(0.5 * main.main_mag, rel=0.01)
    np.testing.assert_allclose(b.normalized, a.normalized, atol=0.01)
