import math

import numpy as np
import pytest

from src.acoustics import iq_modulation
from src.acoustics.iq_modulation import InPhaseSaturation
from src.models.errors import ParameterError
from src.models.loads import (LayerAssignment, LoadKind, LoadState, ReflectionTarget, StageSet,
                              parse_load_token)


@pytest.mark.parametrize("load, expected", [
    (LoadState.open(), 1.0),
    (LoadState.short(), -1.0),
    (LoadState.resistive(1000.0), 0.0),
    (LoadState.resistive(2000.0), 1.0 / 3.0),
    (LoadState.capacitive(0.9), -0.9j),
    (LoadState.inductive(0.6), 0.6j),
])
def test_gamma_of_load(load, expected):
    assert iq_modulation.gamma_of_load(load, 1000.0) == pytest.approx(expected)


@pytest.mark.parametrize("in_phase, expected", [
    (0.0, 1000.0),
    (1.0 / 3.0, 2000.0),
    (-1.0 / 3.0, 500.0),
])
def test_rl_for_inphase(in_phase, expected):
    target = ReflectionTarget(abs(in_phase), 0.0 if in_phase >= 0 else math.pi)
    assert iq_modulation.rl_for_inphase(target, 1000.0) == pytest.approx(expected)


@pytest.mark.parametrize("phase, kind", [(0.0, LoadKind.OPEN), (math.pi, LoadKind.SHORT)])
def test_rl_for_inphase_saturates(phase, kind):
    with pytest.raises(InPhaseSaturation) as info:
        iq_modulation.rl_for_inphase(ReflectionTarget(1.0, phase), 1000.0)
    assert info.value.load.kind is kind


def test_full_in_phase_target_uses_open():
    assignment = iq_modulation.assign_loads(ReflectionTarget(1.0, 0.0))
    assert assignment.layer1 == LoadState.open()
    assert assignment.layer2 == LoadState.resistive(1000.0)


def test_pure_quadrature_target_uses_nearest_stage():
    assignment = iq_modulation.assign_loads(ReflectionTarget(1.0, math.pi / 2), StageSet((0.3, 0.6, 0.9)))
    assert assignment.layer1.kind is LoadKind.RESISTIVE
    assert assignment.layer1.value == pytest.approx(1000.0)
    assert assignment.layer2 == LoadState.inductive(0.9)


def test_quadrature_tie_breaks_downward():
    target = ReflectionTarget(0.45 * math.sqrt(2), -math.pi / 4)
    assignment = iq_modulation.assign_loads(target, StageSet((0.3, 0.6, 0.9)))
    assert assignment.layer2 == LoadState.capacitive(0.3)


@pytest.mark.parametrize("amplitude, expected", [
    (0.0, 0.0),
    (0.1, 0.0),
    (0.15, 0.0),
    (0.2, 0.3),
    (0.74, 0.6),
    (1.0, 0.9),
])
def test_quantize_stage(amplitude, expected):
    assert iq_modulation.quantize_stage(amplitude, StageSet()) == expected


def test_quantization_error_is_bounded():
    stages = StageSet((0.3, 0.6, 0.9))
    for amplitude in np.linspace(0.0, 0.9, 181):
        level = iq_modulation.quantize_stage(float(amplitude), stages)
        assert abs(level - amplitude) <= stages.max_quantization_distance() + 1e-12


def test_in_phase_component_is_exact():
    rng = np.random.default_rng(3)
    for _ in range(200):
        target = ReflectionTarget(rng.uniform(0.0, 0.99), rng.uniform(-math.pi, math.pi))
        assignment = iq_modulation.assign_loads(target)
        gamma_1 = iq_modulation.gamma_of_load(assignment.layer1, 1000.0)
        assert gamma_1.real == pytest.approx(target.a_r * math.cos(target.phi_r), abs=1e-12)


@pytest.mark.parametrize("layer1, layer2, magnitude, phase_deg", [
    ('R2000', 'C09', 0.48, -69.7),
    ('Sh', 'L09', 0.67, 138.0),
    ('Op', 'Op', 1.0, 0.0),
])
def test_combined_gamma_theoretical_values(layer1, layer2, magnitude, phase_deg):
    gamma = iq_modulation.combined_gamma(LayerAssignment.from_tokens(layer1, layer2), 1000.0)
    assert gamma.magnitude == pytest.approx(magnitude, abs=0.01)
    assert gamma.phase_deg == pytest.approx(phase_deg, abs=0.5)
    assert gamma.total == pytest.approx(2 * gamma.normalized)


def test_layer_order_does_not_matter():
    a = iq_modulation.combined_gamma(LayerAssignment.from_tokens('C09', 'R2000'))
    b = iq_modulation.combined_gamma(LayerAssignment.from_tokens('R2000', 'C09'))
    assert a == b


def test_iq_recombination_identity():
    omega = 2 * math.pi * 41_100.0
    t = np.linspace(0.0, 1e-3, 1000)
    assert iq_modulation.iq_recombination_check(ReflectionTarget(0.7, 1.0), t, omega, 0.0) < 1e-12
    assert iq_modulation.iq_recombination_check(ReflectionTarget(0.0, 2.0), t, omega, 0.3) == 0.0
    assert iq_modulation.iq_recombination_check(ReflectionTarget(1.0, -math.pi), t, omega, 0.0) < 1e-12


def test_iq_recombination_over_random_targets():
    rng = np.random.default_rng(11)
    omega = 2 * math.pi * 41_100.0
    t = np.linspace(0.0, 1e-3, 1000)
    worst = 0.0
    for _ in range(1000):
        target = ReflectionTarget(rng.uniform(0.0, 1.0), rng.uniform(-math.pi, math.pi))
        worst = max(worst, iq_modulation.iq_recombination_check(target, t, omega, rng.uniform(0, 2 * math.pi)))
    assert worst < 1e-12


def test_recombination_needs_samples():
    with pytest.raises(ParameterError):
        iq_modulation.iq_recombination_check(ReflectionTarget(0.5, 0.0), [], 1.0, 0.0)


@pytest.mark.parametrize("phase_deg, x", [(-45.0, -121.0), (-90.0, -50.0)])
def test_reactance_for_phase(phase_deg, x):
    assert iq_modulation.reactance_for_phase(math.radians(phase_deg), 50.0) == pytest.approx(x, rel=0.01)


@pytest.mark.parametrize("x, f, farads, rel", [
    (-121.0, 2.4e9, 0.55e-12, 0.03),
    (-50.0, 2.4e9, 1.33e-12, 0.03),
    (-121.0, 25e3, 52.6e-9, 0.01),
    (-50.0, 25e3, 127.3e-9, 0.01),
])
def test_varactor_capacitances(x, f, farads, rel):
    assert iq_modulation.capacitance_for_reactance(x, f) == pytest.approx(farads, rel=rel)


def test_capacitance_needs_negative_reactance():
    with pytest.raises(ParameterError):
        iq_modulation.capacitance_for_reactance(50.0, 1000.0)


@pytest.mark.parametrize("token, load", [
    ('Op', LoadState.open()),
    ('Sh', LoadState.short()),
    ('R2000', LoadState.resistive(2000.0)),
    ('R2k', LoadState.resistive(2000.0)),
    ('R19.4', LoadState.resistive(19.4)),
    ('C06', LoadState.capacitive(0.6)),
    ('L10', LoadState.inductive(1.0)),
])
def test_parse_load_token(token, load):
    assert parse_load_token(token) == load


@pytest.mark.parametrize("token", ['X1', 'C0.9', 'R', 'L1', ''])
def test_parse_load_token_rejects_garbage(token):
    with pytest.raises(ParameterError):
        parse_load_token(token)


def test_reflection_target_phase_bounds():
    with pytest.raises(ParameterError):
        ReflectionTarget(0.5, 4.0)
    with pytest.raises(ParameterError):
        ReflectionTarget(1.5, 0.0)
    assert ReflectionTarget(1.0, -math.pi).coefficient == pytest.approx(-1.0)


@pytest.mark.parametrize("ohms", [2000.0, 19.4, 1234.56789, 1.0 / 3.0, 5e-05, 3.2e12])
def test_resistive_token_round_trips(ohms):
    load = LoadState.resistive(ohms)
    assert parse_load_token(load.token) == load


@pytest.mark.parametrize("phase_deg", np.arange(-180.0, 180.0, 7.5))
def test_reassigning_the_realized_coefficient_changes_nothing(phase_deg):
    stages = StageSet()
    first = iq_modulation.assign_loads(ReflectionTarget(0.8, math.radians(phase_deg)), stages)
    realized = iq_modulation.combined_gamma(first).total
    second = iq_modulation.assign_for_coefficient(realized, stages, 1000.0)
    assert second.layer2 == first.layer2
    assert second.layer1.kind is first.layer1.kind
    assert iq_modulation.combined_gamma(second).total == pytest.approx(realized, abs=1e-12)


@pytest.mark.parametrize("phase_deg", np.arange(-180.0, 180.0, 7.5))
def test_quadrature_stage_follows_the_sign_of_the_target(phase_deg):
    target = ReflectionTarget(1.0, math.radians(phase_deg))
    realized = iq_modulation.combined_gamma(iq_modulation.assign_loads(target)).total
    quadrature = math.sin(math.radians(phase_deg))
    if abs(quadrature) > 0.15:
        assert math.copysign(1.0, realized.imag) == math.copysign(1.0, quadrature)
        assert abs(realized.imag - quadrature) <= 0.15 + 1e-12
    else:
        assert realized.imag == 0.0
