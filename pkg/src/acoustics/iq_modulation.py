"""
Passive IQ modulation with a two-layer reflector: per-load reflection
coefficients, the in-phase potentiometer setting, quantized quadrature stages
and the recombined reflection.
"""
import math
from typing import Optional

import numpy as np

from src.acoustics.matching_network import reflection_at_load
from src.models.errors import ParameterError
from src.models.loads import (CombinedGamma, LayerAssignment, LoadKind, LoadState,
                              ReflectionTarget, StageSet)

# Amplitude differences below this are treated as ties and resolved downward.
TIE_TOLERANCE = 1e-9


class InPhaseSaturation(ParameterError):
    """
    Raised by rl_for_inphase when the in-phase component is +/-1; the
    suggested load (Open or Short) is attached.
    """

    def __init__(self, message: str, load: LoadState):
        super().__init__(message)
        self.load = load


def reactance_for_phase(phase: float, z0: float) -> float:
    """
    Pure reactance X whose reflection (jX - z0)/(jX + z0) has the given phase.

    Args:
        phase: Reflection phase in radians
        z0: Characteristic impedance in ohms

    Returns:
        float: Reactance in ohms (negative = capacitive)
    """
    if not z0 > 0:
        raise ParameterError(f"z0 must be > 0, got {z0}")
    wrapped = math.atan2(math.sin(phase), math.cos(phase))
    return z0 * math.tan((math.pi - wrapped) / 2.0)


def capacitance_for_reactance(x: float, f: float) -> float:
    """
    Capacitor giving reactance x (< 0) at frequency f.
    """
    if not x < 0:
        raise ParameterError(f"a capacitor needs a negative reactance, got {x}")
    if not f > 0:
        raise ParameterError(f"frequency must be > 0, got {f}")
    return 1.0 / (2.0 * math.pi * f * abs(x))


def gamma_of_load(load: LoadState, z0: float) -> complex:
    """
    Reflection coefficient realized by a discrete load.

    Reactive stages are idealized by their design-point coefficient a at -90 deg
    (capacitive) or +90 deg (inductive).

    Args:
        load: The load state
        z0: Characteristic impedance in ohms

    Returns:
        complex: Gamma of the layer
    """
    if not z0 > 0:
        raise ParameterError(f"z0 must be > 0, got {z0}")
    if load.kind is LoadKind.OPEN:
        return 1.0 + 0j
    if load.kind is LoadKind.SHORT:
        return -1.0 + 0j
    if load.kind is LoadKind.RESISTIVE:
        return reflection_at_load(load.value, z0)
    if load.kind is LoadKind.CAPACITIVE:
        return complex(0.0, -load.value)
    return complex(0.0, load.value)


def rl_for_inphase(target: ReflectionTarget, z0: float) -> float:
    """
    Potentiometer resistance producing the in-phase component a_r cos(phi_r).

    Args:
        target: Desired reflection
        z0: Characteristic impedance in ohms

    Returns:
        float: R_L in ohms
    """
    return _rl_for_component(target.a_r * math.cos(target.phi_r), z0)


def _rl_for_component(x: float, z0: float) -> float:
    if x >= 1.0:
        raise InPhaseSaturation("in-phase component of +1 needs an open circuit", LoadState.open())
    if x <= -1.0:
        raise InPhaseSaturation("in-phase component of -1 needs a short circuit", LoadState.short())
    return z0 * (1.0 + x) / (1.0 - x)


def _in_phase_load(x: float, z0: float) -> LoadState:
    try:
        return LoadState.resistive(_rl_for_component(x, z0))
    except InPhaseSaturation as saturated:
        return saturated.load


def quantize_stage(amplitude: float, stages: StageSet) -> float:
    """
    Nearest level among {0} and the stage amplitudes; ties go to the smaller level.
    """
    best_level = 0.0
    best_distance = abs(amplitude)
    for level in stages.amplitudes:
        distance = abs(amplitude - level)
        if distance < best_distance - TIE_TOLERANCE:
            best_level, best_distance = level, distance
    return best_level


def assign_for_coefficient(coefficient: complex, stages: StageSet, z0: float) -> LayerAssignment:
    """
    Assignment realizing an arbitrary complex coefficient (in-phase exact,
    quadrature quantized).

    Args:
        coefficient: Desired layer-sum reflection
        stages: Available quadrature stages
        z0: Characteristic impedance in ohms

    Returns:
        LayerAssignment: Loads for both layers
    """
    layer1 = _in_phase_load(coefficient.real, z0)
    q = coefficient.imag
    level = quantize_stage(abs(q), stages)
    if level == 0.0:
        layer2 = LoadState.resistive(z0)
    elif q >= 0:
        layer2 = LoadState.inductive(level)
    else:
        layer2 = LoadState.capacitive(level)
    return LayerAssignment(layer1, layer2)


def assign_loads(target: ReflectionTarget, stages: Optional[StageSet] = None, z0: float = 1000.0) -> LayerAssignment:
    """
    Map a reflection target to loads: the resistive network of layer 1 gives
    a_r cos(phi_r), the inductive (sin >= 0) or capacitive network of layer 2
    gives the stage nearest |a_r sin(phi_r)|.

    Args:
        target: Desired reflection
        stages: Quadrature stages (defaults to 0.3 / 0.6 / 0.9)
        z0: Characteristic impedance in ohms

    Returns:
        LayerAssignment: Loads for both layers
    """
    stages = stages or StageSet()
    quadrature = target.a_r * math.sin(target.phi_r)
    in_phase = target.a_r * math.cos(target.phi_r)
    return assign_for_coefficient(complex(in_phase, quadrature), stages, z0)


def combined_gamma(assignment: LayerAssignment, z0: float = 1000.0) -> CombinedGamma:
    """
    Open-normalized two-layer reflection (Gamma_1 + Gamma_2) / 2, together with
    the plain sum.

    Args:
        assignment: Loads of both layers
        z0: Characteristic impedance in ohms

    Returns:
        CombinedGamma: Normalized and total coefficients
    """
    total = gamma_of_load(assignment.layer1, z0) + gamma_of_load(assignment.layer2, z0)
    return CombinedGamma(total / 2.0, total)


def iq_recombination_check(target: ReflectionTarget, t_grid, omega: float, phi_in: float) -> float:
    """
    Maximum deviation between A cos(wt + phi_in + phi_r) and its in-phase plus
    quadrature decomposition on a time grid.

    Args:
        target: Reflection target (A, phi_r)
        t_grid: Time samples in seconds
        omega: Angular frequency in rad/s
        phi_in: Initial phase of the incident wave

    Returns:
        float: Max absolute deviation
    """
    t = np.asarray(t_grid, dtype=float)
    if t.size == 0:
        raise ParameterError("the time grid must not be empty")
    carrier = omega * t + phi_in
    direct = target.a_r * np.cos(carrier + target.phi_r)
    in_phase = target.a_r * math.cos(target.phi_r) * np.cos(carrier)
    quadrature = target.a_r * math.sin(target.phi_r) * np.cos(carrier + math.pi / 2.0)
    return float(np.max(np.abs(direct - (in_phase + quadrature))))
