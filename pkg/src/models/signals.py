"""
Signal-model data types for the multipath extraction pipeline.
"""
import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from src.models.errors import ParameterError


@dataclass(frozen=True)
class SourceBurst:
    """
    Sinusoidal burst s(t) = amplitude * exp(j(2 pi f t + phi_in)) for
    0 <= t < cycles / f, zero elsewhere.
    """
    carrier_freq: float = 43_800.0
    cycles: int = 2500
    initial_phase: float = 0.0
    sample_rate: float = 8 * 43_800.0
    amplitude: float = 1.0

    def __post_init__(self):
        if not self.carrier_freq > 0:
            raise ParameterError(f"carrier_freq must be > 0, got {self.carrier_freq}")
        if self.cycles < 1:
            raise ParameterError(f"cycles must be >= 1, got {self.cycles}")
        if self.sample_rate < 8 * self.carrier_freq:
            raise ParameterError(
                f"sample_rate {self.sample_rate} Hz is below 8x the carrier ({8 * self.carrier_freq} Hz)")

    @property
    def duration(self) -> float:
        return self.cycles / self.carrier_freq

    def analytic(self, t: np.ndarray) -> np.ndarray:
        """
        Evaluate the analytic burst at arbitrary times.
        """
        t = np.asarray(t, dtype=float)
        inside = (t >= 0.0) & (t < self.duration)
        phase = 2.0 * math.pi * self.carrier_freq * t + self.initial_phase
        return np.where(inside, self.amplitude * np.exp(1j * phase), 0.0 + 0.0j)

    @classmethod
    def from_dict(cls, data: dict) -> 'SourceBurst':
        carrier = float(data.get('carrier_hz', 43_800.0))
        return cls(
            carrier_freq=carrier,
            cycles=int(data.get('cycles', 2500)),
            initial_phase=float(data.get('initial_phase_rad', 0.0)),
            sample_rate=float(data.get('sample_rate_hz', 8 * carrier)),
            amplitude=float(data.get('amplitude', 1.0)),
        )


@dataclass(frozen=True)
class AmbientTap:
    """
    Path that never touches the reflector; tap 0 is the direct wave.
    """
    amplitude: float
    phase: float
    delay: float


@dataclass(frozen=True)
class MultipathChannel:
    ambient_taps: Tuple[AmbientTap, ...]
    reflector_delays: Tuple[float, ...]

    def __post_init__(self):
        if not self.ambient_taps:
            raise ParameterError("the direct tap must be present")
        if not self.reflector_delays:
            raise ParameterError("at least one reflector path is required")
        for delay in [tap.delay for tap in self.ambient_taps] + list(self.reflector_delays):
            if delay < 0:
                raise ParameterError(f"delays must be >= 0, got {delay}")

    @property
    def max_delay(self) -> float:
        return max([tap.delay for tap in self.ambient_taps] + list(self.reflector_delays))

    @property
    def min_delay(self) -> float:
        return min([tap.delay for tap in self.ambient_taps] + list(self.reflector_delays))

    @classmethod
    def from_dict(cls, data: dict) -> 'MultipathChannel':
        taps = tuple(AmbientTap(float(t['amplitude']), float(t.get('phase_rad', 0.0)), float(t['delay_s']))
                     for t in data.get('ambient_taps', []))
        return cls(taps, tuple(float(d) for d in data.get('reflector_delays_s', [])))


@dataclass(frozen=True)
class ReflectorScene:
    """
    Per-layer complex reflection coefficients of the reflector stack.
    """
    layer_gammas: Tuple[complex, ...]

    def __post_init__(self):
        for gamma in self.layer_gammas:
            if abs(gamma) > 1.0 + 1e-12:
                raise ParameterError(f"|gamma| must be <= 1, got {abs(gamma)}")

    @property
    def total(self) -> complex:
        return complex(sum(self.layer_gammas))

    @classmethod
    def all_open(cls, layers: int = 2) -> 'ReflectorScene':
        return cls(tuple(1.0 + 0j for _ in range(layers)))

    @classmethod
    def all_short(cls, layers: int = 2) -> 'ReflectorScene':
        return cls(tuple(-1.0 + 0j for _ in range(layers)))


@dataclass(frozen=True)
class Waveform:
    """
    Uniformly sampled complex analytic signal; sample k is at t0 + k / sample_rate.
    """
    sample_rate: float
    samples: np.ndarray
    t0: float = 0.0

    def __post_init__(self):
        if not self.sample_rate > 0:
            raise ParameterError(f"sample_rate must be > 0, got {self.sample_rate}")
        if not np.all(np.isfinite(self.samples)):
            raise ParameterError("waveform samples must be finite")

    @property
    def times(self) -> np.ndarray:
        return self.t0 + np.arange(len(self.samples)) / self.sample_rate

    @property
    def duration(self) -> float:
        return len(self.samples) / self.sample_rate

    def __len__(self) -> int:
        return len(self.samples)

    def scaled(self, factor: complex) -> 'Waveform':
        return Waveform(self.sample_rate, self.samples * factor, self.t0)


@dataclass(frozen=True)
class ExtractionResult:
    """
    Normalized reflection recovered from a reception, with the analysis window.
    """
    normalized_coeff: complex
    window: Tuple[float, float]
    b_wave: Optional[Waveform] = field(default=None, compare=False)
    label: str = ''

    @property
    def amplitude(self) -> float:
        return abs(self.normalized_coeff)

    @property
    def phase_deg(self) -> float:
        return math.degrees(math.atan2(self.normalized_coeff.imag, self.normalized_coeff.real))

    @classmethod
    def from_polar(cls, amplitude: float, phase_deg: float, label: str = '') -> 'ExtractionResult':
        """
        Build a result from a reported amplitude and phase (e.g. tank averages).
        """
        coeff = amplitude * complex(math.cos(math.radians(phase_deg)), math.sin(math.radians(phase_deg)))
        return cls(coeff, (0.0, 0.0), None, label)


@dataclass(frozen=True)
class DeviationRow:
    """
    Measured against theoretical reflection for one load state.
    """
    label: str
    phase_deg: float
    amplitude: float
    theory_phase_deg: float
    theory_amplitude: float

    @property
    def phase_deviation(self) -> float:
        """
        Measured minus theoretical phase, wrapped to (-180, 180].
        """
        delta = math.fmod(self.phase_deg - self.theory_phase_deg, 360.0)
        if delta <= -180.0:
            delta += 360.0
        elif delta > 180.0:
            delta -= 360.0
        return delta

    @property
    def amplitude_deviation(self) -> float:
        return self.amplitude - self.theory_amplitude


@dataclass
class ExperimentReport:
    rows: List[DeviationRow]

    @property
    def mean_abs_phase_deviation(self) -> float:
        return float(np.mean([abs(r.phase_deviation) for r in self.rows])) if self.rows else 0.0

    @property
    def rms_phase_deviation(self) -> float:
        return float(np.sqrt(np.mean([r.phase_deviation ** 2 for r in self.rows]))) if self.rows else 0.0

    @property
    def max_abs_phase_deviation(self) -> float:
        return max((abs(r.phase_deviation) for r in self.rows), default=0.0)

    @property
    def mean_abs_amplitude_deviation(self) -> float:
        return float(np.mean([abs(r.amplitude_deviation) for r in self.rows])) if self.rows else 0.0
