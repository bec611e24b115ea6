"""
Array-level data types: incident wave, reflector geometry, probe ring,
coding schemes and beam patterns.

Angles follow one convention everywhere: 0 deg along the array axis (+x),
90 deg broadside (+y, the side the reflectors face), counterclockwise positive.
"""
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np

from src.models.errors import ParameterError
from src.models.loads import StageSet

Point = Tuple[float, float]


@dataclass(frozen=True)
class IncidentWave:
    """
    Monochromatic plane wave. direction is the unit propagation vector.
    """
    frequency: float
    sound_speed: float = 1500.0
    direction: Point = (0.0, -1.0)
    amplitude: float = 1.0

    def __post_init__(self):
        if not self.frequency > 0:
            raise ParameterError(f"frequency must be > 0, got {self.frequency}")
        if not self.sound_speed > 0:
            raise ParameterError(f"sound_speed must be > 0, got {self.sound_speed}")
        norm = math.hypot(*self.direction)
        if abs(norm - 1.0) > 1e-9:
            raise ParameterError(f"direction must be a unit vector, |d| = {norm}")

    @classmethod
    def from_arrival_angle(cls, frequency: float, arrival_deg: float, sound_speed: float = 1500.0,
                           amplitude: float = 1.0) -> 'IncidentWave':
        """
        Build a wave arriving from arrival_deg (90 deg = normal incidence).
        """
        rad = math.radians(arrival_deg)
        return cls(frequency, sound_speed, (-math.cos(rad), -math.sin(rad)), amplitude)

    @property
    def wavenumber(self) -> float:
        return 2.0 * math.pi * self.frequency / self.sound_speed

    @property
    def wavelength(self) -> float:
        return self.sound_speed / self.frequency


@dataclass(frozen=True)
class ArrayConfig:
    """
    Reflector positions in metres, all in the plane of the probes.

    A backed reflector re-radiates only into the half-plane it faces (+y);
    with backed=False every element radiates in all directions.
    """
    element_positions: Tuple[Point, ...]
    backed: bool = True

    def __post_init__(self):
        if not self.element_positions:
            raise ParameterError("an array needs at least one element")
        if len(set(self.element_positions)) != len(self.element_positions):
            raise ParameterError("element positions must be distinct")

    @classmethod
    def uniform_linear(cls, count: int, spacing: float, backed: bool = True) -> 'ArrayConfig':
        """
        Uniform line along x, centred on the origin.

        Args:
            count: Number of reflectors
            spacing: Distance between neighbours in metres
            backed: Whether the reflectors radiate into +y only

        Returns:
            ArrayConfig: The array
        """
        if count < 1:
            raise ParameterError(f"element count must be >= 1, got {count}")
        if count > 1 and not spacing > 0:
            raise ParameterError(f"spacing must be > 0, got {spacing}")
        offset = (count - 1) / 2.0
        return cls(tuple(((n - offset) * spacing, 0.0) for n in range(count)), backed)

    @property
    def positions(self) -> np.ndarray:
        return np.asarray(self.element_positions, dtype=float)

    @property
    def aperture(self) -> float:
        pos = self.positions
        if len(pos) == 1:
            return 0.0
        diffs = pos[:, None, :] - pos[None, :, :]
        return float(np.max(np.hypot(diffs[..., 0], diffs[..., 1])))

    def far_field_distance(self, wavelength: float) -> float:
        return 2.0 * self.aperture ** 2 / wavelength

    def __len__(self) -> int:
        return len(self.element_positions)


@dataclass(frozen=True)
class ProbeRing:
    """
    Probes evenly spaced on a circle; probe i sits at i * 360 / count degrees.
    """
    center: Point = (0.0, 0.0)
    radius: float = 0.75
    count: int = 72

    def __post_init__(self):
        if not self.radius > 0:
            raise ParameterError(f"ring radius must be > 0, got {self.radius}")
        if self.count < 3:
            raise ParameterError(f"ring needs at least 3 probes, got {self.count}")

    def angles_deg(self) -> np.ndarray:
        return np.arange(self.count) * (360.0 / self.count)

    def points(self) -> np.ndarray:
        rad = np.radians(self.angles_deg())
        return np.column_stack((self.center[0] + self.radius * np.cos(rad),
                                self.center[1] + self.radius * np.sin(rad)))

    @classmethod
    def with_step(cls, step_deg: float, radius: float, center: Point = (0.0, 0.0)) -> 'ProbeRing':
        return cls(center, radius, int(round(360.0 / step_deg)))


class SchemeKind(Enum):
    CONTINUOUS = 'continuous'
    IQ = 'iq'
    TWO_BIT = '2bit'
    ONE_BIT = '1bit'


@dataclass(frozen=True)
class CodingScheme:
    kind: SchemeKind
    stages: StageSet = field(default_factory=StageSet)

    @classmethod
    def parse(cls, name: str, stages: Optional[StageSet] = None) -> 'CodingScheme':
        aliases = {
            'continuous': SchemeKind.CONTINUOUS,
            'iq': SchemeKind.IQ,
            '2bit': SchemeKind.TWO_BIT, '2-bit': SchemeKind.TWO_BIT, 'twobit': SchemeKind.TWO_BIT,
            '1bit': SchemeKind.ONE_BIT, '1-bit': SchemeKind.ONE_BIT, 'onebit': SchemeKind.ONE_BIT,
        }
        key = name.strip().lower()
        if key not in aliases:
            raise ParameterError(f"unknown coding scheme '{name}'")
        return cls(aliases[key], stages or StageSet())

    @property
    def name(self) -> str:
        return self.kind.value


@dataclass(frozen=True)
class BeamSample:
    angle_deg: float
    pressure: complex
    magnitude: float
    normalized: float


@dataclass
class BeamPattern:
    """
    Reflected pressure on a probe ring, ascending in angle.

    is_zero is set when every sample vanishes; normalization is skipped then.
    """
    samples: List[BeamSample]
    is_zero: bool = False

    @property
    def angles(self) -> np.ndarray:
        return np.array([s.angle_deg for s in self.samples])

    @property
    def magnitudes(self) -> np.ndarray:
        return np.array([s.magnitude for s in self.samples])

    @property
    def normalized(self) -> np.ndarray:
        return np.array([s.normalized for s in self.samples])

    @property
    def pressures(self) -> np.ndarray:
        return np.array([s.pressure for s in self.samples])


@dataclass(frozen=True)
class Lobe:
    angle_deg: float
    normalized: float


@dataclass
class BeamMetrics:
    """
    Lobe summary of a beam pattern. first_side_lobe is the larger of the two
    lobes adjacent to the main lobe.
    """
    main_lobe_angle: float
    main_mag: float
    side_lobes: List[Lobe]
    grating_lobes: List[Lobe]
    first_side_lobe: Optional[Lobe] = None


@dataclass(frozen=True)
class QuantizedProfile:
    """
    Effective per-element coefficients of a coding scheme, with the load tokens
    realizing them (one token per connected layer; empty for continuous coding).
    """
    scheme: str
    coefficients: Tuple[complex, ...]
    tokens: Tuple[Tuple[str, ...], ...]

    def __len__(self) -> int:
        return len(self.coefficients)


@dataclass
class SchemeComparison:
    """
    One row of a coding-scheme comparison. joint_main_mag is the main-lobe
    magnitude divided by the largest main lobe among the compared schemes.
    """
    scheme: str
    pattern: BeamPattern
    metrics: BeamMetrics
    joint_main_mag: float = 1.0


@dataclass(frozen=True)
class ArrayScenario:
    """
    Geometry, excitation, steering and probing of one array run.

    focus_distance, when set, co-phases the elements on the point at that
    distance along the steering direction instead of on the far-field
    direction; probes inside the near field then see the beam where it was
    steered.
    """
    array: ArrayConfig
    wave: IncidentWave
    steer_deg: float
    ring: ProbeRing = field(default_factory=ProbeRing)
    stages: StageSet = field(default_factory=StageSet)
    z0: float = 1000.0
    focus_distance: Optional[float] = None

    def __post_init__(self):
        if self.focus_distance is not None and not self.focus_distance > 0:
            raise ParameterError(f"focus distance must be > 0, got {self.focus_distance}")

    @classmethod
    def from_dict(cls, data: dict) -> 'ArrayScenario':
        """
        Build a scenario from an 'array' config section.

        Element positions come from 'positions_m' when given, otherwise from
        'element_count' and either 'spacing_m' or 'spacing_wavelengths'.

        Args:
            data: Section dictionary

        Returns:
            ArrayScenario: The scenario
        """
        wave = IncidentWave.from_arrival_angle(
            float(data.get('frequency_hz', 41_100.0)),
            float(data.get('incident_angle_deg', 90.0)),
            float(data.get('sound_speed_mps', 1500.0)),
            float(data.get('amplitude_pa', 1.0)),
        )
        backed = bool(data.get('backed', True))
        if 'positions_m' in data:
            array = ArrayConfig(tuple((float(x), float(y)) for x, y in data['positions_m']), backed)
        else:
            if 'spacing_m' in data:
                spacing = float(data['spacing_m'])
            else:
                spacing = float(data.get('spacing_wavelengths', 2.0)) * wave.wavelength
            array = ArrayConfig.uniform_linear(int(data.get('element_count', 8)), spacing, backed)
        ring = ProbeRing(tuple(data.get('ring_center_m', (0.0, 0.0))),
                         float(data.get('ring_radius_m', 0.75)),
                         int(data.get('ring_count', 72)))
        stages = StageSet(tuple(float(a) for a in data.get('stages', (0.3, 0.6, 0.9))))
        focus = data.get('focus_radius_m')
        return cls(array, wave, float(data.get('steer_angle_deg', 45.0)), ring, stages,
                   float(data.get('z0_ohms', 1000.0)), None if focus is None else float(focus))

    def with_ring(self, ring: ProbeRing) -> 'ArrayScenario':
        return replace(self, ring=ring)
