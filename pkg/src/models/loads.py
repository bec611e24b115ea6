"""
Load states behind each PZT layer, IQ targets and two-layer assignments.
"""
import math
import re
from dataclasses import dataclass
from enum import Enum
from typing import Tuple

from src.models.errors import ParameterError


class LoadKind(Enum):
    OPEN = 'Op'
    SHORT = 'Sh'
    RESISTIVE = 'R'
    CAPACITIVE = 'C'
    INDUCTIVE = 'L'


_TOKEN_PATTERN = re.compile(r'^(Op|Sh|R(?P<r>\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)(?P<k>k)?|(?P<reactive>[CL])(?P<amp>\d{2}))$')


@dataclass(frozen=True)
class LoadState:
    """
    A discrete load connected behind one PZT layer.

    value holds the resistance in ohms for RESISTIVE and the stage amplitude
    for CAPACITIVE / INDUCTIVE; it is unused for OPEN and SHORT.
    """
    kind: LoadKind
    value: float = 0.0

    def __post_init__(self):
        if self.kind is LoadKind.RESISTIVE and not self.value >= 0:
            raise ParameterError(f"resistive load must be >= 0 ohms, got {self.value}")
        if self.kind in (LoadKind.CAPACITIVE, LoadKind.INDUCTIVE) and not 0 < self.value <= 1:
            raise ParameterError(f"stage amplitude must lie in (0, 1], got {self.value}")

    @classmethod
    def open(cls) -> 'LoadState':
        return cls(LoadKind.OPEN)

    @classmethod
    def short(cls) -> 'LoadState':
        return cls(LoadKind.SHORT)

    @classmethod
    def resistive(cls, ohms: float) -> 'LoadState':
        return cls(LoadKind.RESISTIVE, float(ohms))

    @classmethod
    def capacitive(cls, amplitude: float) -> 'LoadState':
        return cls(LoadKind.CAPACITIVE, float(amplitude))

    @classmethod
    def inductive(cls, amplitude: float) -> 'LoadState':
        return cls(LoadKind.INDUCTIVE, float(amplitude))

    @property
    def token(self) -> str:
        return format_load_token(self)

    def __str__(self) -> str:
        return self.token


def format_load_token(load: LoadState) -> str:
    """
    Short token for a load: Op, Sh, R<ohms>, C<amp x 10>, L<amp x 10>.

    Args:
        load: The load state

    Returns:
        str: Token such as 'R2000' or 'C06'
    """
    if load.kind is LoadKind.OPEN:
        return 'Op'
    if load.kind is LoadKind.SHORT:
        return 'Sh'
    if load.kind is LoadKind.RESISTIVE:
        text = repr(float(load.value))
        return f"R{text[:-2] if text.endswith('.0') else text}"
    return f"{load.kind.value}{int(round(load.value * 10)):02d}"


def parse_load_token(token: str) -> LoadState:
    """
    Parse a load token. 'R1k' style kilo-ohm suffixes are accepted.

    Args:
        token: Token text

    Returns:
        LoadState: Parsed load
    """
    text = token.strip()
    match = _TOKEN_PATTERN.match(text)
    if not match:
        raise ParameterError(f"unrecognized load token '{token}'")
    if text == 'Op':
        return LoadState.open()
    if text == 'Sh':
        return LoadState.short()
    if match.group('reactive'):
        amplitude = int(match.group('amp')) / 10.0
        if match.group('reactive') == 'C':
            return LoadState.capacitive(amplitude)
        return LoadState.inductive(amplitude)
    ohms = float(match.group('r'))
    if match.group('k'):
        ohms *= 1000.0
    return LoadState.resistive(ohms)


@dataclass(frozen=True)
class StageSet:
    """
    Selectable amplitudes of the capacitive and inductive networks.
    """
    amplitudes: Tuple[float, ...] = (0.3, 0.6, 0.9)

    def __post_init__(self):
        if not self.amplitudes:
            raise ParameterError("a stage set needs at least one amplitude")
        for amp in self.amplitudes:
            if not 0 < amp <= 1:
                raise ParameterError(f"stage amplitudes must lie in (0, 1], got {amp}")
        for prev, nxt in zip(self.amplitudes, self.amplitudes[1:]):
            if not nxt > prev:
                raise ParameterError("stage amplitudes must be strictly ascending")

    def max_quantization_distance(self) -> float:
        """
        Half the largest gap in {0} plus the stage amplitudes.
        """
        levels = (0.0,) + tuple(self.amplitudes)
        return max(b - a for a, b in zip(levels, levels[1:])) / 2.0


@dataclass(frozen=True)
class ReflectionTarget:
    """
    Desired reflected amplitude a_r in [0, 1] and phase phi_r in [-pi, pi].
    """
    a_r: float
    phi_r: float

    def __post_init__(self):
        if not 0 <= self.a_r <= 1:
            raise ParameterError(f"a_r must lie in [0, 1], got {self.a_r}")
        if not -math.pi <= self.phi_r <= math.pi:
            raise ParameterError(f"phi_r must lie in [-pi, pi], got {self.phi_r}")

    @property
    def coefficient(self) -> complex:
        return complex(self.a_r * math.cos(self.phi_r), self.a_r * math.sin(self.phi_r))


@dataclass(frozen=True)
class LayerAssignment:
    """
    Loads behind the in-phase layer (layer1) and the quadrature layer (layer2).
    """
    layer1: LoadState
    layer2: LoadState

    @property
    def tokens(self) -> Tuple[str, str]:
        return self.layer1.token, self.layer2.token

    @classmethod
    def from_tokens(cls, layer1: str, layer2: str) -> 'LayerAssignment':
        return cls(parse_load_token(layer1), parse_load_token(layer2))


@dataclass(frozen=True)
class CombinedGamma:
    """
    Two-layer reflection: total is the plain sum of the layer coefficients,
    normalized divides by the open-open reference (2).
    """
    normalized: complex
    total: complex

    @property
    def magnitude(self) -> float:
        return abs(self.normalized)

    @property
    def phase_deg(self) -> float:
        return math.degrees(math.atan2(self.normalized.imag, self.normalized.real))
