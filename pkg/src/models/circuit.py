"""
Circuit-level data types for a single PZT layer: impedances, equivalent-circuit
parameters, measured sweeps and the discretized impedance envelope.
"""
import cmath
import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from src.models.errors import ParameterError

# An impedance is carried as a plain Python complex: R + jX in ohms.
Impedance = complex


def check_impedance(z: complex, name: str = 'impedance') -> complex:
    """
    Validate that an impedance has finite components.

    Args:
        z: The impedance to check
        name: Label used in the error message

    Returns:
        complex: The same impedance, for chaining
    """
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ParameterError(f"{name} must be finite, got {z}")
    return complex(z)


@dataclass(frozen=True)
class MechanicalBranch:
    """
    Secondary (mechanical) side of the PZT equivalent circuit.
    """
    r_m: float
    l_m: float
    c_m: float
    z_rad: complex = 0j
    turns_ratio: float = 1.0

    def __post_init__(self):
        if not (self.r_m > 0 and self.l_m > 0 and self.c_m > 0):
            raise ParameterError(
                f"mechanical branch needs r_m, l_m, c_m > 0 (got {self.r_m}, {self.l_m}, {self.c_m})")
        check_impedance(self.z_rad, 'z_rad')
        if not math.isfinite(self.turns_ratio):
            raise ParameterError("turns_ratio must be finite")

    @classmethod
    def from_dict(cls, data: dict) -> 'MechanicalBranch':
        return cls(
            r_m=float(data['r_m_ohms']),
            l_m=float(data['l_m_henries']),
            c_m=float(data['c_m_farads']),
            z_rad=complex(float(data.get('z_rad_re_ohms', 0.0)), float(data.get('z_rad_im_ohms', 0.0))),
            turns_ratio=float(data.get('turns_ratio', 1.0)),
        )

    def to_dict(self) -> dict:
        return {
            'r_m_ohms': self.r_m,
            'l_m_henries': self.l_m,
            'c_m_farads': self.c_m,
            'z_rad_re_ohms': self.z_rad.real,
            'z_rad_im_ohms': self.z_rad.imag,
            'turns_ratio': self.turns_ratio,
        }


@dataclass(frozen=True)
class PztCircuitParams:
    """
    Electrical-equivalent parameters of one PZT layer.

    r_e and c_e are the dielectric loss resistance and capacitance, re_zs_eff the
    mechanical resistance seen through the transformer. The full mechanical
    branch is optional and only needed by the unsimplified model.
    """
    r_e: float
    c_e: float
    re_zs_eff: float
    mechanical: Optional[MechanicalBranch] = None

    def __post_init__(self):
        if not self.r_e > 0:
            raise ParameterError(f"r_e must be > 0, got {self.r_e}")
        if not self.c_e > 0:
            raise ParameterError(f"c_e must be > 0, got {self.c_e}")
        if not self.re_zs_eff >= 0:
            raise ParameterError(f"re_zs_eff must be >= 0, got {self.re_zs_eff}")

    @classmethod
    def from_dict(cls, data: dict) -> 'PztCircuitParams':
        """
        Create parameters from a dictionary (as written by to_dict).

        Args:
            data: Dictionary with r_e_ohms, c_e_farads, re_zs_eff_ohms and an
                optional 'mechanical' section

        Returns:
            PztCircuitParams: New instance
        """
        mechanical = data.get('mechanical')
        return cls(
            r_e=float(data['r_e_ohms']),
            c_e=float(data['c_e_farads']),
            re_zs_eff=float(data['re_zs_eff_ohms']),
            mechanical=MechanicalBranch.from_dict(mechanical) if mechanical else None,
        )

    def to_dict(self) -> dict:
        data = {
            'r_e_ohms': self.r_e,
            'c_e_farads': self.c_e,
            're_zs_eff_ohms': self.re_zs_eff,
        }
        if self.mechanical is not None:
            data['mechanical'] = self.mechanical.to_dict()
        return data


@dataclass(frozen=True)
class ImpedanceSweep:
    """
    Impedance measured at strictly increasing frequencies.
    """
    entries: Tuple[Tuple[float, complex], ...]

    def __post_init__(self):
        freqs = [f for f, _ in self.entries]
        for prev, nxt in zip(freqs, freqs[1:]):
            if not nxt > prev:
                raise ParameterError(f"sweep frequencies must be strictly increasing ({prev} then {nxt})")
        for f, z in self.entries:
            if not f > 0:
                raise ParameterError(f"sweep frequency must be > 0, got {f}")
            check_impedance(z, f'impedance at {f} Hz')

    @classmethod
    def from_pairs(cls, freqs, impedances) -> 'ImpedanceSweep':
        return cls(tuple((float(f), complex(z)) for f, z in zip(freqs, impedances)))

    @property
    def frequencies(self) -> List[float]:
        return [f for f, _ in self.entries]

    @property
    def impedances(self) -> List[complex]:
        return [z for _, z in self.entries]

    def __len__(self) -> int:
        return len(self.entries)

    def magnitude_at(self, f: float) -> float:
        """
        Impedance magnitude at the sample closest to f.
        """
        _, z = min(self.entries, key=lambda entry: abs(entry[0] - f))
        return abs(z)


@dataclass(frozen=True)
class ImpedanceEnvelope:
    """
    Discretized family of circuit parameters spanning the environmental
    extremes. Entry 1 is the beta end, entry n_d the alpha end.
    """
    entries: Tuple[PztCircuitParams, ...]

    def __post_init__(self):
        if len(self.entries) < 2:
            raise ParameterError(f"an envelope needs at least 2 entries, got {len(self.entries)}")

    @property
    def n_d(self) -> int:
        return len(self.entries)

    def entry(self, index: int) -> PztCircuitParams:
        """
        Return the 1-based entry, matching the numbering used in reports.
        """
        if not 1 <= index <= self.n_d:
            raise ParameterError(f"envelope index {index} outside 1..{self.n_d}")
        return self.entries[index - 1]

    def triples(self) -> List[Tuple[PztCircuitParams, ...]]:
        return [self.entries[i:i + 3] for i in range(0, self.n_d, 3)]


@dataclass(frozen=True)
class FitResult:
    """
    Outcome of a least-squares fit of the simplified model.
    """
    params: PztCircuitParams
    residual: float
    n_starts: int = 1
    evaluations: int = 0
    history: Tuple[float, ...] = field(default_factory=tuple)


def polar_deg(z: complex) -> Tuple[float, float]:
    """
    Magnitude and phase in degrees of a complex number.
    """
    return abs(z), math.degrees(cmath.phase(z))


@dataclass(frozen=True)
class AngleImpedance:
    """
    Layer impedance recorded at one incident angle. Either part may be
    missing when only the resistance or the reactance was reported.
    """
    layer: int
    angle_deg: float
    resistance: Optional[float]
    reactance: Optional[float]

    @property
    def impedance(self) -> Optional[complex]:
        if self.resistance is None or self.reactance is None:
            return None
        return complex(self.resistance, self.reactance)
