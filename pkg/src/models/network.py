"""
Matching-network data types: L-section tiers, the cascaded network, the
design band and the simulated annealing configuration.
"""
import math
from dataclasses import dataclass, field, replace
from typing import Dict, List, Tuple

import numpy as np

from src.models.errors import ParameterError


@dataclass(frozen=True)
class LMatchTier:
    """
    One high-pass L-section: series capacitor c_m followed by shunt inductor l_m.
    """
    c_m: float
    l_m: float

    def __post_init__(self):
        if not (self.c_m > 0 and self.l_m > 0):
            raise ParameterError(f"tier components must be positive (c_m={self.c_m}, l_m={self.l_m})")
        object.__setattr__(self, 'c_m', float(self.c_m))
        object.__setattr__(self, 'l_m', float(self.l_m))


@dataclass(frozen=True)
class CascadedNetwork:
    """
    Tiers ordered from the PZT outwards, terminated in z0.
    """
    tiers: Tuple[LMatchTier, ...]
    z0: float = 1000.0

    def __post_init__(self):
        if not 1 <= len(self.tiers) <= 3:
            raise ParameterError(f"a cascaded network has 1-3 tiers, got {len(self.tiers)}")
        if not self.z0 > 0:
            raise ParameterError(f"z0 must be > 0, got {self.z0}")

    def prefix(self, count: int) -> 'CascadedNetwork':
        return CascadedNetwork(self.tiers[:count], self.z0)

    def to_dict(self) -> Dict[str, float]:
        """
        Flat key-value form used by the network file.

        Returns:
            Dict[str, float]: keys tier_i.c_farads, tier_i.l_henries and z0_ohms
        """
        data = {'z0_ohms': float(self.z0)}
        for index, tier in enumerate(self.tiers, start=1):
            data[f'tier_{index}.c_farads'] = tier.c_m
            data[f'tier_{index}.l_henries'] = tier.l_m
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, float]) -> 'CascadedNetwork':
        tiers = []
        index = 1
        while f'tier_{index}.c_farads' in data:
            tiers.append(LMatchTier(float(data[f'tier_{index}.c_farads']),
                                    float(data[f'tier_{index}.l_henries'])))
            index += 1
        return cls(tuple(tiers), float(data.get('z0_ohms', 1000.0)))


@dataclass(frozen=True)
class FrequencyBand:
    """
    Design band [f_low, f_high] sampled on a uniform grid.
    """
    f_low: float = 27_500.0
    f_high: float = 28_500.0
    n_grid: int = 41

    def __post_init__(self):
        if not 0 < self.f_low < self.f_high:
            raise ParameterError(f"band needs 0 < f_low < f_high (got {self.f_low}, {self.f_high})")
        if self.n_grid < 2:
            raise ParameterError(f"n_grid must be >= 2, got {self.n_grid}")

    def grid(self) -> np.ndarray:
        return np.linspace(self.f_low, self.f_high, self.n_grid)

    @property
    def center(self) -> float:
        return 0.5 * (self.f_low + self.f_high)

    @classmethod
    def from_dict(cls, data: dict) -> 'FrequencyBand':
        return cls(
            f_low=float(data.get('f_low_hz', 27_500.0)),
            f_high=float(data.get('f_high_hz', 28_500.0)),
            n_grid=int(data.get('n_grid', 41)),
        )


@dataclass(frozen=True)
class AnnealConfig:
    """
    Simulated annealing schedule for one tier.

    The search runs in (log10 c_m, log10 l_m); temperature acts on the cost
    normalized by the cost of each restart's starting point.
    """
    initial_temperature: float = 1.0
    cooling_factor: float = 0.95
    iterations_per_temperature: int = 200
    temperature_levels: int = 20
    restarts: int = 8
    seed: int = 42
    log10_c_bounds: Tuple[float, float] = (-9.0, -4.0)
    log10_l_bounds: Tuple[float, float] = (-5.0, 1.0)
    step_scale: float = 0.1
    polish: bool = True
    threads: int = 1

    def __post_init__(self):
        if not 0 < self.cooling_factor < 1:
            raise ParameterError(f"cooling_factor must lie in (0, 1), got {self.cooling_factor}")
        if not self.initial_temperature > 0:
            raise ParameterError("initial_temperature must be > 0")
        for name in ('iterations_per_temperature', 'temperature_levels', 'restarts', 'threads'):
            if getattr(self, name) < 1:
                raise ParameterError(f"{name} must be >= 1")
        for name in ('log10_c_bounds', 'log10_l_bounds'):
            low, high = getattr(self, name)
            if not (math.isfinite(low) and math.isfinite(high) and low < high):
                raise ParameterError(f"{name} must be finite with low < high, got {(low, high)}")

    def with_budget(self, iterations_per_temperature: int) -> 'AnnealConfig':
        return replace(self, iterations_per_temperature=iterations_per_temperature)

    @classmethod
    def from_dict(cls, data: dict) -> 'AnnealConfig':
        defaults = cls()
        return cls(
            initial_temperature=float(data.get('initial_temperature', defaults.initial_temperature)),
            cooling_factor=float(data.get('cooling_factor', defaults.cooling_factor)),
            iterations_per_temperature=int(data.get('iterations_per_temperature',
                                                    defaults.iterations_per_temperature)),
            temperature_levels=int(data.get('temperature_levels', defaults.temperature_levels)),
            restarts=int(data.get('restarts', defaults.restarts)),
            seed=int(data.get('seed', defaults.seed)),
            log10_c_bounds=tuple(data.get('log10_c_bounds', defaults.log10_c_bounds)),
            log10_l_bounds=tuple(data.get('log10_l_bounds', defaults.log10_l_bounds)),
            step_scale=float(data.get('step_scale', defaults.step_scale)),
            polish=bool(data.get('polish', defaults.polish)),
            threads=int(data.get('threads', defaults.threads)),
        )


@dataclass(frozen=True)
class TierResult:
    """
    Best tier found by the annealer together with its P1 cost.
    """
    tier: LMatchTier
    cost: float
    restart_costs: Tuple[float, ...] = field(default_factory=tuple)
    accepted_max_cost: float = 0.0


@dataclass(frozen=True)
class MatchReportRow:
    entry_index: int
    tier_count: int
    freq_hz: float
    gamma_mag: float


@dataclass
class MatchReport:
    """
    Per-tier costs plus |Gamma| for every envelope entry at its designated
    tier count.
    """
    tier_results: List[TierResult]
    rows: List[MatchReportRow]

    def worst_case(self) -> Dict[int, float]:
        worst: Dict[int, float] = {}
        for row in self.rows:
            worst[row.entry_index] = max(worst.get(row.entry_index, 0.0), row.gamma_mag)
        return worst

    @property
    def total_cost(self) -> float:
        return sum(result.cost for result in self.tier_results)
