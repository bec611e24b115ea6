"""
Scenario configuration model: the validated sections of a JSON scenario file.
"""
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from src.models.array import ArrayScenario
from src.models.loads import LayerAssignment
from src.models.network import AnnealConfig, FrequencyBand
from src.models.signals import MultipathChannel, SourceBurst


@dataclass
class ScenarioConfig:
    """
    Settings for one simulator run. Sections left out of the file fall back
    to their defaults; file references are absolute after loading.
    """
    transducer: Dict[str, Any] = field(default_factory=dict)
    band: Dict[str, Any] = field(default_factory=dict)
    anneal: Dict[str, Any] = field(default_factory=dict)
    array: Dict[str, Any] = field(default_factory=dict)
    scheme: str = 'iq'
    channel: Dict[str, Any] = field(default_factory=dict)
    burst: Dict[str, Any] = field(default_factory=dict)
    extraction: Dict[str, Any] = field(default_factory=dict)
    z0: float = 1000.0
    log_level: str = 'WARNING'
    log_retention_days: int = 3
    log_dir: Optional[str] = None
    source_path: Optional[str] = None

    @property
    def sweep_paths(self) -> List[str]:
        return list(self.transducer.get('sweeps', []))

    @property
    def endpoints_path(self) -> Optional[str]:
        return self.transducer.get('endpoints')

    @property
    def n_d(self) -> int:
        return int(self.transducer.get('n_d', 9))

    @property
    def resonance_hz(self) -> float:
        return float(self.transducer.get('resonance_hz', 28_200.0))

    @property
    def weighting(self) -> str:
        return str(self.transducer.get('weighting', 'modulus'))

    def frequency_band(self) -> FrequencyBand:
        return FrequencyBand.from_dict(self.band)

    def anneal_config(self) -> AnnealConfig:
        return AnnealConfig.from_dict(self.anneal)

    def array_scenario(self) -> ArrayScenario:
        data = dict(self.array)
        data.setdefault('z0_ohms', self.z0)
        return ArrayScenario.from_dict(data)

    @property
    def table1_path(self) -> Optional[str]:
        return self.array.get('table1')

    def multipath_channel(self) -> MultipathChannel:
        return MultipathChannel.from_dict(self.channel)

    def source_burst(self) -> SourceBurst:
        return SourceBurst.from_dict(self.burst)

    @property
    def window_fraction(self) -> float:
        return float(self.extraction.get('window_fraction', 0.5))

    def load_assignments(self) -> List[LayerAssignment]:
        pairs: List[Tuple[str, str]] = self.extraction.get('loads', [['R2000', 'C09'], ['Sh', 'L09']])
        return [LayerAssignment.from_tokens(first, second) for first, second in pairs]

    def to_dict(self) -> Dict[str, Any]:
        return {
            'transducer': self.transducer,
            'band': self.band,
            'anneal': self.anneal,
            'array': self.array,
            'scheme': self.scheme,
            'channel': self.channel,
            'burst': self.burst,
            'extraction': self.extraction,
            'z0_ohms': self.z0,
            'log_level': self.log_level,
            'log_retention_days': self.log_retention_days,
            'log_dir': self.log_dir,
        }
