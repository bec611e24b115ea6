"""
Configuration manager for loading and validating scenario files.
"""
import json
import os
from typing import Any, Dict, Optional

from src.models.errors import ConfigError
from src.models.scenario import ScenarioConfig

_SECTION_KEYS = {
    'transducer': {'sweeps', 'endpoints', 'angle_table', 'n_d', 'resonance_hz', 'weighting'},
    'band': {'f_low_hz', 'f_high_hz', 'n_grid'},
    'anneal': {'initial_temperature', 'cooling_factor', 'iterations_per_temperature', 'temperature_levels',
               'restarts', 'seed', 'log10_c_bounds', 'log10_l_bounds', 'step_scale', 'polish', 'threads'},
    'array': {'frequency_hz', 'sound_speed_mps', 'amplitude_pa', 'incident_angle_deg', 'steer_angle_deg',
              'element_count', 'spacing_m', 'spacing_wavelengths', 'positions_m', 'ring_center_m',
              'ring_radius_m', 'ring_count', 'stages', 'z0_ohms', 'table1', 'focus_radius_m', 'backed'},
    'channel': {'ambient_taps', 'reflector_delays_s'},
    'burst': {'carrier_hz', 'cycles', 'initial_phase_rad', 'sample_rate_hz', 'amplitude'},
    'extraction': {'window_fraction', 'loads'},
}
_TOP_KEYS = set(_SECTION_KEYS) | {'scheme', 'z0_ohms', 'log_level', 'log_retention_days', 'log_dir', 'description'}
_PATH_KEYS = {
    'transducer': ('sweeps', 'endpoints', 'angle_table'),
    'array': ('table1',),
}


class ConfigManager:
    """
    Loads a JSON scenario file into a ScenarioConfig.

    Unknown keys are rejected so a misspelt setting never falls back to a
    default silently. File references are resolved against the directory of
    the scenario file.
    """

    def __init__(self, config_path: Optional[str] = None):
        """
        Initialize the configuration manager.

        Args:
            config_path: Path to the scenario file; None gives the defaults
        """
        self.config_path = config_path
        self.config_data: Dict[str, Any] = {}
        self.config = ScenarioConfig()

    def load(self) -> ScenarioConfig:
        """
        Load, validate and resolve the scenario file.

        Returns:
            ScenarioConfig: The validated configuration
        """
        if self.config_path is None:
            return self.config
        if not os.path.exists(self.config_path):
            raise ConfigError(f"configuration file {self.config_path} not found")

        try:
            with open(self.config_path, 'r', encoding='utf-8') as f:
                self.config_data = json.load(f)
        except json.JSONDecodeError as e:
            raise ConfigError(f"{self.config_path}:{e.lineno}: {e.msg}")
        if not isinstance(self.config_data, dict):
            raise ConfigError(f"{self.config_path}: expected a JSON object at the top level")

        self._check_keys(self.config_data)
        base_dir = os.path.dirname(os.path.abspath(self.config_path))
        sections = {name: self._resolve_paths(name, dict(self.config_data.get(name, {})), base_dir)
                    for name in _SECTION_KEYS}

        log_dir = self.config_data.get('log_dir')
        self.config = ScenarioConfig(
            scheme=str(self.config_data.get('scheme', 'iq')),
            z0=float(self.config_data.get('z0_ohms', 1000.0)),
            log_level=str(self.config_data.get('log_level', 'WARNING')),
            log_retention_days=int(self.config_data.get('log_retention_days', 3)),
            log_dir=os.path.join(base_dir, log_dir) if log_dir else None,
            source_path=os.path.abspath(self.config_path),
            **sections,
        )
        return self.config

    def _check_keys(self, data: Dict[str, Any]):
        unknown = sorted(set(data) - _TOP_KEYS)
        if unknown:
            raise ConfigError(f"{self.config_path}: unknown keys {', '.join(unknown)}")
        for name, allowed in _SECTION_KEYS.items():
            section = data.get(name, {})
            if not isinstance(section, dict):
                raise ConfigError(f"{self.config_path}: section '{name}' must be an object")
            unknown = sorted(set(section) - allowed)
            if unknown:
                raise ConfigError(f"{self.config_path}: unknown keys in '{name}': {', '.join(unknown)}")

    def _resolve_paths(self, name: str, section: Dict[str, Any], base_dir: str) -> Dict[str, Any]:
        for key in _PATH_KEYS.get(name, ()):
            if key not in section:
                continue
            value = section[key]
            paths = value if isinstance(value, list) else [value]
            resolved = []
            for path in paths:
                full = os.path.normpath(os.path.join(base_dir, path))
                if not os.path.exists(full):
                    raise ConfigError(f"{self.config_path}: {name}.{key} refers to missing file {path}")
                resolved.append(full)
            section[key] = resolved if isinstance(value, list) else resolved[0]
        return section

    def get_log_level(self) -> str:
        return self.config.log_level

    def get_log_retention_days(self) -> int:
        return self.config.log_retention_days

    def get_log_dir(self) -> Optional[str]:
        return self.config.log_dir
