import json
import os

import pytest

from src.config.config_manager import ConfigManager
from src.models.errors import ConfigError


def write_config(tmp_path, data, name='scenario.json'):
    path = tmp_path / name
    path.write_text(json.dumps(data), encoding='utf-8')
    return str(path)


def test_no_file_gives_defaults():
    manager = ConfigManager()
    config = manager.load()
    assert config.scheme == 'iq'
    assert config.z0 == 1000.0
    assert config.n_d == 9
    assert config.resonance_hz == 28_200.0
    assert manager.get_log_level() == 'WARNING'
    assert manager.get_log_retention_days() == 3
    assert manager.get_log_dir() is None
    assert config.frequency_band().n_grid == 41
    assert config.anneal_config().restarts == 8


def test_shipped_scenario_resolves_the_load_table(fig12_config, data_dir):
    assert fig12_config.table1_path == os.path.normpath(os.path.join(data_dir, 'table1.json'))
    scenario = fig12_config.array_scenario()
    assert scenario.steer_deg == 45.0
    assert scenario.ring.count == 72
    assert scenario.stages.amplitudes == (0.3, 0.6, 1.0)


def test_comparison_scenario_loads(fig14_config):
    assert fig14_config.scheme == 'all'
    scenario = fig14_config.array_scenario()
    assert scenario.focus_distance == 0.75
    assert scenario.array.backed


def test_array_backing_and_focus_keys(tmp_path):
    config = ConfigManager(write_config(tmp_path, {'array': {'backed': False, 'focus_radius_m': 2.5}})).load()
    scenario = config.array_scenario()
    assert not scenario.array.backed
    assert scenario.focus_distance == 2.5
    assert ConfigManager().load().array_scenario().focus_distance is None


def test_missing_file():
    with pytest.raises(ConfigError):
        ConfigManager('/nonexistent/scenario.json').load()


def test_invalid_json(tmp_path):
    path = tmp_path / 'broken.json'
    path.write_text('{"scheme": ', encoding='utf-8')
    with pytest.raises(ConfigError):
        ConfigManager(str(path)).load()


def test_top_level_must_be_an_object(tmp_path):
    with pytest.raises(ConfigError):
        ConfigManager(write_config(tmp_path, [1, 2, 3])).load()


def test_unknown_top_level_key(tmp_path):
    with pytest.raises(ConfigError) as info:
        ConfigManager(write_config(tmp_path, {'shceme': 'iq'})).load()
    assert 'shceme' in str(info.value)


def test_unknown_section_key(tmp_path):
    with pytest.raises(ConfigError) as info:
        ConfigManager(write_config(tmp_path, {'anneal': {'restart': 3}})).load()
    assert 'restart' in str(info.value)


def test_section_must_be_an_object(tmp_path):
    with pytest.raises(ConfigError):
        ConfigManager(write_config(tmp_path, {'band': [27_500, 28_500]})).load()


def test_missing_referenced_file(tmp_path):
    with pytest.raises(ConfigError):
        ConfigManager(write_config(tmp_path, {'transducer': {'sweeps': ['nowhere.csv']}})).load()


def test_paths_resolve_against_the_scenario_directory(tmp_path):
    (tmp_path / 'sweep.csv').write_text("freq_hz,re_ohm,im_ohm\n1000,10,-5\n", encoding='utf-8')
    nested = tmp_path / 'scenarios'
    nested.mkdir()
    config = ConfigManager(write_config(nested, {
        'transducer': {'sweeps': ['../sweep.csv'], 'n_d': 6},
        'log_dir': 'logs',
        'log_level': 'DEBUG',
    })).load()
    assert config.sweep_paths == [str(tmp_path / 'sweep.csv')]
    assert config.n_d == 6
    assert config.log_dir == str(nested / 'logs')
    assert config.log_level == 'DEBUG'


def test_section_values_reach_the_models(tmp_path):
    config = ConfigManager(write_config(tmp_path, {
        'band': {'f_low_hz': 27_000, 'f_high_hz': 29_000, 'n_grid': 11},
        'anneal': {'restarts': 3, 'log10_c_bounds': [-8, -6]},
        'burst': {'carrier_hz': 41_100, 'cycles': 100},
        'channel': {'ambient_taps': [{'amplitude': 1.0, 'delay_s': 0.0}], 'reflector_delays_s': [0.001]},
        'extraction': {'loads': [['Op', 'C06']]},
    })).load()
    assert config.frequency_band().center == 28_000.0
    assert config.anneal_config().log10_c_bounds == (-8, -6)
    assert config.source_burst().sample_rate == 8 * 41_100.0
    assert config.multipath_channel().reflector_delays == (0.001,)
    assert [a.tokens for a in config.load_assignments()] == [('Op', 'C06')]
