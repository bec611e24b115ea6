import os

import pytest

from src.acoustics import matching_network, transducer_model
from src.config.config_manager import ConfigManager
from src.models.network import AnnealConfig, FrequencyBand
from src.utils import data_files

DATA_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'data')


@pytest.fixture
def data_dir():
    return DATA_DIR


@pytest.fixture
def endpoints():
    """(alpha, beta) pinned to the 9 degC and 22 degC measurements."""
    return data_files.read_envelope_endpoints(os.path.join(DATA_DIR, 'fig4_endpoints.yaml'))


@pytest.fixture
def envelope(endpoints):
    alpha, beta = endpoints
    return transducer_model.build_envelope(alpha, beta, 9)


@pytest.fixture
def band():
    return FrequencyBand()


@pytest.fixture
def quick_anneal():
    return AnnealConfig(iterations_per_temperature=20, temperature_levels=10, restarts=2)


@pytest.fixture
def fig12_config():
    return ConfigManager(os.path.join(DATA_DIR, 'scenarios', 'fig12.json')).load()


@pytest.fixture
def fig14_config():
    return ConfigManager(os.path.join(DATA_DIR, 'scenarios', 'fig14.json')).load()


@pytest.fixture(scope='session')
def matched():
    """Network synthesized on the shipped envelope with the default schedule and seed 42."""
    alpha, beta = data_files.read_envelope_endpoints(os.path.join(DATA_DIR, 'fig4_endpoints.yaml'))
    envelope = transducer_model.build_envelope(alpha, beta, 9)
    band = FrequencyBand()
    network, report = matching_network.synthesize_network(envelope, band, 1000.0, AnnealConfig())
    return envelope, band, network, report
