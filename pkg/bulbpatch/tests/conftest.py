"""
Shared test fixtures for the bulbpatch test suite.

Experiment-scale ordering checks are marked ``slow`` and only run with
``--runslow``.
"""

import pytest

from bulbpatch.config.settings import get_settings
from bulbpatch.core.detect import ToyTemplateDetector
from bulbpatch.core.scenegen import SceneConfig, make_dataset


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run slow experiment tests")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: experiment-scale test, needs --runslow")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture(autouse=True)
def isolated_settings(monkeypatch):
    """Environment-independent runtime settings for every test."""
    for name in ("BULBPATCH_CONFIG_PATH", "BULBPATCH_LOG_LEVEL", "BULBPATCH_WORKERS"):
        monkeypatch.delenv(name, raising=False)
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def toy_detector():
    return ToyTemplateDetector()


@pytest.fixture(scope="session")
def small_scene_config():
    return SceneConfig(width=256, height=256, persons=(1, 1), person_height=(130.0, 200.0))


@pytest.fixture(scope="session")
def small_dataset(small_scene_config):
    return make_dataset(0, 4, 3, small_scene_config)
