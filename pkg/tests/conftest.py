import pytest

from seqfuse.cli import PRESETS, scenario_from_dict


@pytest.fixture(scope="session")
def example1():
    return scenario_from_dict(PRESETS["example1"]())


@pytest.fixture(scope="session")
def example2():
    return scenario_from_dict(PRESETS["example2"]())


@pytest.fixture(scope="session")
def fig3():
    return scenario_from_dict(PRESETS["csprt-fig3"]())


@pytest.fixture(scope="session")
def glr_fading():
    return scenario_from_dict(PRESETS["glr-fading"]())
