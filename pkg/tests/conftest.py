import pytest

from econsim.config import default_scenario_path, load_scenario

from .testworld import mini_config  # noqa: F401  (fixture helper import)


@pytest.fixture(scope="session")
def default_config():
    return load_scenario(default_scenario_path("market_life"))


@pytest.fixture(scope="session")
def strat_config():
    return load_scenario(default_scenario_path("stratification"))
