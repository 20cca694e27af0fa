import sys
from pathlib import Path

import pytest

REPO = Path(__file__).resolve().parents[1]
DATA = REPO / "data"
sys.path.insert(0, str(Path(__file__).parent))

from chokegor.fluids import load_fluid_system, normalize
from chokegor.process import forward_timeseries, read_profile_csv
from chokegor.estimator import SeedPair


@pytest.fixture(scope="session")
def fluid():
    return load_fluid_system(DATA / "spe5_fluid.json")


@pytest.fixture(scope="session")
def spe5_feed(fluid):
    """Oil-rich anchor wellstream (the fixture profile's day-0 feed)."""
    return normalize([0.50, 0.03, 0.07, 0.20, 0.15, 0.05])


@pytest.fixture(scope="session")
def fixture_profile(fluid):
    return read_profile_csv(DATA / "fixture_profile.csv", fluid)


@pytest.fixture(scope="session")
def forward_run(fluid, fixture_profile):
    """Forward model over the bundled 100-step profile (computed once)."""
    result = forward_timeseries(fluid, fixture_profile)
    assert not result.failures
    return result


@pytest.fixture(scope="session")
def day0_seeds(forward_run):
    t0 = forward_run.truths[0]
    return SeedPair(oil=t0.streams.oil, gas=t0.streams.gas, provenance="day 0")
