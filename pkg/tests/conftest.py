import time

import pytest

from elastica.campaign import CampaignConfig, run_campaign

REFERENCE_SEED = 12345
# wall-clock seconds spent building each reference campaign
TIMINGS = {}


def _timed(name, config):
    start = time.perf_counter()
    records = run_campaign(config)
    TIMINGS[name] = time.perf_counter() - start
    return records


@pytest.fixture(scope="session")
def reference_with_input():
    """The 723-trial reference campaign with the random input applied."""
    return _timed("with_input", CampaignConfig(trials=723, master_seed=REFERENCE_SEED, with_input=True))


@pytest.fixture(scope="session")
def reference_no_input():
    return _timed("no_input", CampaignConfig(trials=500, master_seed=REFERENCE_SEED, with_input=False))
