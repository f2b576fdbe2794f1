import json
from pathlib import Path

import pytest

from contractbandit.domain import instance_digest, load_instance

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def instance_a_path():
    return DATA / "instance_a.json"


@pytest.fixture(scope="session")
def instance_a(instance_a_path):
    """(outcomes, agent, digest) for the reference two-outcome instance."""
    outcomes, agent = load_instance(instance_a_path)
    digest = instance_digest(json.loads(instance_a_path.read_text()))
    return outcomes, agent, digest


@pytest.fixture(scope="session")
def frozen(instance_a_path):
    """Regression values pinned by scripts/make_fixtures.py."""
    return json.loads((DATA / "fixtures.json").read_text())
