import json
import sys
from pathlib import Path

import pytest
from hypothesis import settings

FIXTURES = Path(__file__).parent / "fixtures"
sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("confquant", max_examples=40, deadline=None)
settings.load_profile("confquant")


def load_fixture(name):
    return json.loads((FIXTURES / name).read_text())


@pytest.fixture
def model_metrics():
    return load_fixture("model_metrics.json")


@pytest.fixture
def z_witness():
    return load_fixture("z_witness_n3.json")
