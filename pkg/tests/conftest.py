import json
from pathlib import Path

import numpy as np
import pytest

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def oracle_pins():
    with open(FIXTURES / "oracle_pins.json", encoding="utf-8") as handle:
        return json.load(handle)["scenarios"]


def random_spectrum(rng, p):
    """Uniform draw from the ordered probability simplex."""
    return np.sort(rng.dirichlet(np.ones(p)))[::-1]
