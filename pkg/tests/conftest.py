from pathlib import Path

import pytest

from ipps.core import parse_set_system

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures_dir():
    return FIXTURES


@pytest.fixture
def hamming_system():
    return parse_set_system((FIXTURES / "hamming_ks_system.json").read_text())
