import json
import sys
from pathlib import Path

import pytest

TESTS = Path(__file__).resolve().parent
sys.path.insert(0, str(TESTS))

GOLDEN = TESTS / "golden"


def load_golden(name):
    return json.loads((GOLDEN / name).read_text())


@pytest.fixture
def golden():
    return load_golden
