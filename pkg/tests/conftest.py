import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from cegio.scenario import BUILTIN_SCENARIOS  # noqa: E402


@pytest.fixture
def setting1():
    return BUILTIN_SCENARIOS["setting1"]


@pytest.fixture
def setting2():
    return BUILTIN_SCENARIOS["setting2"]


@pytest.fixture
def open_field():
    return BUILTIN_SCENARIOS["open"]
