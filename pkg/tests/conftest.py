from pathlib import Path

import pytest
from hypothesis import settings

from selmer_companions.modpoly import ModPolyStore

ROOT = Path(__file__).resolve().parents[1]
DATA_DIR = ROOT / "data"
FIXTURES = Path(__file__).resolve().parent / "fixtures"


@pytest.fixture(scope="session")
def store():
    return ModPolyStore(DATA_DIR)


@pytest.fixture(scope="session")
def data_dir():
    return DATA_DIR


settings.register_profile("exact", deadline=None, derandomize=True)
settings.load_profile("exact")

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
