import sys
from pathlib import Path

import pytest

from rcmt.sdf import parse_sdf

DATA = Path(__file__).parent / "data"
sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture(scope="session")
def showcase_text():
    return (DATA / "showcase.sdf").read_text()


@pytest.fixture(scope="session")
def showcase_record(showcase_text):
    return parse_sdf(showcase_text)[0]


@pytest.fixture(scope="session")
def showcase(showcase_record):
    return showcase_record.graph


@pytest.fixture(scope="session")
def qm9_text():
    return (DATA / "qm9_sample.sdf").read_text()


@pytest.fixture(scope="session")
def qm9_records(qm9_text):
    return parse_sdf(qm9_text)


def pytest_terminal_summary(terminalreporter):
    from helpers import ACCEPTANCE

    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
