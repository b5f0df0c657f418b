from pathlib import Path

import pytest

from pumbilic.io import load_jet

JET_DIR = Path(__file__).resolve().parents[1] / "jets"


@pytest.fixture(scope="session")
def fixtures():
    return {f"J{i}": load_jet(JET_DIR / f"J{i}.json") for i in range(1, 6)}


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import REPORT

    if REPORT:
        terminalreporter.section("acceptance criteria")
        for num in sorted(REPORT):
            terminalreporter.write_line(REPORT[num])
