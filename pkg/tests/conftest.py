from pathlib import Path

import pytest

from petdensity.models import DensityModel

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def gaussian():
    return DensityModel.gaussian()


@pytest.fixture
def disk():
    return DensityModel.disk()


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for number in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[number])
