from pathlib import Path

import pytest

from hybridssd.flash import TierConfig
from hybridssd.trace import parse_csv, parse_msr

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def toy_tiers():
    """2 tiers x 8 blocks x 8 pages."""
    return (
        TierConfig.slc(num_blocks=8, pages_per_block=8),
        TierConfig.mlc(num_blocks=8, pages_per_block=8),
    )


def fixture_traces():
    return {
        "rsrch_sample.msr.csv": parse_msr((FIXTURES / "rsrch_sample.msr.csv").read_text()),
        "stg_sample.csv": parse_csv((FIXTURES / "stg_sample.csv").read_text()),
    }


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")
    config._acceptance = {}


def pytest_runtest_makereport(item, call):
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    results = item.config._acceptance
    number, title = mark.args
    failed = call.excinfo is not None and call.when in ("setup", "call")
    if call.when == "call" or failed:
        results[number] = (title, "FAIL" if failed else "PASS")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = getattr(config, "_acceptance", {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        title, status = results[number]
        terminalreporter.write_line(f"{status}  criterion {number:2d}: {title}")
