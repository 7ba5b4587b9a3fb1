import pytest

from metadice import get_preset, make_dice

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def sid():
    return get_preset("sid")


@pytest.fixture(scope="session")
def cid():
    return get_preset("cid")


@pytest.fixture(scope="session")
def ed():
    return get_preset("ed")


@pytest.fixture(scope="session")
def dice():
    """Named dice from the three presets, e.g. dice['sid']['A']."""
    from metadice.presets import EFRON, LO_SHU, SIMPLEST

    return {
        name: {k: make_dice(v) for k, v in table.items()}
        for name, table in (("ed", EFRON), ("cid", LO_SHU), ("sid", SIMPLEST))
    }


def pytest_runtest_logreport(report):
    if report.when != "call" or "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.split("::", 1)[1]
    ACCEPTANCE_LINES.append(f"{'PASS' if report.passed else 'FAIL'}  {name}")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
