import pytest

from su3ade import graphs
from su3ade.cells import load_cells

# filled by test_acceptance, echoed at the end of the run
CRITERIA_LINES: list[str] = []


@pytest.fixture(scope="session")
def catalog():
    return graphs.Catalog()


@pytest.fixture(scope="session")
def shipped_cells(catalog):
    return {name: load_cells(path, catalog[name]) for name, path in catalog.cell_files.items()}


def pytest_terminal_summary(terminalreporter):
    if CRITERIA_LINES:
        terminalreporter.section("acceptance criteria")
        for line in CRITERIA_LINES:
            terminalreporter.write_line(line)
