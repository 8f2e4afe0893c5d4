import pytest

from engines.hecke import build_delta_table
from engines.shiftsums import calibrate_rankin_selberg
from models.eigenvalue_table import EigenvalueTable
from models.shifted import EtaFunction

@pytest.fixture(scope="session")
def delta_table() -> EigenvalueTable:
    return build_delta_table(20_000)

@pytest.fixture(scope="session")
def ones_table() -> EigenvalueTable:
    return EigenvalueTable.ones(20_000)

@pytest.fixture(scope="session")
def delta_eta(delta_table) -> EtaFunction:
    return EtaFunction.create(delta_table)

@pytest.fixture(scope="session")
def delta_calibration(delta_table, delta_eta):
    return calibrate_rankin_selberg(delta_table, etafn=delta_eta)

@pytest.fixture(scope="session")
def large_delta_table() -> EigenvalueTable:
    return build_delta_table(1_000_000)

@pytest.fixture(scope="session")
def large_delta_eta(large_delta_table) -> EtaFunction:
    return EtaFunction.create(large_delta_table)

@pytest.fixture(scope="session")
def large_calibration(large_delta_table, large_delta_eta):
    return calibrate_rankin_selberg(large_delta_table, etafn=large_delta_eta)
