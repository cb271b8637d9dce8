from pathlib import Path

import pytest

from homedr.scenario_io import load_scenario

SCENARIO_DIR = Path(__file__).resolve().parent.parent / "scenarios"


@pytest.fixture(scope="session")
def case1():
    return load_scenario(SCENARIO_DIR / "case1.json")


@pytest.fixture(scope="session")
def case2():
    return load_scenario(SCENARIO_DIR / "case2.json")


@pytest.fixture(scope="session")
def case3():
    return load_scenario(SCENARIO_DIR / "case3.json")


@pytest.fixture(scope="session")
def all_cases(case1, case2, case3):
    return {"case1": case1, "case2": case2, "case3": case3}


@pytest.fixture()
def scenario_dir():
    return SCENARIO_DIR
