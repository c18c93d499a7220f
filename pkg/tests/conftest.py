import pytest

from cayley_ci.preset import Preset

ACCEPTANCE_LOG: list[str] = []


@pytest.fixture(scope="session")
def preset():
    return Preset.paper()


@pytest.fixture(scope="session")
def spec(preset):
    return preset.spec


@pytest.fixture(scope="session")
def gamma1(preset):
    return preset.graph("gamma1")


@pytest.fixture(scope="session")
def gamma2(preset):
    return preset.graph("gamma2")


@pytest.fixture(scope="session")
def psi(preset):
    return preset.polymap("psi")


def toy_preset_data():
    """Z_3^3 with one w-generator: a small preset exercising every recipe."""
    return {
        "name": "toy",
        "group": {"p": 3, "n": 3, "w_count": 1, "v_count": 2, "names": ["w1", "v1", "v2"]},
        "families": [
            {"label": "S_{0}", "block": [0], "elements": [[0, 1, 0]]},
            {"label": "S_{1}", "block": [1], "offset": [1, 0, 0], "params": 1, "matrix": [[0], [0], [1]]},
        ],
        "variants": {
            "S": {"prefix": "S", "shifts": {}},
            "T": {"prefix": "T", "shifts": {"1": [0, 1, 0]}},
        },
        "graphs": {
            "gamma1": {"variant": "S", "drop": [], "extra": [], "directed": False},
            "gamma2": {"variant": "T", "drop": [], "extra": [], "directed": False},
            "dgamma1": {"variant": "S", "drop": ["0"], "extra": [[0, 0, 1]], "directed": True},
        },
        "maps": {"identity": {"terms": []}, "shear": {"terms": [{"exp": [1], "target": [0, 1, 0]}]}},
        "expected": {"mutual_counts": [], "outside_bound": {"value": 100, "provenance": "TRIVIAL"}},
    }


@pytest.fixture
def toy():
    return Preset(toy_preset_data(), "toy")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LOG:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LOG:
            terminalreporter.write_line(line)
