import itertools
import json
import math
from pathlib import Path

import pytest

from mmse_lab.corpus import continuous_corpus, default_corpus, unit_power_corpus

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def ref():
    """Reference values frozen by ``tests/data/regenerate.py``."""
    return json.loads((DATA / "reference_values.json").read_text())


@pytest.fixture(scope="session")
def corpus():
    return default_corpus()


@pytest.fixture(scope="session")
def unit_corpus():
    return unit_power_corpus()


@pytest.fixture(scope="session")
def smooth_corpus():
    return continuous_corpus()


def enumerate_iid_sum(atoms, n):
    """Law of the normalized sum by listing every n-tuple (slow but obvious)."""
    out = {}
    for combo in itertools.product(atoms, repeat=n):
        x = sum(c[0] for c in combo) / math.sqrt(n)
        p = math.prod(c[1] for c in combo)
        key = round(x, 12)
        out[key] = out.get(key, 0.0) + p
    return sorted(out.items())


# ----------------------------------------------------------------- acceptance summary

_CRITERIA = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_criterion_" not in report.nodeid:
        return
    if report.when == "call" or report.outcome != "passed":
        name = report.nodeid.split("::")[-1]
        if _CRITERIA.get(name) != "failed":
            _CRITERIA[name] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_CRITERIA):
        number, _, label = name[len("test_criterion_"):].partition("_")
        status = "PASS" if _CRITERIA[name] == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {int(number):2d}  {status}  {label.replace('_', ' ')}")
