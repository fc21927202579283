import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

FIXTURES = Path(__file__).parent / "fixtures"
GOLD = FIXTURES / "gold"
TRIGGER = FIXTURES / "trigger"
E2E = FIXTURES / "e2e"

_ACCEPTANCE = {}


@pytest.fixture
def fixtures_dir():
    return FIXTURES


@pytest.fixture
def gold_pairs():
    from gendermt.corpus_io import read_parallel_corpus
    return read_parallel_corpus(GOLD / "src.en", GOLD / "tgt.ar.tags", GOLD / "align.txt")


@pytest.fixture
def lex():
    from gendermt.annotator import Lexicons
    return Lexicons()


@pytest.fixture
def criterion(request):
    """Record one acceptance criterion's outcome for the terminal summary."""
    name = request.node.get_closest_marker("criterion").args[0]
    _ACCEPTANCE[name] = "FAIL"
    yield
    if request.node.rep_call_passed:
        _ACCEPTANCE[name] = "PASS"


@pytest.hookimpl(hookwrapper=True, tryfirst=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call_passed = rep.passed


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(name): acceptance criterion")


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_ACCEPTANCE, key=lambda s: int(s.split()[0])):
        terminalreporter.write_line(f"{_ACCEPTANCE[name]}  {name}")
