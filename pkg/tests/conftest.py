import pytest

from reservematch import fixtures
from reservematch.io import instance_from_json


def ids(*nums):
    return {f"i{k}" for k in nums}


def seats(result):
    """(open set, reserved set) of a ChoiceResult."""
    return set(result.open), set(result.reserved)


@pytest.fixture
def load():
    def _load(name):
        return fixtures.instance(name)
    return _load


def single(name):
    inst = fixtures.instance(name)
    return inst, inst.school_ids[0], inst.student_ids


def market(doc):
    return instance_from_json(doc)


# (number, title, passed, seconds, note) for each acceptance criterion that ran
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n, title, ok, secs, note in sorted(ACCEPTANCE):
        line = f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {secs:7.2f}s  {title}"
        terminalreporter.write_line(line + (f"  ({note})" if note and not ok else ""))
