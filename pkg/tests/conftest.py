import pytest

from bfeq.core import Dictionary
from bfeq.rules import parse_program
from bfeq.store import parse_triples

BIJECTIVE_RULES = """\
?y1 == ?y2 :- [?y1, :R, ?x], [?y2, :R, ?x] .
?y1 == ?y2 :- [?x, :R, ?y1], [?x, :R, ?y2] .
"""


class Example:
    """The small bijective instance: three R-edges, two equality rules."""

    def __init__(self):
        d = Dictionary()
        self.d = d
        self.a, self.b, self.c, self.dd, self.R = (d.intern(x) for x in (":a", ":b", ":c", ":d", ":R"))
        self.program = parse_program(BIJECTIVE_RULES, d)
        self.E = list(parse_triples(":a :R :b .\n:c :R :d .\n:a :R :d .\n", d))
        self.deletions = [(self.a, self.R, self.dd)]

    def fact(self, text):
        (f,) = parse_triples(text, self.d)
        return f

    def facts(self, text):
        return set(parse_triples(text, self.d))


@pytest.fixture
def ex():
    return Example()


# acceptance reporting ---------------------------------------------------------

_ACCEPTANCE: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if report.when == "call" or report.outcome != "passed":
        previous = _ACCEPTANCE.get(name)
        if previous != "FAIL":
            _ACCEPTANCE[name] = "PASS" if report.outcome == "passed" else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_ACCEPTANCE):
        terminalreporter.write_line(f"{_ACCEPTANCE[name]}  {name}")
