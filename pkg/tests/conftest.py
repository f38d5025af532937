import numpy as np
import pytest

from pbsdiagrams.channels import random_channel
from pbsdiagrams.diagram import random_diagram, typecheck

_RESULTS = []


class Report:
    def __call__(self, criterion, ok, detail=""):
        _RESULTS.append((criterion, bool(ok), detail))
        print(f"{criterion}: {'PASS' if ok else 'FAIL'} {detail}")


@pytest.fixture
def report():
    return Report()


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, ok, detail in sorted(_RESULTS, key=lambda r: int(r[0][2:])):
        terminalreporter.write_line(f"{criterion} {'PASS' if ok else 'FAIL'}  {detail}")


def rand_term(rng, n, prefix="g", max_gates=2, **kw):
    labels = [f"{prefix}{i}" for i in range(max_gates)]
    return random_diagram(n, rng, max_gates=max_gates, labels=labels, **kw)


def rand_assignment(term, rng, dim_h=2, max_dim_e=2):
    return {
        a: random_channel(dim_h, int(rng.integers(1, max_dim_e + 1)), rng)
        for a in sorted(typecheck(term).alphabet)
    }


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
