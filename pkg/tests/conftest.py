import pytest

from asyncmp import weighted_graph

DEMO_EDGES = [(0, 1, 4), (0, 2, 1), (2, 1, 2), (1, 3, 1), (2, 3, 5)]
LINE3_EDGES = [(0, 1, 1), (1, 0, 1), (1, 2, 1), (2, 1, 1)]


@pytest.fixture
def demo_graph():
    return weighted_graph([0, 1, 2, 3], DEMO_EDGES)


@pytest.fixture
def line3_graph():
    return weighted_graph([0, 1, 2], LINE3_EDGES)


# -- acceptance criteria reporting --------------------------------------------

import time

_RESULTS = pytest.StashKey[list]()


class _Criterion:
    def __init__(self, results, number, title, limit):
        self.results, self.number, self.title, self.limit = results, number, title, limit
        self.notes = []

    def note(self, text):
        self.notes.append(text)

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.t0
        failure = None
        if exc is not None:
            failure = f"{exc_type.__name__}: {exc}".splitlines()[0]
        elif self.limit is not None and elapsed >= self.limit:
            failure = f"took {elapsed:.2f}s, limit {self.limit:g}s"
        detail = "; ".join(self.notes)
        if failure:
            detail = f"{failure}; {detail}" if detail else failure
        line = (f"[{'FAIL' if failure else 'PASS'}] criterion {self.number:>2}: {self.title} "
                f"({elapsed:.2f}s) {detail}").rstrip()
        self.results.append((self.number, line))
        print(line)
        if failure and exc is None:
            raise AssertionError(failure)
        return False


@pytest.fixture
def criterion(request):
    results = request.config.stash.setdefault(_RESULTS, [])

    def make(number, title, limit=None):
        return _Criterion(results, number, title, limit)
    return make


def pytest_terminal_summary(terminalreporter, config):
    results = config.stash.get(_RESULTS, [])
    if results:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(results):
            terminalreporter.write_line(line)
