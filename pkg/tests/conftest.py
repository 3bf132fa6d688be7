import itertools

import numpy as np
import pytest

from oversquash import _backend
from oversquash.graph import build_graph


def path_graph(n):
    return build_graph(n, [(i, i + 1) for i in range(n - 1)])


def complete_graph(n):
    return build_graph(n, itertools.combinations(range(n), 2))


def star_graph(leaves):
    return build_graph(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def binary_tree(depth):
    """Complete binary tree with ``depth`` edge levels, heap-ordered ids."""
    n = 2 ** (depth + 1) - 1
    return build_graph(n, [((i - 1) // 2, i) for i in range(1, n)])


def random_graph(rng, n, p):
    edges = [(u, v) for u, v in itertools.combinations(range(n), 2) if rng.random() < p]
    return build_graph(n, edges)


def random_connected_graph(rng, n, p):
    """Random spanning tree plus extra edges with probability ``p``."""
    order = rng.permutation(n)
    edges = [(int(order[i]), int(order[rng.integers(0, i)])) for i in range(1, n)]
    edges += [(u, v) for u, v in itertools.combinations(range(n), 2) if rng.random() < p]
    return build_graph(n, edges)


def _available_backends():
    names = ["python"]
    try:
        _backend.get("compiled")
        names.insert(0, "compiled")
    except ImportError:
        pass
    return names


BACKENDS = _available_backends()


@pytest.fixture(params=BACKENDS)
def backend(request, monkeypatch):
    """Run the test once per importable kernel implementation."""
    monkeypatch.setattr(_backend, "kernels", _backend.get(request.param))
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
