import numpy as np
import pytest

from aiplab.geometry import VPolytope


def regular_polygon(k, radius=1.0, phase=0.0):
    ang = phase + 2.0 * np.pi * np.arange(k) / k
    return VPolytope(radius * np.column_stack([np.cos(ang), np.sin(ang)]))


@pytest.fixture
def square():
    return VPolytope([[-1, -1], [1, -1], [1, 1], [-1, 1]])


@pytest.fixture
def triangle():
    return VPolytope([[0, 0], [1, 0], [0, 1]])


@pytest.fixture
def cube():
    pts = np.array([[i, j, k] for i in (0, 1) for j in (0, 1) for k in (0, 1)], float)
    return VPolytope(pts)


@pytest.fixture
def tetrahedron():
    return VPolytope(np.vstack([np.zeros(3), np.eye(3)]))


@pytest.fixture
def rng():
    return np.random.default_rng(20261015)


ACCEPTANCE = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[ACCEPTANCE] = {}


@pytest.fixture
def record(request):
    """Store ``(passed, detail)`` for an acceptance criterion, then assert it.

    Criteria checked by several tests pass only if every part passes.
    """
    results = request.config.stash[ACCEPTANCE]

    def _record(k, passed, detail):
        results.setdefault(k, []).append((bool(passed), detail))
        assert passed, f"criterion {k}: {detail}"

    return _record


def pytest_terminal_summary(terminalreporter, config):
    results = config.stash.get(ACCEPTANCE, {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(results):
        passed = all(ok for ok, _ in results[k])
        detail = "; ".join(d for _, d in results[k])
        terminalreporter.write_line(f"acceptance criterion {k}: {'PASS' if passed else 'FAIL'} "
                                    f"({detail})")
