import numpy as np
import pytest

from tubecast import ArimaSpec, UnivariateArmaSpec, VarmaSpec

# Fixed coefficient sets for the (p, q, d, m) grid.  The order-2 sets extend
# the order-1 sets, and all are causal and invertible.
PHI = {0: [], 1: [0.5], 2: [0.5, -0.3]}
THETA = {0: [], 1: [0.4], 2: [0.4, 0.2]}
PHI_M2 = [np.array([[0.5, 0.1], [-0.2, 0.3]]), np.array([[-0.2, 0.05], [0.1, 0.1]])]
THETA_M2 = [np.array([[0.4, 0.2], [0.0, 0.3]]), np.array([[0.1, 0.0], [0.05, 0.2]])]
SIGMA_M2 = np.array([[1.0, 0.3], [0.3, 0.5]])

GRID = [(p, q, d, m) for m in (1, 2) for d in (0, 1, 2) for p in (0, 1, 2) for q in (0, 1, 2)]


def grid_spec(p, q, d, m):
    """Grid model; scalar models are ArimaSpec (plain ARMA when d = 0)."""
    if m == 1:
        arma = UnivariateArmaSpec(PHI[p], THETA[q], 1.0)
        return arma if d == 0 else ArimaSpec(arma, d)
    return VarmaSpec(2, PHI_M2[:p], THETA_M2[:q], SIGMA_M2, d=d)


def grid_spec_as_varma(p, q, d):
    """The scalar grid model written through the vector pipeline with m = 1."""
    return VarmaSpec(1, [[[c]] for c in PHI[p]], [[[c]] for c in THETA[q]], [[1.0]], d=d)


def grid_id(case):
    p, q, d, m = case
    return f"p{p}q{q}d{d}m{m}"


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# ---------------------------------------------------------------------------
# one PASS/FAIL line per acceptance criterion in the terminal summary

_CRITERIA = {}


def pytest_runtest_logreport(report):
    marker = getattr(report, "criterion", None)
    if marker is None:
        return
    if report.when == "call" or report.failed:
        num, title = marker
        prev = _CRITERIA.get(num, (title, True))
        _CRITERIA[num] = (title, prev[1] and report.passed)


import pytest as _pytest  # noqa: E402


@_pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is not None:
        rep.criterion = (mark.args[0], mark.args[1])


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        title, ok = _CRITERIA[num]
        terminalreporter.write_line(f"criterion {num:2d} {'PASS' if ok else 'FAIL'}: {title}")
