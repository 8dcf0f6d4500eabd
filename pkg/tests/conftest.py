import numpy as np
import pytest

from mesocolony.equilibrium import construct_irregular_potential, solve_equilibrium
from mesocolony.mesoscopic import meso_equilibrium
from mesocolony.potential import PolynomialPotential


@pytest.fixture(scope="session")
def gauss():
    return PolynomialPotential((0.0, 0.0, 1.0), 1.0)


@pytest.fixture(scope="session")
def gauss_measure(gauss):
    return solve_equilibrium(gauss)


@pytest.fixture(scope="session")
def quartic_two_cut():
    # V = x^4/4 - x^2 at T = 1: bands [-sqrt 6, -sqrt 2] and [sqrt 2, sqrt 6]
    return PolynomialPotential((0.0, 0.0, -2.0, 0.0, 0.25), 1.0)


@pytest.fixture(scope="session")
def outpost0():
    """nu = 0 outpost at x0 = 3 next to the band [-1, 1]."""
    return construct_irregular_potential(0, 3.0, 6)


@pytest.fixture(scope="session")
def outpost1():
    """nu = 1 outpost at x0 = 4."""
    return construct_irregular_potential(1, 4.0, 10)


@pytest.fixture(scope="session")
def semicircle_meso():
    return meso_equilibrium(0, [0.0])


@pytest.fixture(scope="session")
def shifted_meso():
    return meso_equilibrium(0, [1.0])


@pytest.fixture(scope="session")
def two_band_meso():
    return meso_equilibrium(1, [0.0, -5.0, 0.0])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# ---------------------------------------------------------- acceptance summary

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion check")


@pytest.fixture
def detail(request):
    """Dict a criterion test fills with the measured quantities for the summary line."""
    m = request.node.get_closest_marker("criterion")
    entry = _CRITERIA.setdefault(m.args[0], {"title": m.args[1], "ok": [], "detail": {}})
    return entry["detail"]


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = item.get_closest_marker("criterion")
    if m is None or rep.when != "call" and not rep.failed:
        return
    entry = _CRITERIA.setdefault(m.args[0], {"title": m.args[1], "ok": [], "detail": {}})
    entry["ok"].append(rep.passed)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        e = _CRITERIA[num]
        ok = bool(e["ok"]) and all(e["ok"])
        info = ", ".join(f"{k}={_short(v)}" for k, v in e["detail"].items())
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {num}: {e['title']}"
                                    + (f" ({info})" if info else ""))


def _short(v):
    if isinstance(v, float):
        return f"{v:.3g}"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_short(x) for x in v) + "]"
    return str(v)
