import pytest

from signlab.forms import build_table

_RESULTS: dict[int, list[tuple[str, str]]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        _RESULTS.setdefault(mark.args[0], []).append((item.name, rep.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_RESULTS):
        rows = _RESULTS[n]
        ok = all(o == "passed" for _, o in rows)
        names = ", ".join(name for name, _ in rows)
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  ({names})")


@pytest.fixture(scope="session")
def delta_small():
    return build_table("1.12.a.a", 2000)


@pytest.fixture(scope="session")
def e11_small():
    return build_table("11.2.a.a", 2000)


@pytest.fixture(scope="session")
def e37a_small():
    return build_table("37.2.a.a", 2000)


@pytest.fixture(scope="session")
def e37b_small():
    return build_table("37.2.a.b", 2000)
