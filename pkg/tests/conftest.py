import pytest
from hypothesis import settings

from rigidsat import _search

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

BACKENDS = ["python"] + (["cython"] if _search.BACKEND == "cython" else [])


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


_ACCEPTANCE: dict[str, tuple[str, float]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(n, title): numbered acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None or rep.when not in ("setup", "call"):
        return
    key = f"{mark.args[0]:>2}  {mark.args[1]}"
    if rep.when == "setup" and rep.passed:
        return
    _ACCEPTANCE[key] = ("PASS" if rep.passed else "FAIL", rep.duration)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_ACCEPTANCE, key=lambda k: int(k.split()[0])):
        verdict, dur = _ACCEPTANCE[key]
        terminalreporter.write_line(f"{verdict}  criterion {key}  ({dur:.2f}s)")
