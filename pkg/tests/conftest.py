import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

_ACCEPTANCE = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE] = {}


@pytest.fixture
def acceptance(request):
    """record(key, ok, detail) -> one summary line per acceptance criterion."""
    store = request.config.stash[_ACCEPTANCE]

    def record(key: str, ok: bool, detail: str = ""):
        store[key] = (bool(ok), detail)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    store = config.stash.get(_ACCEPTANCE, {})
    if not store:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(store, key=lambda k: (int(k.split(".")[0]), k)):
        ok, detail = store[key]
        terminalreporter.write_line(f"criterion {key:<5} {'PASS' if ok else 'FAIL'}  {detail}")
