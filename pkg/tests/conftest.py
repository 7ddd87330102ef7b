import pytest

# criterion number -> (passed, detail); filled by test_acceptance
ACCEPTANCE = {}


def record(k: int, ok: bool, detail: str):
    ACCEPTANCE[k] = (bool(ok), detail)


@pytest.fixture
def report():
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")
