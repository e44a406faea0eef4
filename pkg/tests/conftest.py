import pytest

# Criterion id -> (passed, detail); filled by the acceptance suite.
ACCEPTANCE = {}


@pytest.fixture
def criterion():
    def record(cid, title, passed, detail):
        ACCEPTANCE[cid] = (title, bool(passed), detail)
        print(f"[{'PASS' if passed else 'FAIL'}] criterion {cid}: {title} | {detail}")
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(ACCEPTANCE):
        title, passed, detail = ACCEPTANCE[cid]
        terminalreporter.write_line(
            f"[{'PASS' if passed else 'FAIL'}] criterion {cid}: {title} | {detail}")
