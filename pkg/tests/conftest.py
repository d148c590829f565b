import pytest

_ACCEPTANCE = []


@pytest.fixture
def criterion():
    """Record one acceptance line: ``criterion(id, label, ok, detail)``."""

    def record(cid, label, ok, detail):
        _ACCEPTANCE.append((cid, label, bool(ok), detail))
        print(f"[{'PASS' if ok else 'FAIL'}] criterion {cid}: {label} ({detail})")
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for cid, label, ok, detail in sorted(_ACCEPTANCE, key=lambda r: (int(str(r[0]).split(".")[0]), str(r[0]))):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {cid:>5}  {label}: {detail}")
