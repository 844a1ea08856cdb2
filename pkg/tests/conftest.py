import pytest

_ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture(scope="session")
def acceptance_log():
    """Record one verdict per acceptance criterion: ``log(number, ok, detail)``."""

    def log(number: int, ok: bool, detail: str) -> bool:
        _ACCEPTANCE[number] = (bool(ok), detail)
        print(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
        return bool(ok)

    return log


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        ok, detail = _ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
