from __future__ import annotations

import contextlib

import pytest

from betti2p.exact_linalg import PrimeField

_CRITERIA: list[tuple[str, bool, str]] = []


@pytest.fixture
def F2():
    return PrimeField(2)


@pytest.fixture
def F3():
    return PrimeField(3)


@pytest.fixture
def F5():
    return PrimeField(5)


@pytest.fixture
def criterion():
    """Record one acceptance criterion; the outcome is printed in the summary."""

    @contextlib.contextmanager
    def record(name: str):
        detail = {"text": ""}
        try:
            yield detail
        except BaseException as e:
            _CRITERIA.append((name, False, f"{type(e).__name__}: {str(e).splitlines()[0] if str(e) else ''}"))
            raise
        _CRITERIA.append((name, True, detail["text"]))

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in _CRITERIA:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}" + (f"  ({detail})" if detail else ""))
