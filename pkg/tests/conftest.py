from __future__ import annotations

from pathlib import Path

import pytest

from adaptgrasp.benchmark.dataset import load_dataset

DATA = Path(__file__).parent / "data"
ACCEPTANCE: list[str] = []


@pytest.fixture(scope="session")
def objects():
    return load_dataset()


@pytest.fixture(scope="session")
def by_name(objects):
    return {o.name: o for o in objects}


@pytest.fixture
def acceptance():
    """Record one pass/fail line per acceptance criterion."""

    def record(number: int, ok: bool, detail: str) -> None:
        line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE):
            terminalreporter.write_line(line)
