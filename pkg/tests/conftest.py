"""Collects one verdict line per acceptance criterion and prints them at the end."""

from __future__ import annotations

import pytest

LINES = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[LINES] = []


@pytest.fixture
def verdict(request):
    """Record ``CRITERION n: PASS|FAIL detail`` and return whether it passed."""

    def record(number: int, checks: dict[str, bool], detail: str = "") -> bool:
        ok = all(checks.values())
        failed = [name for name, good in checks.items() if not good]
        line = f"CRITERION {number}: {'PASS' if ok else 'FAIL'}"
        if failed:
            line += f" failed={','.join(failed)}"
        if detail:
            line += f" {detail}"
        request.config.stash[LINES].append((number, line))
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = sorted(config.stash.get(LINES, []))
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in lines:
            terminalreporter.write_line(line)
