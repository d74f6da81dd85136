from __future__ import annotations

import functools
import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

from mobius_qec.construction import build  # noqa: E402

settings.register_profile("repo", deadline=None, max_examples=100,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")


@functools.lru_cache(maxsize=None)
def cached_code(family: str, lc: int, lf: int):
    return build(family, lc, lf)


@pytest.fixture(scope="session")
def code():
    return cached_code


@pytest.fixture(scope="session")
def cyl15():
    return cached_code("cylindrical", 3, 3)


@pytest.fixture(scope="session")
def mob15():
    return cached_code("moebius", 3, 3)


@pytest.fixture(scope="session")
def surf13():
    return cached_code("surface", 3, 3)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
