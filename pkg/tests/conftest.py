import functools
import os
import tempfile

import pytest

# Systems are cached per pytest session in a fresh directory, so timings
# include construction and no state leaks in from earlier runs.
os.environ["STARTILE_CACHE_DIR"] = tempfile.mkdtemp(prefix="startile-cache-")

from starlike_tiling import SpaceDescriptor, StarlikeTiling, make_template  # noqa: E402

ACCEPTANCE_LINES: list[str] = []


@functools.lru_cache(maxsize=None)
def tiling(p: float, dim: int, variant: str = "A", epsilon: float = 0.2) -> StarlikeTiling:
    c = make_template("A", 1.3, 0.9) if variant == "A" else make_template("B", 1.8, 0.8)
    return StarlikeTiling.build(SpaceDescriptor.lp(dim, p), c, epsilon, seed=0, trials=2000)


@pytest.fixture(scope="session")
def l2_3():
    return tiling(2.0, 3)


@pytest.fixture(scope="session")
def linf_2():
    return tiling(float("inf"), 2)


@pytest.fixture(scope="session")
def l1_3():
    return tiling(1.0, 3)


@pytest.fixture
def record_criterion():
    def record(number: int, passed: bool, detail: str) -> None:
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
