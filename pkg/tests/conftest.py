import numpy as np
import pytest

from qgalpha.spectral import Grid, SpectralField, forward_transform


def random_field(grid: Grid, seed: int, band: int | None = None, nyquist: bool = False) -> SpectralField:
    """Seeded mean-zero real field; ``band`` keeps max(|m1|, |m2|) <= band."""
    rng = np.random.default_rng(seed)
    f = forward_transform(rng.standard_normal((grid.n, grid.n)), grid)
    c = f.coeffs.copy()
    c[0, 0] = 0
    if band is not None:
        c[np.maximum(np.abs(grid.m1), np.abs(grid.m2)) > band] = 0
    if not nyquist:
        c[grid.nyquist_mask] = 0
    return SpectralField(grid, c)


def samples_of(grid: Grid, fn) -> np.ndarray:
    x1, x2 = grid.mesh()
    return fn(x1, x2)


@pytest.fixture
def grid16():
    return Grid(16)


@pytest.fixture
def grid32():
    return Grid(32)


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def verdict():
    """Record one pass/fail line per acceptance criterion, shown in the terminal summary."""

    def record(number: int, name: str, ok: bool, detail: str):
        line = f"criterion {number} [{'PASS' if ok else 'FAIL'}] {name}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
