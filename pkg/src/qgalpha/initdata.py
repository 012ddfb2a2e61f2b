"""Synthetic mean-zero initial data.

Random kinds draw phases from numpy's PCG64 generator (``default_rng(seed)``),
visiting the upper half-plane of modes in row-major array order; the lower
half-plane is filled by Hermitian pairing.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .diagnostics import chi_norm
from .spectral import Grid, SpectralField

KINDS = ("single_mode", "two_mode", "gaussian_spectrum", "random_phase")
RNG_NAME = "pcg64"


@dataclass(frozen=True)
class InitSpec:
    kind: str
    amplitude: float = 1.0
    mode: tuple[int, int] = (1, 0)
    mode2: tuple[int, int] = (0, 1)
    amplitude2: Optional[float] = None
    peak: float = 4.0  # gaussian_spectrum centre |k0|
    width: float = 1.0  # gaussian_spectrum width s
    slope: float = 1.5  # random_phase: |c| ~ |k|^-slope
    cutoff: int = 0  # largest retained mode index for random kinds; 0 means floor(n/3)
    seed: int = 0
    target_norm: Optional[float] = None
    target_sigma: Optional[float] = None  # None means 1 - 2 alpha, resolved by the caller

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown init kind {self.kind!r}; expected one of {', '.join(KINDS)}")
        object.__setattr__(self, "mode", tuple(int(m) for m in self.mode))
        object.__setattr__(self, "mode2", tuple(int(m) for m in self.mode2))
        if self.kind in ("single_mode", "two_mode") and self.mode == (0, 0):
            raise ValueError("mode (0, 0) would give a non-zero mean")
        if self.kind == "two_mode" and self.mode2 == (0, 0):
            raise ValueError("mode2 (0, 0) would give a non-zero mean")
        if self.width <= 0 or self.peak < 0:
            raise ValueError("gaussian_spectrum needs width > 0 and peak >= 0")
        if self.slope < 0:
            raise ValueError("random_phase slope must be non-negative")
        if self.cutoff < 0:
            raise ValueError("cutoff must be non-negative")
        if self.target_norm is not None and self.target_norm < 0:
            raise ValueError("target_norm must be non-negative")

    def check_grid(self, grid: Grid):
        """Raise if the requested modes do not fit on ``grid``."""
        if self.kind in ("single_mode", "two_mode"):
            modes = [self.mode] + ([self.mode2] if self.kind == "two_mode" else [])
            for m in modes:
                if max(abs(m[0]), abs(m[1])) >= grid.n // 2:
                    raise ValueError(f"mode {m} overflows the n={grid.n} grid (needs |m| < {grid.n // 2})")
        elif self.cutoff >= grid.n // 2:
            raise ValueError(f"cutoff {self.cutoff} overflows the n={grid.n} grid")


def _cosine(grid: Grid, mode: tuple[int, int], a: float) -> np.ndarray:
    c = np.zeros((grid.n, grid.n), dtype=np.complex128)
    c[grid.index_of(*mode)] += a / 2
    c[grid.index_of(-mode[0], -mode[1])] += a / 2
    return c


def _random_phase_field(grid: Grid, magnitude: np.ndarray, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    m1, m2 = grid.m1, grid.m2
    upper = ((m1 > 0) | ((m1 == 0) & (m2 > 0))) & ~grid.nyquist_mask
    phases = rng.uniform(0.0, 2 * np.pi, size=int(upper.sum()))
    c = np.zeros((grid.n, grid.n), dtype=np.complex128)
    c[upper] = magnitude[upper] * np.exp(1j * phases)
    ci = grid.conj_index
    lower = upper[ci]
    c[lower] = np.conj(c[ci][lower])
    return c


def build(spec: InitSpec, grid: Grid, alpha: Optional[float] = None) -> SpectralField:
    """Construct the initial field; ``alpha`` resolves the default target_sigma."""
    spec.check_grid(grid)
    if spec.kind == "single_mode":
        c = _cosine(grid, spec.mode, spec.amplitude)
    elif spec.kind == "two_mode":
        a2 = spec.amplitude if spec.amplitude2 is None else spec.amplitude2
        c = _cosine(grid, spec.mode, spec.amplitude) + _cosine(grid, spec.mode2, a2)
    else:
        cutoff = spec.cutoff or int(grid.n // 3)
        band = (np.maximum(np.abs(grid.m1), np.abs(grid.m2)) <= cutoff) & (grid.kmag > 0)
        if spec.kind == "gaussian_spectrum":
            mag = np.exp(-((grid.kmag - spec.peak) ** 2) / (2 * spec.width ** 2))
        else:
            mag = grid.power(-spec.slope)
        mag = np.where(band, mag, 0.0)
        if mag.max() > 0:
            mag *= (spec.amplitude / 2) / mag.max()
        c = _random_phase_field(grid, mag, spec.seed)
    c[0, 0] = 0
    field = SpectralField(grid, c)
    if spec.target_norm is not None:
        sigma = spec.target_sigma
        if sigma is None:
            if alpha is None:
                raise ValueError("target_sigma defaults to 1 - 2*alpha; pass alpha")
            sigma = 1.0 - 2.0 * alpha
        field = rescale_to_norm(field, sigma, spec.target_norm)
    return field


def rescale_to_norm(field: SpectralField, sigma: float, target: float) -> SpectralField:
    current = chi_norm(field, sigma)
    if current == 0:
        raise ValueError("cannot rescale a zero field to a prescribed norm")
    out = field * (target / current)
    got = chi_norm(out, sigma)
    if abs(got - target) > 1e-12 * max(target, 1e-300) and target > 0:
        raise ArithmeticError(f"rescaled norm {got!r} misses target {target!r}")
    return out
