"""Periodic grid, real-field transforms and Fourier multipliers.

Coefficients follow ``f(x) = sum_k c_k exp(i k.x)`` on the box ``[0, l)^2``,
i.e. ``c = fft2(samples) / n**2``. Array axis 0 is ``x1``, axis 1 is ``x2``.
Signed mode indices run over ``-n/2+1 .. n/2``; the Nyquist index ``n/2`` is
its own negative on the lattice.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

HERMITIAN_TOL = 1e-8
IMAG_RESIDUE_TOL = 1e-10
MEAN_ZERO_TOL = 1e-12


class CorruptFieldError(ValueError):
    """Raised when coefficients do not describe a real field."""


@dataclass(frozen=True)
class Grid:
    n: int
    l: float = 2 * np.pi

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 4 or self.n % 2:
            raise ValueError(f"n must be an even integer >= 4, got {self.n}")
        if not self.l > 0:
            raise ValueError(f"box length l must be positive, got {self.l}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "l", float(self.l))

    @cached_property
    def modes_1d(self) -> np.ndarray:
        m = np.fft.fftfreq(self.n, 1.0 / self.n).astype(np.int64)
        m[self.n // 2] = self.n // 2
        return m

    @cached_property
    def m1(self) -> np.ndarray:
        return np.broadcast_to(self.modes_1d[:, None], (self.n, self.n))

    @cached_property
    def m2(self) -> np.ndarray:
        return np.broadcast_to(self.modes_1d[None, :], (self.n, self.n))

    @property
    def dk(self) -> float:
        return 2 * np.pi / self.l

    @cached_property
    def k1(self) -> np.ndarray:
        return self.dk * self.m1

    @cached_property
    def k2(self) -> np.ndarray:
        return self.dk * self.m2

    @cached_property
    def kmag(self) -> np.ndarray:
        return np.hypot(self.k1, self.k2)

    @cached_property
    def nyquist_mask(self) -> np.ndarray:
        """True on the Nyquist row and column."""
        h = self.n // 2
        return (np.abs(self.m1) == h) | (np.abs(self.m2) == h)

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        """True where a mode survives the 2/3 rule."""
        return np.maximum(np.abs(self.m1), np.abs(self.m2)) <= self.n / 3

    @cached_property
    def conj_index(self) -> tuple[np.ndarray, np.ndarray]:
        """Index arrays mapping each position to the position of its negated mode."""
        j = (-np.arange(self.n)) % self.n
        return np.ix_(j, j)

    @property
    def x(self) -> np.ndarray:
        return self.l / self.n * np.arange(self.n)

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.x, self.x, indexing="ij")

    def index_of(self, m1: int, m2: int) -> tuple[int, int]:
        """Array position of the signed mode (m1, m2)."""
        h = self.n // 2
        for m in (m1, m2):
            if not -h < m <= h and m != -h:
                raise ValueError(f"mode ({m1}, {m2}) does not fit on an n={self.n} grid")
        return m1 % self.n, m2 % self.n

    def power(self, s: float) -> np.ndarray:
        """The symbol |k|^s with the zero mode mapped to 0."""
        out = np.zeros((self.n, self.n))
        nz = self.kmag > 0
        out[nz] = self.kmag[nz] ** s
        return out


@dataclass(frozen=True, eq=False)
class SpectralField:
    grid: Grid
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=np.complex128)
        if c.shape != (self.grid.n, self.grid.n):
            raise ValueError(f"coefficient shape {c.shape} does not match n={self.grid.n}")
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def zeros(cls, grid: Grid) -> SpectralField:
        return cls(grid, np.zeros((grid.n, grid.n), dtype=np.complex128))

    def with_coeffs(self, coeffs: np.ndarray) -> SpectralField:
        return SpectralField(self.grid, coeffs)

    def __mul__(self, scalar) -> SpectralField:
        return self.with_coeffs(scalar * self.coeffs)

    __rmul__ = __mul__

    def __add__(self, other: SpectralField) -> SpectralField:
        if other.grid != self.grid:
            raise ValueError("fields live on different grids")
        return self.with_coeffs(self.coeffs + other.coeffs)

    def __sub__(self, other: SpectralField) -> SpectralField:
        return self + (-1.0) * other

    @property
    def mean(self) -> complex:
        return self.coeffs[0, 0]

    def is_mean_zero(self, tol: float = MEAN_ZERO_TOL) -> bool:
        scale = max(1.0, float(np.abs(self.coeffs).max(initial=0.0)))
        return abs(self.coeffs[0, 0]) <= tol * scale

    def hermitian_defect(self) -> float:
        return hermitian_defect(self.coeffs, self.grid)

    def coefficient(self, m1: int, m2: int) -> complex:
        return self.coeffs[self.grid.index_of(m1, m2)]


@dataclass(frozen=True, eq=False)
class VelocityField:
    u1: SpectralField
    u2: SpectralField

    @property
    def grid(self) -> Grid:
        return self.u1.grid

    def divergence_defect(self) -> float:
        """max |k1 u1 + k2 u2| over the lattice."""
        g = self.grid
        return float(np.abs(g.k1 * self.u1.coeffs + g.k2 * self.u2.coeffs).max())

    def physical(self) -> tuple[np.ndarray, np.ndarray]:
        return inverse_transform(self.u1), inverse_transform(self.u2)


def hermitian_defect(coeffs: np.ndarray, grid: Grid) -> float:
    return float(np.abs(coeffs - np.conj(coeffs[grid.conj_index])).max(initial=0.0))


def _require_mean_zero(field: SpectralField, what: str):
    if not field.is_mean_zero():
        raise ValueError(f"{what} requires a mean-zero field (c0 = {field.mean!r})")


def forward_transform(samples: np.ndarray, grid: Grid) -> SpectralField:
    samples = np.asarray(samples, dtype=np.float64)
    if samples.shape != (grid.n, grid.n):
        raise ValueError(f"samples of shape {samples.shape} do not match n={grid.n}")
    return SpectralField(grid, _fwd(samples, grid))


def inverse_transform(field: SpectralField) -> np.ndarray:
    defect = field.hermitian_defect()
    if defect > HERMITIAN_TOL:
        raise CorruptFieldError(f"Hermitian symmetry violated by {defect:.3e}")
    values = np.fft.ifft2(field.coeffs) * field.grid.n ** 2
    scale = max(1.0, float(np.abs(values.real).max(initial=0.0)))
    residue = float(np.abs(values.imag).max(initial=0.0))
    if residue > IMAG_RESIDUE_TOL * scale:
        raise CorruptFieldError(f"imaginary residue {residue:.3e} after inverse transform")
    return values.real.copy()


def _fwd(samples: np.ndarray, grid: Grid) -> np.ndarray:
    """Real samples -> full coefficient array, exactly Hermitian."""
    n = grid.n
    h = n // 2
    half = np.fft.rfft2(samples) / n ** 2
    out = np.empty((n, n), dtype=np.complex128)
    rows = (-np.arange(n)) % n
    # self-paired columns are Hermitian only to rounding after rfft2
    for j in (0, h):
        half[:, j] = 0.5 * (half[:, j] + np.conj(half[rows, j]))
    out[:, : h + 1] = half
    out[:, h + 1 :] = np.conj(half[rows][:, h - 1 : 0 : -1])
    return out


def _inv(coeffs: np.ndarray, grid: Grid) -> np.ndarray:
    """Unchecked inverse for Hermitian input."""
    n = grid.n
    return np.fft.irfft2(coeffs[:, : n // 2 + 1] * n ** 2, s=(n, n))


def apply_fractional_power(field: SpectralField, s: float) -> SpectralField:
    """Multiply by |k|^s; the zero mode is always sent to 0."""
    if s < 0:
        _require_mean_zero(field, "a negative fractional power")
    return field.with_coeffs(field.grid.power(s) * field.coeffs)


def riesz_velocity_symbols(grid: Grid) -> tuple[np.ndarray, np.ndarray]:
    """Multipliers taking theta_hat to (u1_hat, u2_hat) for u = grad_perp psi, |k| psi = -theta.

    Odd symbols are zeroed on the Nyquist row and column so real fields stay real.
    """
    inv_k = grid.power(-1.0)
    s1 = 1j * grid.k2 * inv_k
    s2 = -1j * grid.k1 * inv_k
    s1[grid.nyquist_mask] = 0
    s2[grid.nyquist_mask] = 0
    return s1, s2


def gradient_symbols(grid: Grid) -> tuple[np.ndarray, np.ndarray]:
    s1 = 1j * grid.k1
    s2 = 1j * grid.k2
    s1[grid.nyquist_mask] = 0
    s2[grid.nyquist_mask] = 0
    return s1, s2


def velocity_from_theta(theta: SpectralField) -> VelocityField:
    _require_mean_zero(theta, "velocity_from_theta")
    s1, s2 = riesz_velocity_symbols(theta.grid)
    return VelocityField(theta.with_coeffs(s1 * theta.coeffs), theta.with_coeffs(s2 * theta.coeffs))


def gradient(field: SpectralField) -> tuple[SpectralField, SpectralField]:
    s1, s2 = gradient_symbols(field.grid)
    return field.with_coeffs(s1 * field.coeffs), field.with_coeffs(s2 * field.coeffs)


def dealias(field: SpectralField) -> SpectralField:
    return field.with_coeffs(np.where(field.grid.dealias_mask, field.coeffs, 0))
