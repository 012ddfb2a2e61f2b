"""Right-hand side and integrating-factor RK4 time stepping for (QG)_alpha.

    d/dt theta + u . grad(theta) + k Lambda^(2 alpha) theta = 0,
    u = grad_perp(psi),  Lambda psi = -theta.

The stiff dissipation is diagonal in Fourier space and is integrated exactly
through the factor exp(-k |k|^(2 alpha) h); RK4 handles the advection.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .diagnostics import NormRecord, NormSeries, critical_sigma, decay_applicable
from .spectral import (
    Grid,
    SpectralField,
    VelocityField,
    gradient_symbols,
    riesz_velocity_symbols,
)

BLOWUP_CHI = 1e6


class BlowUpError(RuntimeError):
    """Non-finite coefficients or a runaway critical norm.

    ``series`` holds the records collected before the abort.
    """

    def __init__(self, message: str, step: int, t: float, series: Optional[NormSeries] = None):
        super().__init__(message)
        self.step = step
        self.t = t
        self.series = series


@dataclass(frozen=True)
class SimParams:
    alpha: float
    k: float = 1.0
    dt: float = 1e-3
    t_end: float = 1.0
    cfl_coeff: float = 0.5
    dealias_on: bool = True
    record_every: int = 1

    def __post_init__(self):
        if not 0.5 < self.alpha <= 1.0:
            raise ValueError(f"alpha = {self.alpha} outside the admissible range 1/2 < alpha <= 1")
        if not self.k > 0:
            raise ValueError(f"dissipation coefficient k must be > 0, got {self.k}")
        if not self.dt > 0:
            raise ValueError(f"dt must be > 0, got {self.dt}")
        if not self.t_end >= 0:
            raise ValueError(f"t_end must be >= 0, got {self.t_end}")
        if not 0 < self.cfl_coeff <= 1:
            raise ValueError(f"cfl_coeff must lie in (0, 1], got {self.cfl_coeff}")
        if int(self.record_every) != self.record_every or self.record_every < 1:
            raise ValueError(f"record_every must be a positive integer, got {self.record_every}")

    @property
    def sigma(self) -> float:
        return critical_sigma(self.alpha)


def warn_if_decay_not_covered(alpha: float):
    if not decay_applicable(alpha):
        warnings.warn(
            f"alpha = {alpha} is outside 2/3 < alpha < 1; the decay result does not cover this case",
            stacklevel=2,
        )


@dataclass(frozen=True, eq=False)
class SimState:
    t: float
    theta: SpectralField
    step_count: int = 0


class _Operators:
    """Precomputed multipliers for one (grid, alpha, k, dealias) combination.

    Works on the half spectrum ``c[:, :n//2 + 1]`` of a real field; the
    transform scalings are folded into the multipliers.
    """

    def __init__(self, grid: Grid, alpha: float, k: float, dealias_on: bool):
        n = grid.n
        h = n // 2 + 1
        self.grid = grid
        self.half = h
        scale = float(n * n)
        u1, u2 = riesz_velocity_symbols(grid)
        g1, g2 = gradient_symbols(grid)
        self.sym = [s[:, :h] * scale for s in (u1, u2, g1, g2)]
        keep = grid.dealias_mask[:, :h].copy() if dealias_on else np.ones((n, h), dtype=bool)
        keep[0, 0] = False
        self.out_scale = np.where(keep, -1.0 / scale, 0.0)
        self.rate = k * grid.power(2 * alpha)[:, :h]
        # columns 1 .. n/2-1 stand for themselves and their conjugate partners
        mult = np.full(h, 2.0)
        mult[0] = mult[-1] = 1.0
        self.w_low = grid.power(critical_sigma(alpha))[:, :h] * mult
        self.w_one = grid.power(1.0)[:, :h] * mult
        self.w_l2 = np.broadcast_to(mult, (n, h))
        self._factors: dict[float, tuple[np.ndarray, np.ndarray]] = {}

    def to_half(self, c: np.ndarray) -> np.ndarray:
        return c[:, : self.half].copy()

    def to_full_spectrum(self, ch: np.ndarray) -> np.ndarray:
        n = self.grid.n
        h = self.half
        out = np.empty((n, n), dtype=np.complex128)
        out[:, :h] = ch
        rows = (-np.arange(n)) % n
        out[:, h:] = np.conj(ch[rows][:, h - 2 : 0 : -1])
        return out

    def factors(self, h: float) -> tuple[np.ndarray, np.ndarray]:
        f = self._factors.get(h)
        if f is None:
            if len(self._factors) > 8:
                self._factors.clear()
            f = (np.exp(-self.rate * h), np.exp(-self.rate * (h / 2)))
            self._factors[h] = f
        return f

    def rhs(self, c: np.ndarray) -> tuple[np.ndarray, float]:
        """N(theta) = -u . grad(theta) and max(|u1| + |u2|) on the grid."""
        s = (self.grid.n, self.grid.n)
        u1, u2, d1, d2 = (np.fft.irfft2(m * c, s=s) for m in self.sym)
        out = np.fft.rfft2(u1 * d1 + u2 * d2) * self.out_scale
        return out, float(np.max(np.abs(u1) + np.abs(u2)))

    def step(self, c: np.ndarray, h: float, a: Optional[np.ndarray] = None) -> np.ndarray:
        e, e2 = self.factors(h)
        if a is None:
            a = self.rhs(c)[0]
        b = self.rhs(e2 * (c + 0.5 * h * a))[0]
        cc = self.rhs(e2 * c + 0.5 * h * b)[0]
        d = self.rhs(e * c + h * e2 * cc)[0]
        return e * c + (h / 6.0) * (e * a + 2.0 * e2 * (b + cc) + d)

    def norms(self, c: np.ndarray) -> tuple[float, float, float]:
        a = np.abs(c)
        l2 = self.grid.l * math.sqrt(float(np.sum(self.w_l2 * a * a)))
        return float(np.sum(self.w_low * a)), float(np.sum(self.w_one * a)), l2


def _require_dynamic_field(theta: SpectralField):
    if not theta.is_mean_zero():
        raise ValueError(f"QG dynamics require a mean-zero field (c0 = {theta.mean!r})")


def nonlinear_term(theta: SpectralField, dealias_on: bool = True) -> SpectralField:
    _require_dynamic_field(theta)
    ops = _Operators(theta.grid, 1.0, 1.0, dealias_on)
    return theta.with_coeffs(ops.to_full_spectrum(ops.rhs(ops.to_half(theta.coeffs))[0]))


def step_ifrk4(state: SimState, params: SimParams, dt: Optional[float] = None) -> SimState:
    """One integrating-factor RK4 step of size ``dt`` (default ``params.dt``)."""
    h = params.dt if dt is None else dt
    if not h > 0:
        raise ValueError(f"step size must be > 0, got {h}")
    ops = _Operators(state.theta.grid, params.alpha, params.k, params.dealias_on)
    c = ops.to_full_spectrum(ops.step(ops.to_half(state.theta.coeffs), h))
    if not np.all(np.isfinite(c)):
        raise BlowUpError(f"non-finite coefficients at step {state.step_count + 1}", state.step_count + 1, state.t + h)
    return SimState(state.t + h, state.theta.with_coeffs(c), state.step_count + 1)


def cfl_dt(u: VelocityField, grid: Grid, cfl_coeff: float) -> float:
    u1, u2 = u.physical()
    return _cfl_from_speed(float(np.max(np.abs(u1) + np.abs(u2))), grid, cfl_coeff)


def _cfl_from_speed(speed: float, grid: Grid, cfl_coeff: float) -> float:
    if speed == 0:
        return math.inf
    return cfl_coeff * (grid.l / grid.n) / speed


def exact_decay_reference(a: float, m: int, alpha: float, k: float, t: float, l: float = 2 * math.pi) -> float:
    """Amplitude at time t of a * cos(m * 2*pi/l * x_j); the nonlinearity vanishes for such data."""
    if m == 0:
        raise ValueError("the zero mode has no decay reference")
    kappa = abs(m) * 2 * math.pi / l
    return a * math.exp(-k * kappa ** (2 * alpha) * t)


Observer = Callable[[float, SpectralField], None]


def simulate(
    theta0,
    params: SimParams,
    observer: Optional[Observer] = None,
    snapshot_every: int = 0,
    on_snapshot: Optional[Callable[[SimState], None]] = None,
) -> NormSeries:
    """Integrate from ``theta0`` (a SpectralField, or a SimState to resume) up to ``params.t_end``.

    Each step uses min(params.dt, CFL estimate), shortened to land on t_end.
    A record is taken at the start, every ``record_every`` steps and at the end;
    the X^1 time integral is accumulated by the trapezoid rule on every step.
    """
    state = theta0 if isinstance(theta0, SimState) else SimState(0.0, theta0, 0)
    theta = state.theta
    _require_dynamic_field(theta)
    if theta.hermitian_defect() > 1e-12 * max(1.0, float(np.abs(theta.coeffs).max())):
        raise ValueError("initial field is not Hermitian")

    grid = theta.grid
    ops = _Operators(grid, params.alpha, params.k, params.dealias_on)
    c = ops.to_half(theta.coeffs)
    c[0, 0] = 0
    t = state.t
    step = state.step_count
    series = NormSeries(params.alpha)
    norms = ops.norms

    def as_state():
        return SimState(t, theta.with_coeffs(ops.to_full_spectrum(c)), step)

    chi_low, chi_one, l2 = norms(c)
    integral = 0.0

    def record():
        series.append(NormRecord(t, chi_low, chi_one, l2, integral))
        if observer is not None:
            observer(t, as_state().theta)

    record()
    t_stop = params.t_end
    eps = 1e-12 * max(1.0, abs(t_stop))
    while t_stop - t > eps:
        a, speed = ops.rhs(c)
        h = min(params.dt, _cfl_from_speed(speed, grid, params.cfl_coeff))
        if t + h > t_stop - eps:
            h = t_stop - t
        c = ops.step(c, h, a)
        t = t_stop if h == t_stop - t else t + h
        step += 1
        if not np.all(np.isfinite(c)):
            series.final_state = as_state()
            raise BlowUpError(f"non-finite coefficients at step {step} (t = {t:.6g})", step, t, series)
        prev_one = chi_one
        chi_low, chi_one, l2 = norms(c)
        integral += 0.5 * h * (prev_one + chi_one)
        if chi_low > BLOWUP_CHI:
            series.final_state = as_state()
            raise BlowUpError(f"critical norm {chi_low:.3e} exceeds {BLOWUP_CHI:g} at step {step}", step, t, series)
        done = not t_stop - t > eps
        if (step - state.step_count) % params.record_every == 0 or done:
            record()
        if on_snapshot is not None and snapshot_every and (step - state.step_count) % snapshot_every == 0:
            on_snapshot(as_state())

    series.final_state = as_state()
    return series


def l2_balance_residual(theta: SpectralField, params: SimParams, dt: Optional[float] = None) -> float:
    """|E(t+h) - E(t) + 2k int_t^{t+h} ||Lambda^alpha theta||^2| over one step, E = ||theta||_L2^2.

    The dissipation integral uses Simpson's rule with the midpoint state from a
    half step, so the residual measures the time stepper rather than the quadrature.
    """
    h = params.dt if dt is None else dt
    grid = theta.grid
    state = SimState(0.0, theta)
    mid = step_ifrk4(state, params, h / 2).theta
    end = step_ifrk4(state, params, h).theta
    w = grid.power(2 * params.alpha)

    def energy(f):
        return grid.l ** 2 * float(np.sum(np.abs(f.coeffs) ** 2))

    def dissipation(f):
        return grid.l ** 2 * float(np.sum(w * np.abs(f.coeffs) ** 2))

    integral = h / 6.0 * (dissipation(theta) + 4 * dissipation(mid) + dissipation(end))
    return abs(energy(end) - energy(theta) + 2 * params.k * integral)
