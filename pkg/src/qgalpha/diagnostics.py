"""Critical norms, time series of norms, and the theorem checks built on them.

The X^sigma norm of a field on the torus is the lattice sum
``sum_{k != 0} |k|^sigma |c_k|`` (no 2*pi factors), and the L2 norm is
``l * sqrt(sum |c_k|^2)`` by Parseval.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .spectral import Grid, SpectralField

SMALLNESS_THRESHOLD = 0.25
DEFAULT_TOLERANCE = 1e-6
MONOTONE_TOL = 1e-10


def critical_sigma(alpha: float) -> float:
    return 1.0 - 2.0 * alpha


def chi_norm(field: SpectralField, sigma: float) -> float:
    if sigma < 0 and not field.is_mean_zero():
        raise ValueError(f"X^{sigma} norm needs a mean-zero field (c0 = {field.mean!r})")
    return _chi(field.coeffs, field.grid.power(sigma))


def _chi(coeffs: np.ndarray, weight: np.ndarray) -> float:
    # weight vanishes at the zero mode, so c0 never contributes
    return float(np.sum(weight * np.abs(coeffs)))


def l2_norm(field: SpectralField) -> float:
    return field.grid.l * math.sqrt(float(np.sum(np.abs(field.coeffs) ** 2)))


class NormRecord(NamedTuple):
    t: float
    chi_low: float
    chi_one: float
    l2: float
    integral_chi_one: float


@dataclass
class NormSeries:
    """Time-ordered norm records of one trajectory.

    ``final_state`` is filled in by the simulation driver with the state at the
    last step taken (``None`` for hand-built series).
    """

    alpha: float
    records: list[NormRecord] = field(default_factory=list)
    final_state: Optional[object] = None

    def append(self, record: NormRecord):
        if self.records:
            last = self.records[-1]
            if not record.t > last.t:
                raise ValueError(f"record time {record.t} does not advance past {last.t}")
            if record.integral_chi_one < last.integral_chi_one:
                raise ValueError("time integral of the X^1 norm decreased")
        if min(record.chi_low, record.chi_one, record.l2) < 0:
            raise ValueError("norms must be non-negative")
        self.records.append(record)

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def __getitem__(self, i):
        return self.records[i]

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.records], dtype=float)

    @property
    def t(self) -> np.ndarray:
        return self.column("t")

    @property
    def chi_low(self) -> np.ndarray:
        return self.column("chi_low")

    @property
    def l2(self) -> np.ndarray:
        return self.column("l2")


@dataclass
class InequalityReport:
    theta0_norm: float
    smallness_ok: bool
    worst_margin: float
    satisfied: bool
    tolerance: float
    table: list[tuple[float, float, float, float]]  # (t, lhs, rhs, margin)


def theorem1_functional(
    series: NormSeries, theta0_norm: Optional[float] = None, tolerance: float = DEFAULT_TOLERANCE
) -> InequalityReport:
    """Evaluate chi_low(t) + (1 - 4 N0)/2 * int_0^t chi_one <= N0 on every record."""
    if not len(series):
        raise ValueError("cannot evaluate the inequality on an empty series")
    first = series[0].chi_low
    if theta0_norm is None:
        theta0_norm = first
    elif not math.isclose(theta0_norm, first, rel_tol=1e-12, abs_tol=1e-15):
        raise ValueError(f"theta0_norm {theta0_norm} differs from the first record {first}")
    factor = (1.0 - 4.0 * theta0_norm) / 2.0
    table = []
    for r in series:
        lhs = r.chi_low + factor * r.integral_chi_one
        table.append((r.t, lhs, theta0_norm, theta0_norm - lhs))
    worst = min(row[3] for row in table)
    return InequalityReport(
        theta0_norm=theta0_norm,
        smallness_ok=theta0_norm < SMALLNESS_THRESHOLD,
        worst_margin=worst,
        satisfied=worst >= -tolerance,
        tolerance=tolerance,
        table=table,
    )


@dataclass
class DecayVerdict:
    ratio_final: float
    t_half: Optional[float]
    tail_monotone: bool
    applicable: bool
    fitted_rate: Optional[float] = None  # descriptive only


def decay_applicable(alpha: float) -> bool:
    return 2.0 / 3.0 < alpha < 1.0


def decay_summary(series: NormSeries, alpha: float) -> DecayVerdict:
    if not len(series):
        raise ValueError("empty series")
    t = series.t
    chi = series.chi_low
    c0 = chi[0]
    ratio = 0.0 if c0 == 0 else float(chi[-1] / c0)

    t_half = None
    below = np.nonzero(chi < 0.5 * c0)[0]
    if c0 > 0 and below.size:
        i = int(below[0])
        if i == 0:
            t_half = float(t[0])
        else:
            # log-linear between the bracketing records; exact for exponentials
            y0, y1 = chi[i - 1], chi[i]
            target = 0.5 * c0
            if y1 > 0:
                frac = math.log(y0 / target) / math.log(y0 / y1)
            else:
                frac = (y0 - target) / (y0 - y1)
            t_half = float(t[i - 1] + frac * (t[i] - t[i - 1]))

    tail = chi[len(chi) // 2 :]
    tail_monotone = bool(np.all(np.diff(tail) <= MONOTONE_TOL))

    fitted = None
    tail_t = t[len(t) // 2 :]
    pos = tail > 0
    if pos.sum() >= 2 and np.ptp(tail_t[pos]) > 0:
        fitted = float(-np.polyfit(tail_t[pos], np.log(tail[pos]), 1)[0])

    return DecayVerdict(ratio, t_half, tail_monotone, decay_applicable(alpha), fitted)


def rescaled_field(field: SpectralField, lam: int, alpha: float, enlarge: bool = True) -> SpectralField:
    """theta_lam(x) = lam^(2 alpha - 1) theta(lam x), placed on the lattice mode lam*k."""
    if int(lam) != lam or lam < 1:
        raise ValueError(f"lambda must be a positive integer, got {lam}")
    lam = int(lam)
    g = field.grid
    nz = np.nonzero(field.coeffs)
    m1 = g.m1[nz] * lam
    m2 = g.m2[nz] * lam
    top = int(max(np.abs(m1).max(initial=0), np.abs(m2).max(initial=0)))
    n_out = g.n
    if top > n_out // 2:
        if not enlarge:
            raise ValueError(f"scaled mode {top} overflows the n={g.n} grid")
        n_out = g.n * lam
    out_grid = Grid(n_out, g.l)
    out = np.zeros((n_out, n_out), dtype=np.complex128)
    out[m1 % n_out, m2 % n_out] = lam ** (2 * alpha - 1) * field.coeffs[nz]
    return SpectralField(out_grid, out)


def scaling_invariance_check(field: SpectralField, lam: int, alpha: float) -> float:
    sigma = critical_sigma(alpha)
    scaled = rescaled_field(field, lam, alpha)
    return abs(chi_norm(scaled, sigma) - chi_norm(field, sigma))
