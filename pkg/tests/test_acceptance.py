"""Exit criteria. Each test prints one pass/fail line; all lines are repeated
in the pytest terminal summary under "acceptance criteria"."""

import math
import time

import numpy as np
import pytest

from conftest import random_field, samples_of
from oracles import convolution_oracle
from qgalpha.checkpoint import read_checkpoint, write_checkpoint
from qgalpha.cli import main
from qgalpha.diagnostics import decay_summary, scaling_invariance_check, theorem1_functional
from qgalpha.dynamics import SimParams, SimState, l2_balance_residual, nonlinear_term, simulate, step_ifrk4
from qgalpha.initdata import KINDS, InitSpec, build
from qgalpha.spectral import Grid, forward_transform

ALPHAS = (0.7, 0.75, 0.9)
THETA0_NORM = 0.2
THM1_HORIZON = 20.0
THM2_HORIZON = 30.0
THM1_TOL = 1e-6
THM2_RATIO = 0.05
L2_SLACK = 1e-12

# spectrum/mode choices for the four generator kinds
INIT_SPECS = {
    "single_mode": InitSpec("single_mode", 1.0, (1, 0), target_norm=THETA0_NORM),
    "two_mode": InitSpec("two_mode", 1.0, (1, 0), (0, 2), target_norm=THETA0_NORM),
    "gaussian_spectrum": InitSpec("gaussian_spectrum", 1.0, peak=4.0, width=1.0, seed=7, target_norm=THETA0_NORM),
    "random_phase": InitSpec("random_phase", 1.0, slope=1.5, seed=11, target_norm=THETA0_NORM),
}


def two_mode_benchmark(grid):
    return build(InitSpec("two_mode", 0.5, (1, 0), (0, 2)), grid)


@pytest.fixture(scope="module")
def long_runs():
    """Every generator kind at every alpha, n = 128, k = 1, integrated to t = 30."""
    grid = Grid(128)
    runs = {}
    for kind in KINDS:
        for alpha in ALPHAS:
            theta0 = build(INIT_SPECS[kind], grid, alpha=alpha)
            params = SimParams(alpha=alpha, k=1.0, dt=0.02, t_end=THM2_HORIZON, cfl_coeff=0.5, record_every=1)
            runs[kind, alpha] = simulate(theta0, params)
    return runs


def test_criterion_1_exact_solution(verdict):
    grid = Grid(64)
    theta0 = build(InitSpec("single_mode", 0.2, (1, 0)), grid)
    start = time.perf_counter()
    series = simulate(theta0, SimParams(alpha=0.75, k=1.0, dt=1e-3, t_end=1.0))
    elapsed = time.perf_counter() - start
    err = abs(series[-1].chi_low - 0.2 * math.exp(-1))
    ok = err <= 1e-8 and elapsed < 5.0 and series[-1].t == 1.0
    verdict(1, "exact-solution fidelity", ok, f"|error| = {err:.2e} (tol 1e-8), runtime {elapsed:.2f}s (limit 5s)")
    assert ok


@pytest.mark.slow
def test_criterion_2_theorem1_inequality(long_runs, verdict):
    worst = math.inf
    failures = []
    for (kind, alpha), series in long_runs.items():
        assert series[0].chi_low == pytest.approx(THETA0_NORM, rel=1e-12)
        report = theorem1_functional(series, THETA0_NORM, THM1_TOL)
        margins = [m for (t, _, _, m) in report.table if t <= THM1_HORIZON + 1e-9]
        w = min(margins)
        worst = min(worst, w)
        if not (report.smallness_ok and w >= -THM1_TOL and report.satisfied):
            failures.append(f"{kind}@{alpha}: {w:.3e}")
    ok = not failures
    verdict(2, "small-data norm inequality", ok, f"12 runs, worst margin {worst:.3e} (tol -1e-6){'; ' + ', '.join(failures) if failures else ''}")
    assert ok


@pytest.mark.slow
def test_criterion_3_decay(long_runs, verdict):
    ratios = {}
    for (kind, alpha), series in long_runs.items():
        v = decay_summary(series, alpha)
        assert v.applicable
        assert series[-1].t == pytest.approx(THM2_HORIZON)
        ratios[kind, alpha] = v.ratio_final
    worst = max(ratios.values())
    ok = worst < THM2_RATIO
    verdict(3, "long-time decay", ok, f"max ratio_final at t=30 is {worst:.3e} (threshold {THM2_RATIO})")
    assert ok


def test_criterion_4_nonlinear_oracle(verdict):
    grid = Grid(16)
    worst = 0.0
    for seed in range(20):
        theta = random_field(grid, 1000 + seed, nyquist=True)
        diff = np.abs(nonlinear_term(theta, dealias_on=False).coeffs - convolution_oracle(theta, False)).max()
        worst = max(worst, diff)
    theta = forward_transform(samples_of(grid, lambda x1, x2: np.cos(x1) + np.cos(2 * x2)), grid)
    expected = forward_transform(samples_of(grid, lambda x1, x2: np.sin(x1) * np.sin(2 * x2)), grid)
    closed = np.abs(nonlinear_term(theta, dealias_on=False).coeffs - expected.coeffs).max()
    ok = worst <= 1e-10 and closed <= 1e-12
    verdict(4, "nonlinear-term oracle", ok, f"20 fields max diff {worst:.2e} (tol 1e-10); closed form {closed:.2e} (tol 1e-12)")
    assert ok


@pytest.mark.slow
def test_criterion_5_dissipation(long_runs, verdict):
    grid = Grid(32)
    params = SimParams(alpha=0.75, k=1.0, dt=1e-3)
    state = SimState(0.0, two_mode_benchmark(grid))
    residual = 0.0
    for _ in range(100):
        residual = max(residual, l2_balance_residual(state.theta, params))
        state = step_ifrk4(state, params)
    rise = max(float(np.max(np.diff(s.l2))) for s in long_runs.values())
    ok = residual <= 1e-10 and rise <= L2_SLACK
    verdict(5, "dissipation identity", ok, f"max per-step L2 balance residual {residual:.2e} (tol 1e-10); max L2 increase per step {rise:.2e} (slack 1e-12)")
    assert ok


def test_criterion_6_criticality(verdict):
    worst = 0.0
    for i, alpha in enumerate(ALPHAS):
        for lam in (2, 3):
            field = random_field(Grid(32, 2 * math.pi), 50 + i * 7 + lam, nyquist=True)
            worst = max(worst, scaling_invariance_check(field, lam, alpha))
    ok = worst <= 1e-12
    verdict(6, "criticality of X^(1-2 alpha)", ok, f"max |difference| {worst:.2e} (tol 1e-12)")
    assert ok


def test_criterion_7_order(verdict):
    grid = Grid(32)
    theta0 = two_mode_benchmark(grid)
    params = SimParams(alpha=0.75, k=1.0)

    def solve(dt, t_end=1.0):
        s = SimState(0.0, theta0)
        for _ in range(round(t_end / dt)):
            s = step_ifrk4(s, params, dt)
        return s.theta.coeffs

    dts = (0.2, 0.1, 0.05, 0.025)
    sols = [solve(dt) for dt in dts]
    diffs = [np.abs(a - b).max() for a, b in zip(sols, sols[1:])]
    orders = [math.log2(a / b) for a, b in zip(diffs, diffs[1:])]
    ok = min(orders) >= 3.8
    verdict(7, "order of accuracy", ok, "observed orders " + ", ".join(f"{p:.3f}" for p in orders) + " (need >= 3.8)")
    assert ok


CLI_CONFIG = """\
n = 32
alpha = 0.75
k = 1.0
dt = 0.01
t_end = 1.0
record_every = 5
snapshot_every = 50
init.kind = random_phase
init.seed = 4
init.target_norm = 0.2
"""


def test_criterion_8_reproducibility(tmp_path, monkeypatch, verdict):
    grid = Grid(32)
    theta0 = build(InitSpec("random_phase", seed=4, target_norm=0.2), grid, alpha=0.75)
    full_params = SimParams(alpha=0.75, k=1.0, dt=0.01, t_end=1.0)
    full = simulate(theta0, full_params)
    first = simulate(theta0, SimParams(alpha=0.75, k=1.0, dt=0.01, t_end=0.5))
    path = tmp_path / "half.qgx"
    write_checkpoint(first.final_state, path, alpha=0.75, k=1.0)
    ck = read_checkpoint(path)
    rest = simulate(ck.state, full_params)

    offset = {round(r.t, 9): r.integral_chi_one for r in full}[round(rest[0].t, 9)]
    by_t = {round(r.t, 9): r for r in full}
    worst = 0.0
    for r in rest:
        ref = by_t[round(r.t, 9)]
        worst = max(
            worst,
            abs(r.t - ref.t),
            abs(r.chi_low - ref.chi_low),
            abs(r.chi_one - ref.chi_one),
            abs(r.l2 - ref.l2),
            abs(r.integral_chi_one - (ref.integral_chi_one - offset)),
        )

    cfg = tmp_path / "run.cfg"
    cfg.write_text(CLI_CONFIG)
    blobs = []
    for i in range(2):
        monkeypatch.setenv("QG_OUT_DIR", str(tmp_path / f"out{i}"))
        assert main(["verify-thm1", str(cfg)]) == 0
        blobs.append(
            [(tmp_path / f"out{i}" / name).read_bytes() for name in ("series.csv", "thm1_report.csv")]
        )
    identical = blobs[0] == blobs[1]
    ok = worst <= 1e-12 and identical and len(rest) == 51
    verdict(8, "reproducibility and persistence", ok, f"resume max deviation {worst:.2e} (tol 1e-12); repeated CSV byte-identical: {identical}")
    assert ok
