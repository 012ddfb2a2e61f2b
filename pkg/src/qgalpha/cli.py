"""Command-line driver: ``qg run|verify-thm1|verify-thm2|sweep|resume``.

Exit codes: 0 success, 1 usage/config error, 2 numerical abort,
3 theorem check failed.
"""

from __future__ import annotations

import argparse
import itertools
import logging
import os
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path
from typing import Optional, Sequence

from .checkpoint import CheckpointError, read_checkpoint, write_checkpoint
from .config import ConfigError, RunConfig, format_config, load_config, parse_config
from .diagnostics import NormSeries, decay_summary, theorem1_functional
from .dynamics import BlowUpError, SimParams, SimState, simulate, warn_if_decay_not_covered
from .initdata import build

log = logging.getLogger("qgalpha")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_ABORT = 2
EXIT_THEOREM = 3

SERIES_HEADER = "t,chi_low,chi_one,l2,int_chi_one"


def fmt(x) -> str:
    if x is None:
        return "none"
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def write_rows(path: Path, header: str, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(fmt(x) for x in row) + "\n")


def write_series(series: NormSeries, out: Path):
    write_rows(out / "series.csv", SERIES_HEADER, series.records)
    write_plot_script(out)


PLOT_SCRIPT = """\
# gnuplot script; run with: gnuplot plot_series.gp
set datafile separator ','
set key autotitle columnhead
set logscale y
set xlabel 't'
set terminal pngcairo size 900,600
set output 'series.png'
plot 'series.csv' using 1:2 with lines title 'X^(1-2 alpha)', \\
     '' using 1:3 with lines title 'X^1', \\
     '' using 1:4 with lines title 'L2'
"""


def write_plot_script(out: Path):
    (out / "plot_series.gp").write_text(PLOT_SCRIPT, encoding="utf-8")


def output_dir(cfg: RunConfig) -> Path:
    out = Path(os.environ.get("QG_OUT_DIR") or cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def initial_field(cfg: RunConfig):
    return build(cfg.init, cfg.grid, alpha=cfg.params.alpha)


def _run_sim(cfg: RunConfig, out: Path, start=None) -> NormSeries:
    theta0 = initial_field(cfg) if start is None else start
    params = cfg.params

    def snapshot(state: SimState):
        write_checkpoint(state, out / f"checkpoint_{state.step_count:08d}.qgx", params.alpha, params.k)

    try:
        series = simulate(theta0, params, snapshot_every=cfg.snapshot_every, on_snapshot=snapshot)
    except BlowUpError as exc:
        if exc.series is not None:
            write_series(exc.series, out)
        raise
    write_series(series, out)
    if cfg.snapshot_every:
        write_checkpoint(series.final_state, out / "checkpoint_final.qgx", params.alpha, params.k)
    return series


def cmd_run(cfg: RunConfig) -> int:
    out = output_dir(cfg)
    series = _run_sim(cfg, out)
    last = series[-1]
    print(f"RUN t={fmt(last.t)} chi_low={fmt(last.chi_low)} records={len(series)} out={out}")
    return EXIT_OK


def cmd_verify_thm1(cfg: RunConfig) -> int:
    out = output_dir(cfg)
    series = _run_sim(cfg, out)
    report = theorem1_functional(series, tolerance=cfg.tolerance)
    write_rows(out / "thm1_report.csv", "t,lhs,rhs,margin", report.table)
    if report.satisfied:
        print(f"THM1 OK worst_margin={fmt(report.worst_margin)} smallness_ok={fmt(report.smallness_ok)}")
        return EXIT_OK
    print(
        f"THM1 VIOLATION worst_margin={fmt(report.worst_margin)} theta0_norm={fmt(report.theta0_norm)} "
        f"smallness_ok={fmt(report.smallness_ok)}"
    )
    return EXIT_THEOREM if report.smallness_ok else EXIT_OK


def cmd_verify_thm2(cfg: RunConfig) -> int:
    warn_if_decay_not_covered(cfg.params.alpha)
    out = output_dir(cfg)
    series = _run_sim(cfg, out)
    verdict = decay_summary(series, cfg.params.alpha)
    c0 = series[0].chi_low
    write_rows(
        out / "thm2_report.csv",
        "t,chi_low,ratio",
        ((r.t, r.chi_low, 0.0 if c0 == 0 else r.chi_low / c0) for r in series),
    )
    print(
        f"THM2 ratio_final={fmt(verdict.ratio_final)} t_half={fmt(verdict.t_half)} "
        f"applicable={fmt(verdict.applicable)}"
    )
    if verdict.applicable and not verdict.ratio_final < cfg.thm2_threshold:
        return EXIT_THEOREM
    return EXIT_OK


SWEEP_HEADER = (
    "alpha,k,target_norm,theta0_norm,smallness_ok,worst_margin,thm1_satisfied,"
    "ratio_final,t_half,decay_applicable,status"
)


def _sweep_member(job) -> tuple:
    text, overrides, out = job
    cfg = parse_config(text, overrides)
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    alpha, k = cfg.params.alpha, cfg.params.k
    target = cfg.init.target_norm
    try:
        series = _run_sim(cfg, out)
    except BlowUpError as exc:
        log.warning("sweep member %s aborted: %s", out.name, exc)
        return (alpha, k, target, None, None, None, None, None, None, None, "abort")
    report = theorem1_functional(series, tolerance=cfg.tolerance)
    write_rows(out / "thm1_report.csv", "t,lhs,rhs,margin", report.table)
    verdict = decay_summary(series, alpha)
    status = "ok" if report.satisfied or not report.smallness_ok else "thm1_violation"
    return (
        alpha,
        k,
        target,
        report.theta0_norm,
        report.smallness_ok,
        report.worst_margin,
        report.satisfied,
        verdict.ratio_final,
        verdict.t_half,
        verdict.applicable,
        status,
    )


def cmd_sweep(cfg: RunConfig) -> int:
    out = output_dir(cfg)
    base_text = format_config(cfg)
    axes = {
        "alpha": cfg.sweep.get("alpha", [cfg.params.alpha]),
        "k": cfg.sweep.get("k", [cfg.params.k]),
        "target_norm": cfg.sweep.get("target_norm", [cfg.init.target_norm]),
    }
    jobs = []
    for alpha, k, target in itertools.product(axes["alpha"], axes["k"], axes["target_norm"]):
        overrides = {"alpha": repr(alpha), "k": repr(k), "init.target_norm": repr(target) if target is not None else "none"}
        name = f"alpha={alpha:g}_k={k:g}_target={'none' if target is None else format(target, 'g')}"
        jobs.append((base_text, overrides, str(out / name)))
    if cfg.sweep_workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.sweep_workers) as pool:
            rows = list(pool.map(_sweep_member, jobs))
    else:
        rows = [_sweep_member(job) for job in jobs]
    write_rows(out / "sweep_summary.csv", SWEEP_HEADER, rows)
    failed = [r for r in rows if r[-1] == "thm1_violation"]
    aborted = [r for r in rows if r[-1] == "abort"]
    print(f"SWEEP members={len(rows)} thm1_violations={len(failed)} aborted={len(aborted)}")
    if failed:
        return EXIT_THEOREM
    if aborted:
        return EXIT_ABORT
    return EXIT_OK


def cmd_resume(checkpoint: str, t_end: float, cfg: Optional[RunConfig] = None, dt: Optional[float] = None) -> int:
    ck = read_checkpoint(checkpoint)
    state = ck.state
    if cfg is None:
        params = SimParams(alpha=ck.alpha, k=ck.k, t_end=t_end)
        cfg_out = RunConfig(grid=state.theta.grid, params=params, init=None, out_dir="qg_out")
    else:
        if cfg.grid != state.theta.grid or cfg.params.alpha != ck.alpha or cfg.params.k != ck.k:
            raise ConfigError("checkpoint grid/alpha/k do not match the config")
        params = replace(cfg.params, t_end=t_end)
        cfg_out = replace(cfg, params=params)
    if dt is not None:
        cfg_out = replace(cfg_out, params=replace(cfg_out.params, dt=dt))
    if not t_end > state.t:
        raise ConfigError(f"--t-end {t_end} must exceed the checkpoint time {state.t}")
    out = output_dir(cfg_out)
    series = _run_sim(cfg_out, out, start=state)
    last = series[-1]
    print(f"RESUME t0={fmt(state.t)} t={fmt(last.t)} chi_low={fmt(last.chi_low)} out={out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qg", description="Dissipative quasi-geostrophic solver and norm checks")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("run", "verify-thm1", "verify-thm2", "sweep"):
        sp = sub.add_parser(name)
        sp.add_argument("config")
    sp = sub.add_parser("resume")
    sp.add_argument("checkpoint")
    sp.add_argument("--t-end", type=float, required=True)
    sp.add_argument("--config", default=None, help="config supplying dt, cfl, record_every, out_dir")
    sp.add_argument("--dt", type=float, default=None)
    return p


COMMANDS = {"run": cmd_run, "verify-thm1": cmd_verify_thm1, "verify-thm2": cmd_verify_thm2, "sweep": cmd_sweep}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    warnings.simplefilter("always", UserWarning)
    try:
        if args.command == "resume":
            cfg = load_config(args.config) if args.config else None
            return cmd_resume(args.checkpoint, args.t_end, cfg, args.dt)
        return COMMANDS[args.command](load_config(args.config))
    except (ConfigError, CheckpointError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BlowUpError as exc:
        print(f"ABORT {exc}", file=sys.stderr)
        return EXIT_ABORT


if __name__ == "__main__":
    sys.exit(main())
