"""Configuration-driven command line: potential tables, solves, sweeps, checks.

Subcommands:

* ``potential`` writes the potential/derivative table (``potential.csv``) and
  the structural constants (``constants.txt``).
* ``solve`` runs the continuation solver and writes the solution fields
  (``fields.csv``), the diagnostics report (``report.txt``), and the residual
  history (``convergence.csv``).
* ``sweep`` runs a delta or eps sweep and writes one diagnostics row per value
  (``sweep.csv``) plus per-value field files.
* ``check`` executes the built-in verification suites and exits nonzero on
  any failure.

All numeric output uses ``%.12e`` formatting with LF line endings, and every
code path is deterministic: identical configurations produce byte-identical
files, including under parallel sweep execution (results are buffered and
written in input order).
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path


from . import potential, solver
from .config import ConfigError, RunConfig, load_config, parse_config_text
from .checks import run_all_checks
from .diagnostics import DiagnosticsReport, compute_report

__all__ = ["main", "cmd_potential", "cmd_solve", "cmd_sweep", "cmd_check"]


def _fmt(x: float) -> str:
    return f"{float(x):.12e}"


def _write_text(path: Path, text: str) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="\n") as fh:
            fh.write(text)
    except OSError as err:
        raise OSError(f"cannot write {path}: {err}") from None


def _write_csv(path: Path, header: list[str], rows: list[list[str]]) -> None:
    lines = [",".join(header)]
    lines += [",".join(row) for row in rows]
    _write_text(path, "\n".join(lines) + "\n")


def _fields_rows(state: solver.State) -> list[list[str]]:
    x = state.rho.grid.cell_centers()
    cols = (x, state.rho.values, state.u.values, state.mu.values, state.c.values)
    return [[_fmt(col[i]) for col in cols] for i in range(x.size)]


def cmd_potential(cfg: RunConfig, out_dir: Path) -> int:
    """Write the tabulated potential curves and the structural constants."""
    p = cfg.spec.potential
    table = potential.figure1_table(p, cfg.table_grid)
    rows = [[_fmt(v) for v in row] for row in table]
    _write_csv(out_dir / "potential.csv", list(potential.FIGURE1_COLUMNS), rows)
    cons = potential.constants(p)
    _write_text(
        out_dir / "constants.txt",
        f"c_star = {_fmt(cons.c_star)}\n"
        f"spinodal = {_fmt(cons.spinodal)}\n"
        f"bound_M_estimate = {_fmt(cons.bound_M_estimate)}\n",
    )
    return 0


def cmd_solve(cfg: RunConfig, out_dir: Path) -> int:
    """Run the continuation solver and write fields, report, and history."""
    try:
        state, log = solver.continuation_solve(cfg.spec, cfg.controls)
    except solver.DivergenceError as err:
        print(f"solve failed: {err}", file=sys.stderr)
        return 1
    _write_csv(out_dir / "fields.csv", ["x", "rho", "u", "mu", "c"], _fields_rows(state))
    report = compute_report(state, cfg.spec, eps=log.final_eps)
    _write_text(out_dir / "report.txt", report.to_kv_text())
    conv_rows = [
        [str(si + 1), str(it + 1), _fmt(res)]
        for si, stage in enumerate(log.stages)
        for it, res in enumerate(stage.residuals)
    ]
    _write_csv(out_dir / "convergence.csv", ["stage", "iteration", "residual"], conv_rows)
    return 0


def _sweep_value_cold(args) -> tuple[str, DiagnosticsReport | None, solver.State | None]:
    """Solve one sweep value from a cold start (process-pool worker)."""
    spec_base, controls, key, value = args
    if key == "delta":
        spec_v = replace(spec_base, potential=replace(spec_base.potential, delta=value))
        ctl_v = controls
        eps_final = controls.eps_schedule[-1]
    else:
        spec_v = replace(spec_base, eps=value)
        ctl_v = replace(controls, eps_schedule=(value,))
        eps_final = value
    try:
        state, _ = solver.continuation_solve(spec_v, ctl_v)
        return "ok", compute_report(state, spec_v, eps=eps_final), state
    except solver._SWEEP_ERRORS as err:
        return f"failed({type(err).__name__})", None, None


def cmd_sweep(cfg: RunConfig, sweep_key: str, values: list[float], out_dir: Path) -> int:
    """Run a regularization sweep and write per-value diagnostics rows.

    With ``sweep.max_parallel = 1`` (the default) the values are solved
    sequentially with warm starts; larger settings solve each value
    independently from a cold start, distributing them over a process pool.
    Either way the output files depend only on the configuration.
    """
    if sweep_key not in ("delta", "eps"):
        print(f"sweep: unknown sweep key {sweep_key!r}", file=sys.stderr)
        return 2
    if not values:
        print("sweep: values list is empty", file=sys.stderr)
        return 2
    if any(b >= a for a, b in zip(values, values[1:])):
        print("sweep: values must be strictly decreasing toward the limit", file=sys.stderr)
        return 2

    if cfg.max_parallel == 1:
        run = solver.delta_sweep if sweep_key == "delta" else solver.eps_sweep
        sweep = run(cfg.spec, values, cfg.controls)
        statuses, reports, states = sweep.statuses, sweep.reports, sweep.states
    else:
        jobs = [(cfg.spec, cfg.controls, sweep_key, v) for v in values]
        workers = min(cfg.max_parallel, len(values))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_value_cold, jobs))
        statuses = [r[0] for r in results]
        reports = [r[1] for r in results]
        states = [r[2] for r in results]

    header = [sweep_key, "status"] + DiagnosticsReport.csv_header()
    rows = []
    for value, status, report in zip(values, statuses, reports):
        cells = [_fmt(value), status]
        if report is None:
            cells += ["nan"] * len(DiagnosticsReport.csv_header())
        else:
            cells += [_fmt(v) for v in report.csv_values()]
        rows.append(cells)
    _write_csv(out_dir / "sweep.csv", header, rows)

    for value, state in zip(values, states):
        if state is not None:
            name = f"fields_{sweep_key}_{value:.6g}.csv"
            _write_csv(out_dir / name, ["x", "rho", "u", "mu", "c"], _fields_rows(state))

    failed = [f"{v:g}: {s}" for v, s in zip(values, statuses) if s != "ok"]
    if failed:
        print("sweep: failures -> " + "; ".join(failed), file=sys.stderr)
        return 1
    return 0


def cmd_check(cfg: RunConfig) -> int:
    """Run the verification suites and print a pass/fail table."""
    results = run_all_checks(cfg)
    width = max(len(r.name) for r in results)
    for r in results:
        flag = "PASS" if r.passed else "FAIL"
        print(f"{flag}  {r.name:<{width}}  {r.detail}")
    n_fail = sum(not r.passed for r in results)
    print(f"{len(results) - n_fail}/{len(results)} checks passed")
    return 0 if n_fail == 0 else 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chns1d",
        description="Stationary two-phase mixture flow on a 1-D interval",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("potential", "tabulate the regularized potential and its constants"),
        ("solve", "run the continuation solver on the configured problem"),
        ("sweep", "solve a decreasing list of delta or eps values"),
        ("check", "run the built-in verification suites"),
    ):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--config", type=Path, default=None, help="configuration file")
        if name != "check":
            sp.add_argument("--out", type=Path, default=None, help="output directory")
        if name == "sweep":
            sp.add_argument("--sweep-key", choices=("delta", "eps"), required=True)
            sp.add_argument("--values", type=str, required=True,
                            help="comma-separated decreasing values")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config) if args.config is not None else parse_config_text("")
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2

    try:
        if args.command == "check":
            return cmd_check(cfg)
        out_dir = args.out if args.out is not None else cfg.output_dir
        if args.command == "potential":
            return cmd_potential(cfg, out_dir)
        if args.command == "solve":
            return cmd_solve(cfg, out_dir)
        try:
            values = [float(tok) for tok in args.values.split(",") if tok.strip()]
        except ValueError as err:
            print(f"sweep: cannot parse values: {err}", file=sys.stderr)
            return 2
        return cmd_sweep(cfg, args.sweep_key, values, out_dir)
    except OSError as err:
        print(str(err), file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
