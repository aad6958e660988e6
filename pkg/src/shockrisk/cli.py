"""Command line interface.

Four subcommands: ``analyze`` (closed-form report), ``simulate-m``
(Monte Carlo survival curve of the maximal loss), ``simulate-paths``
(event-driven surplus paths), and ``validate`` (cross-route consistency
suite).  Simulation commands write an RFC-4180-style CSV, a
``.manifest.json`` sidecar recording the run parameters, and a rendered
figure next to the CSV.

Exit codes: 0 success, 1 validation failure, 2 net profit condition
violated, 3 configuration error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from . import aggregate as aggregate_ops
from . import counting as counting_ops
from . import ruin as ruin_ops
from .config import ConfigError, load_config
from .ruin import NetProfitConditionError
from .validation import run_checks

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NET_PROFIT = 2
EXIT_CONFIG = 3


class _Parser(argparse.ArgumentParser):
    """Argument errors are configuration errors (exit code 3)."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _nonneg_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be a nonnegative integer")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def _positive_float(text: str) -> float:
    value = float(text)
    if value <= 0:
        raise argparse.ArgumentTypeError("must be a positive number")
    return value


def _fmt(value) -> str:
    return format(float(value), ".12g")


def _config_digest(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _write_manifest(csv_path: Path, payload: dict) -> Path:
    manifest_path = csv_path.with_suffix(".manifest.json")
    with open(manifest_path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest_path


def _quiet_analytics(model):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        return ruin_ops.analytics(model)


def cmd_analyze(args) -> int:
    cfg = load_config(args.config)
    model = cfg.build_model()
    ana = _quiet_analytics(model)
    cmoments = counting_ops.moments(model.aggregate.counting, 1.0)
    amoments = aggregate_ops.moments(model.aggregate, 1.0)
    lines = [
        f"shockrisk {__version__} analyze",
        f"rates: lambda0={_fmt(cfg.lambda0)} lambda1={_fmt(cfg.lambda1)} lambda2={_fmt(cfg.lambda2)}",
        "claim means: " + " ".join(
            f"y{i + 1}={_fmt(d.mean)}" for i, d in enumerate(cfg.claims)
        ),
        f"premium rate c={_fmt(model.premium_rate)}, initial capital u={_fmt(model.initial_capital)}",
        "",
        "counting moments at t=1:",
        f"  mean1={_fmt(cmoments.mean1)} mean2={_fmt(cmoments.mean2)} "
        f"cov={_fmt(cmoments.cov)} cor={_fmt(cmoments.cor)}",
        "aggregate moments at t=1:",
        f"  mean1={_fmt(amoments.mean1)} mean2={_fmt(amoments.mean2)} "
        f"var1={_fmt(amoments.var1)} var2={_fmt(amoments.var2)}",
        f"  cov={_fmt(amoments.cov)} cor={_fmt(amoments.cor)} "
        f"mean_total={_fmt(amoments.mean_total)} var_total={_fmt(amoments.var_total)}",
        "",
        f"aggregate claim rate lambda*mu = {_fmt(ana.lambda_mu)}",
        f"mean claim per event mu = {_fmt(ana.mean_per_event)}",
        f"safety loading rho = {_fmt(ana.rho)}",
        f"psi(0) = {_fmt(ana.psi0)}   delta(0) = {_fmt(ana.delta0)}",
        f"ladder weights p1={_fmt(ana.p1)} p2={_fmt(ana.p2)} p0={_fmt(ana.p0)}",
        f"mean deficit at ruin from 0 = {_fmt(ana.mean_deficit)}",
    ]
    if ana.net_profit:
        lines.append(
            f"expected ruin time from 0 given ruin = {_fmt(ana.expected_ruin_time_at_zero)}"
        )
        if ana.adjustment_coefficient is not None:
            lines.append(f"adjustment coefficient = {_fmt(ana.adjustment_coefficient)}")
        else:
            lines.append("adjustment coefficient: none")
    else:
        lines.append("WARNING: net profit condition violated (c <= lambda*mu); ruin is certain")
    print("\n".join(lines))
    if args.out:
        out = Path(args.out)
        rows = [
            ("lambda_mu", _fmt(ana.lambda_mu)),
            ("mean_per_event", _fmt(ana.mean_per_event)),
            ("rho", _fmt(ana.rho)),
            ("psi0", _fmt(ana.psi0)),
            ("delta0", _fmt(ana.delta0)),
            ("p1", _fmt(ana.p1)),
            ("p2", _fmt(ana.p2)),
            ("p0", _fmt(ana.p0)),
            ("mean_deficit", _fmt(ana.mean_deficit)),
            ("expected_ruin_time_at_zero",
             _fmt(ana.expected_ruin_time_at_zero) if ana.net_profit else ""),
            ("adjustment_coefficient",
             _fmt(ana.adjustment_coefficient) if ana.adjustment_coefficient else ""),
            ("count_mean1", _fmt(cmoments.mean1)),
            ("count_mean2", _fmt(cmoments.mean2)),
            ("count_cov", _fmt(cmoments.cov)),
            ("count_cor", _fmt(cmoments.cor)),
            ("agg_mean1", _fmt(amoments.mean1)),
            ("agg_mean2", _fmt(amoments.mean2)),
            ("agg_var1", _fmt(amoments.var1)),
            ("agg_var2", _fmt(amoments.var2)),
            ("agg_cov", _fmt(amoments.cov)),
            ("agg_cor", _fmt(amoments.cor)),
        ]
        _write_csv(out, ("quantity", "value"), rows)
        _write_manifest(out, {
            "command": "analyze",
            "tool_version": __version__,
            "config_path": str(args.config),
            "config_sha256": _config_digest(Path(args.config)),
            "outputs": [out.name],
        })
        print(f"wrote {out}")
    return EXIT_OK if ana.net_profit else EXIT_NET_PROFIT


def cmd_simulate_m(args) -> int:
    cfg = load_config(args.config)
    model = cfg.build_model()
    try:
        if args.grid_max is None or args.grid_step is None:
            default_max, default_step = ruin_ops.default_grid(model)
            grid_max = args.grid_max if args.grid_max is not None else default_max
            grid_step = args.grid_step if args.grid_step is not None else grid_max / 1000.0
        else:
            grid_max, grid_step = args.grid_max, args.grid_step
        curve = ruin_ops.survival_curve_mc(
            model, grid_max, grid_step, args.samples, args.seed, workers=args.workers
        )
    except NetProfitConditionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NET_PROFIT
    out = Path(args.out)
    rows = zip(
        (_fmt(u) for u in curve.u),
        (_fmt(d) for d in curve.delta),
        (_fmt(d) for d in curve.density),
    )
    _write_csv(out, ("u", "delta_hat", "density_hat"), rows)
    fig_path = out.with_suffix(".png")
    from .plots import render_survival_figure

    render_survival_figure(curve, _quiet_analytics(model), fig_path)
    _write_manifest(out, {
        "command": "simulate-m",
        "tool_version": __version__,
        "config_path": str(args.config),
        "config_sha256": _config_digest(Path(args.config)),
        "seed": args.seed,
        "samples": args.samples,
        "grid_max": grid_max,
        "grid_step": grid_step,
        "workers": args.workers,
        "outputs": [out.name, fig_path.name],
    })
    print(
        f"wrote {out} and {fig_path} ({args.samples} samples, "
        f"grid [0, {_fmt(grid_max)}] step {_fmt(grid_step)}); "
        f"delta(0) estimate {curve.delta[0]:.6f}"
    )
    return EXIT_OK


def cmd_simulate_paths(args) -> int:
    cfg = load_config(args.config)
    model = cfg.build_model()
    batch = ruin_ops.simulate_paths(model, args.paths, args.horizon, args.seed)
    out = Path(args.out)
    rows = []
    for i in range(batch.n_paths):
        if batch.ruined[i]:
            rows.append((
                "1",
                _fmt(batch.ruin_time[i]),
                _fmt(batch.deficit[i]),
                _fmt(batch.surplus_before[i]),
            ))
        else:
            rows.append(("0", "", "", ""))
    _write_csv(out, ("ruined", "ruin_time", "deficit", "surplus_before"), rows)
    fig_path = out.with_suffix(".png")
    from .plots import render_paths_figure

    render_paths_figure(batch, model, fig_path)
    _write_manifest(out, {
        "command": "simulate-paths",
        "tool_version": __version__,
        "config_path": str(args.config),
        "config_sha256": _config_digest(Path(args.config)),
        "seed": args.seed,
        "paths": args.paths,
        "horizon": args.horizon,
        "outputs": [out.name, fig_path.name],
    })
    ana = _quiet_analytics(model)
    ruined = int(batch.ruined.sum())
    print(f"paths: {batch.n_paths}, ruined: {ruined}, frequency: {batch.ruin_frequency:.6f}")
    if model.initial_capital == 0:
        print(f"psi(0) closed form: {ana.psi0:.6f}")
    if ruined:
        print(f"mean ruin time given ruin: {np.nanmean(batch.ruin_time):.6f}")
        print(f"mean deficit given ruin: {np.nanmean(batch.deficit):.6f}")
    if not ana.net_profit:
        print("note: net profit condition violated (c <= lambda*mu); ruin is certain")
    print(f"wrote {out} and {fig_path}")
    return EXIT_OK


def cmd_validate(args) -> int:
    cfg = load_config(args.config)
    model = cfg.build_model()
    results = run_checks(model, level=args.level, seed=args.seed)
    for res in results:
        print(f"{res.status:4s} {res.name}: {res.detail}")
    ana = _quiet_analytics(model)
    failed = [r for r in results if r.failed]
    if not ana.net_profit:
        print("net profit condition violated; NPC-dependent checks were skipped")
        return EXIT_NET_PROFIT
    if failed:
        print(f"{len(failed)} check(s) failed")
        return EXIT_VALIDATION
    print("all checks passed")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="shockrisk", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"shockrisk {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="closed-form model report")
    p.add_argument("--config", required=True, metavar="PATH")
    p.add_argument("--out", metavar="PATH", help="optional CSV of the reported quantities")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("simulate-m", help="Monte Carlo survival curve of the maximal loss")
    p.add_argument("--config", required=True, metavar="PATH")
    p.add_argument("--samples", type=_positive_int, default=1_000_000, metavar="N")
    p.add_argument("--seed", type=_nonneg_int, default=0, metavar="S")
    p.add_argument("--grid-max", type=_positive_float, default=None, metavar="X")
    p.add_argument("--grid-step", type=_positive_float, default=None, metavar="X")
    p.add_argument("--workers", type=_positive_int, default=1, metavar="W")
    p.add_argument("--out", default="simulate-m.csv", metavar="PATH")
    p.set_defaults(func=cmd_simulate_m)

    p = sub.add_parser("simulate-paths", help="event-driven surplus path simulation")
    p.add_argument("--config", required=True, metavar="PATH")
    p.add_argument("--paths", type=_positive_int, default=100_000, metavar="N")
    p.add_argument("--horizon", type=_positive_float, default=10_000.0, metavar="T")
    p.add_argument("--seed", type=_nonneg_int, default=0, metavar="S")
    p.add_argument("--out", default="simulate-paths.csv", metavar="PATH")
    p.set_defaults(func=cmd_simulate_paths)

    p = sub.add_parser("validate", help="cross-route consistency checks")
    p.add_argument("--config", required=True, metavar="PATH")
    p.add_argument("--seed", type=_nonneg_int, default=0, metavar="S")
    p.add_argument("--level", choices=("quick", "full"), default="quick")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NetProfitConditionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NET_PROFIT


if __name__ == "__main__":
    sys.exit(main())
