"""Command-line entry point: data generation, pipeline runs, and reports.

Exit codes: 0 success, 1 user error (arguments, files, data), 2 internal
error.  Every run writes a forecasts CSV, a JSON summary with the full
configuration echoed for provenance, and a state snapshot that the report
subcommands consume.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from ofter import analyze, datagen, frame, metrics, pipeline
from ofter.regress import FeatureWeights

SUMMARY_SCHEMA_VERSION = 1


class UserError(Exception):
    """Bad input from the operator; reported without a traceback."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> _Parser:
    parser = _Parser(prog="ofter", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("datagen", help="simulate a benchmark system to CSV")
    gen.add_argument("--model", required=True,
                     help=f"one of {', '.join(datagen.MODELS)}")
    gen.add_argument("--t-len", "--T", dest="t_len", type=int, required=True)
    gen.add_argument("--sigma", type=float, default=0.0,
                     help="noise sd (toy model only)")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True)

    runp = sub.add_parser("run", help="run the forecasting pipeline on a CSV panel")
    runp.add_argument("--data", required=True, help="input CSV panel")
    runp.add_argument("--target", required=True, help="target column name")
    runp.add_argument("--out-dir", required=True)
    runp.add_argument("--config", help="JSON file with configuration keys")
    runp.add_argument("--variant", choices=sorted(pipeline.VARIANTS),
                      help="plain | dr | ft | dr-ft")
    runp.add_argument("--loss", choices=["mse", "mae", "neg-pnl"])
    runp.add_argument("--max-lag", type=int)
    runp.add_argument("--lookback", type=int)
    runp.add_argument("--delta", type=float)
    runp.add_argument("--c-min", type=float)
    runp.add_argument("--c-original", type=float)
    runp.add_argument("--l0-fraction", type=float)
    runp.add_argument("--seed", type=int)

    rep = sub.add_parser("report", help="reports from a completed run directory")
    rep.add_argument("kind", choices=["importance", "outliers"])
    rep.add_argument("--run-dir", required=True)
    rep.add_argument("--out", help="output CSV (defaults inside the run dir)")
    rep.add_argument("--kappa", type=float, default=5.0)
    rep.add_argument("--lookback", type=int, default=600)
    rep.add_argument("--statistic", choices=["min", "mean"], default="min")
    return parser


def cmd_datagen(args) -> int:
    if args.model not in datagen.MODELS:
        raise UserError(f"unknown model {args.model!r}; expected one of {datagen.MODELS}")
    try:
        spec = datagen.SyntheticSpec(args.model, args.t_len, sigma=args.sigma,
                                     seed=args.seed)
    except ValueError as exc:
        raise UserError(str(exc)) from exc
    panel = datagen.generate(spec)
    frame.write_csv(panel, args.out)
    print(f"wrote {panel.t_len} rows x {panel.width} columns to {args.out}")
    return 0


def _load_config(args) -> pipeline.OfterConfig:
    payload = {}
    if args.config:
        path = Path(args.config)
        if not path.exists():
            raise UserError(f"config file not found: {path}")
        payload.update(json.loads(path.read_text()))
    if args.variant:
        use_dr, use_ft = pipeline.VARIANTS[args.variant]
        payload["use_dr"] = use_dr
        payload["use_ft"] = use_ft
    overrides = {
        "loss_kind": args.loss.replace("-", "_") if args.loss else None,
        "max_lag": args.max_lag,
        "lookback": args.lookback,
        "delta": args.delta,
        "c_min": args.c_min,
        "c_original": args.c_original,
        "l0_fraction": args.l0_fraction,
        "seed": args.seed,
    }
    payload.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return pipeline.OfterConfig.from_dict(payload)
    except (TypeError, ValueError) as exc:
        raise UserError(f"bad configuration: {exc}") from exc


def _write_forecasts_csv(path, records) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "y_hat", "y_true", "y_hat_residual", "y_ts",
                         "winners", "diagnostic"])
        for rec in records:
            writer.writerow([
                rec.t, repr(rec.y_hat), repr(rec.y_true),
                repr(rec.y_hat_residual), repr(rec.y_ts),
                pipeline.winners_label(rec.winners), rec.diagnostic or "",
            ])


def cmd_run(args) -> int:
    config = _load_config(args)
    data_path = Path(args.data)
    if not data_path.exists():
        raise UserError(f"data file not found: {data_path}")
    try:
        panel = frame.load_csv(data_path)
    except ValueError as exc:
        raise UserError(str(exc)) from exc
    if args.target not in panel.columns:
        raise UserError(
            f"target column {args.target!r} not found; panel has {panel.columns}"
        )
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    try:
        X, y = pipeline.align_next_step(panel, args.target, config.max_lag)
        records, state = pipeline.run(X, y, config)
    except ValueError as exc:
        raise UserError(str(exc)) from exc

    y_hat = pipeline.forecasts_from_records(records)
    y_true = np.array([rec.y_true for rec in records])
    pearson, mse, mae = metrics.forecast_quality(y_hat, y_true)
    summary = {
        "schema_version": SUMMARY_SCHEMA_VERSION,
        "command": "run",
        "data": str(data_path),
        "target": args.target,
        "n_forecasts": len(records),
        "l0": state.l0,
        "correlation": pearson,
        "mse": mse,
        "mae": mae,
        "config": config.to_dict(),
    }
    if config.loss_kind == "neg_pnl":
        signals = y_hat[None, :]
        realized = y_true[None, :]
        summary["strategy"] = {
            f"Q{q}": metrics.evaluate_strategy(signals, realized, q).to_dict()
            for q in range(1, 6)
        }

    _write_forecasts_csv(out_dir / "forecasts.csv", records)
    (out_dir / "summary.json").write_text(json.dumps(summary, indent=2))
    (out_dir / "snapshot.json").write_text(pipeline.state_to_json(state))
    print(f"run complete: correlation={pearson:.4f} mse={mse:.6g} "
          f"({len(records)} forecasts) -> {out_dir}")
    return 0


def _load_snapshot(run_dir: Path) -> pipeline.PipelineState:
    snap = run_dir / "snapshot.json"
    if not snap.exists():
        raise UserError(f"no snapshot.json under {run_dir}")
    return pipeline.state_from_json(snap.read_text())


def cmd_report(args) -> int:
    run_dir = Path(args.run_dir)
    if not run_dir.is_dir():
        raise UserError(f"run directory not found: {run_dir}")
    state = _load_snapshot(run_dir)

    if args.kind == "importance":
        if state.embedding is not None:
            basis = state.embedding.components
        else:
            basis = np.eye(len(state.labels))
        report = analyze.feature_importance(
            basis, state.weights, state.augmented, labels=state.labels
        )
        out = Path(args.out) if args.out else run_dir / "importance.csv"
        with open(out, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["feature", "importance"])
            for name, score in report.rows():
                writer.writerow([name, repr(float(score))])
        print(f"wrote feature importances to {out}")
        return 0

    embedded = state.embedded.matrix()
    if embedded.shape[0] <= 2 * args.lookback:
        raise UserError(
            f"run has {embedded.shape[0]} embedded rows; outlier flags need more "
            f"than {2 * args.lookback} (two lookback spans)"
        )
    report = analyze.detect_outliers(
        embedded, state.weights, args.lookback, args.kappa, statistic=args.statistic
    )
    out = Path(args.out) if args.out else run_dir / "outliers.csv"
    with open(out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "d_min", "flag"])
        for t in range(embedded.shape[0]):
            d = report.d_min[t]
            writer.writerow([t, "" if np.isnan(d) else repr(float(d)),
                             int(report.flags[t])])
        n_flags = int(report.flags.sum())
    print(f"wrote outlier report to {out} ({n_flags} flags)")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "datagen":
            return cmd_datagen(args)
        if args.command == "run":
            return cmd_run(args)
        return cmd_report(args)
    except UserError as exc:
        print(f"ofter {args.command}: error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # internal failure: one line, nonzero, code 2
        print(f"ofter {args.command}: internal error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
