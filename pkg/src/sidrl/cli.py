"""Command-line front end: train, evaluate, sweep seeds, render fields,
and aggregate metrics across runs.

Commands
    run      train one agent from a config file
    eval     greedy rollouts from a checkpoint
    heatmap  successor-distance or one-step-control field as CSV or PGM
    sweep    repeat one config across seeds
    report   cross-seed mean/std curves (CSV + SVG)
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace

from .config import load_config, make_manifest
from .env import make_env
from .report import (
    aggregate,
    emit_plot_data,
    sd_to_anchor_field,
    sfc_field,
    write_heatmap_csv,
    write_pgm,
)
from .sid import evaluate, load_checkpoint, run_training


def _cmd_run(args) -> int:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if args.deterministic:
        cfg = replace(cfg, deterministic=True)
    if args.out is not None:
        cfg = replace(cfg, out=args.out)
    cfg.validate()
    result = run_training(cfg)
    last = result.episodes[-1].extrinsic_return if result.episodes else float("nan")
    print(f"run: {len(result.episodes)} episodes, {result.env_steps} env steps, "
          f"last return {last:g}")
    print(f"metrics: {result.metrics_path}")
    print(f"checkpoint: {result.checkpoint_path}")
    return 0


def _cmd_eval(args) -> int:
    summary = evaluate(args.checkpoint, env_name=args.env,
                       episodes=args.episodes, seed=args.seed,
                       epsilon=args.epsilon)
    print(json.dumps(summary, sort_keys=True))
    return 0


def _parse_anchor(text: str) -> tuple[int, int]:
    try:
        x, y = text.split(",")
        return int(x), int(y)
    except ValueError:
        raise ValueError(f"anchor must be 'x,y', got {text!r}") from None


def _cmd_heatmap(args) -> int:
    ck = load_checkpoint(args.checkpoint)
    if "sf_psi" not in ck:
        raise ValueError("checkpoint holds no successor-feature table")
    env = make_env(ck["env"])
    psi = ck["sf_psi"]
    if args.kind == "sd":
        anchor = _parse_anchor(args.anchor) if args.anchor else env.spec.starts[0]
        if anchor not in env.cell_index:
            raise ValueError(f"anchor {anchor} is not an open cell")
        grid = sd_to_anchor_field(env, psi, anchor)
    else:
        grid = sfc_field(env, psi)
    if args.out.endswith(".pgm"):
        write_pgm(args.out, grid)
    else:
        write_heatmap_csv(args.out, grid)
    print(f"heatmap ({args.kind}): {args.out}")
    return 0


def _cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    seeds = [int(s) for s in args.seeds.split(",") if s != ""]
    if not seeds:
        raise ValueError("no seeds given")
    base_out = args.out if args.out is not None else cfg.out
    outputs = {}
    for seed in seeds:
        sub = replace(cfg, seed=seed, out=os.path.join(base_out, f"seed{seed}"))
        result = run_training(sub)
        outputs[f"seed{seed}"] = result.metrics_path
        print(f"seed {seed}: {len(result.episodes)} episodes -> {result.metrics_path}")
    manifest = make_manifest(cfg, seeds, outputs)
    manifest_path = os.path.join(base_out, "manifest.json")
    manifest.write(manifest_path)
    print(f"sweep manifest: {manifest_path}")
    return 0


def _cmd_report(args) -> int:
    paths = []
    for entry in args.runs:
        candidate = os.path.join(entry, "metrics.csv")
        if os.path.isdir(entry) and os.path.exists(candidate):
            paths.append(candidate)
        else:
            paths.append(entry)
    summary = aggregate(paths, bucket_size=args.bucket, column=args.column)
    os.makedirs(args.out, exist_ok=True)
    csv_path = os.path.join(args.out, "curves.csv")
    svg_path = os.path.join(args.out, "curves.svg")
    emit_plot_data(summary, csv_path, svg_path)
    print(f"aggregated {summary.n_runs} runs into {csv_path} and {svg_path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sidrl", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="train one agent from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--deterministic", action="store_true")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("eval", help="greedy rollouts from a checkpoint")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--env", default=None)
    p.add_argument("--episodes", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epsilon", type=float, default=0.0)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("heatmap", help="spatial field from a checkpoint")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--kind", choices=("sd", "sfc"), required=True)
    p.add_argument("--anchor", default=None, help="x,y; defaults to the start cell")
    p.add_argument("--out", required=True,
                   help="output file; .pgm renders an image, else x,y,value CSV")
    p.set_defaults(func=_cmd_heatmap)

    p = sub.add_parser("sweep", help="repeat one config across seeds")
    p.add_argument("--config", required=True)
    p.add_argument("--seeds", required=True, help="comma-separated, e.g. 0,1,2")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("report", help="cross-seed mean/std curves")
    p.add_argument("--runs", nargs="+", required=True,
                   help="run directories (containing metrics.csv) or CSV paths")
    p.add_argument("--bucket", type=int, required=True, help="env steps per bucket")
    p.add_argument("--out", required=True)
    p.add_argument("--column", default="return", choices=("return", "success"))
    p.set_defaults(func=_cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
