"""Command-line entry points.

Subcommands:

* ``entdyn run --config sweep.cfg [--seed S] [--workers K] [--out DIR]``
  run a disorder sweep and write sweep.csv + manifest.
* ``entdyn oracle --config oracle.cfg [--seed S] [--out DIR]``
  run a stochastic-oracle experiment and write its report CSV.
* ``entdyn overlay --result DIR --kinds avg_s2,avg_r1 [--out DIR]``
  overlay theory curves on a finished sweep (reads DIR/sweep.csv and
  DIR/manifest.txt) and write per-kind CSV + SVG.

Config files are flat ``key = value`` text with ``#`` comments.
"""

import argparse
import os
import sys
from dataclasses import replace

import numpy as np

from . import harness


def _cmd_run(args):
    cfg = harness.parse_config(args.config, schema="run")
    if args.seed is not None:
        cfg = replace(cfg, master_seed=args.seed)
    if args.workers is not None:
        cfg = replace(cfg, workers=args.workers)
    if args.out is not None:
        cfg = replace(cfg, out_dir=args.out)
    result = harness.run_sweep(cfg)
    print(f"wrote {result.csv_path} ({len(result.points)} sweep points)")
    return 0


def _cmd_oracle(args):
    cfg = harness.parse_config(args.config, schema="oracle")
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if args.out is not None:
        cfg = replace(cfg, out_dir=args.out)
    rows = harness.run_oracle(cfg)
    flagged = sum(r["flagged"] for r in rows)
    print(f"oracle {cfg.kind}: {len(rows)} checks, {flagged} flagged (|z| above threshold)")
    return 1 if flagged else 0


def _load_result(result_dir):
    manifest = os.path.join(result_dir, "manifest.txt")
    raw = {}
    with open(manifest) as fh:
        for line in fh:
            if "=" in line:
                key, value = (p.strip() for p in line.split("=", 1))
                raw.setdefault(key, value)
    kwargs = {}
    for key, conv in harness._RUN_KEYS.items():
        if key not in raw:
            continue
        if conv == "floats":
            kwargs[key] = tuple(float(t) for t in raw[key].split())
        else:
            kwargs[key] = conv(raw[key])
    cfg = harness.ExperimentConfig(**kwargs)
    points = harness.load_sweep_csv(os.path.join(result_dir, "sweep.csv"))
    measures = harness.QREM_MEASURES if cfg.model == "qrem" else harness.ANDERSON_MEASURES
    return harness.SweepResult(config=cfg, points=points, measures=measures)


def _cmd_overlay(args):
    result = _load_result(args.result)
    kinds = [k for k in args.kinds.split(",") if k]
    summary = harness.overlay_theory(result, kinds, out_dir=args.out)
    for kind, dev in summary.items():
        print(f"{kind}: max relative deviation {dev:.6g}")
    return 0


def main(argv=None):
    parser = argparse.ArgumentParser(prog="entdyn", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a disorder sweep")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--seed", type=int)
    p_run.add_argument("--workers", type=int)
    p_run.add_argument("--out")
    p_run.set_defaults(func=_cmd_run)

    p_oracle = sub.add_parser("oracle", help="run a stochastic-oracle check")
    p_oracle.add_argument("--config", required=True)
    p_oracle.add_argument("--seed", type=int)
    p_oracle.add_argument("--out")
    p_oracle.set_defaults(func=_cmd_oracle)

    p_overlay = sub.add_parser("overlay", help="overlay theory on a finished sweep")
    p_overlay.add_argument("--result", required=True)
    p_overlay.add_argument("--kinds", required=True)
    p_overlay.add_argument("--out")
    p_overlay.set_defaults(func=_cmd_overlay)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
