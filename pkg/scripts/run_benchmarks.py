#!/usr/bin/env python3
"""Runtime-vs-length curves for every benchmark task.

Writes one JSON report per (task, length) pair and, when matplotlib is
available, a log-log runtime plot. Example:

    python scripts/run_benchmarks.py --batch 32 --dim 5 --depth 4 \
        --lengths 32 64 128 256 512 --reps 20 --out bench_results
"""

import argparse
import json
import pathlib

from sigcore import resolve_threads, run_bench
from sigcore.bench import TASKS


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--tasks", nargs="+", default=list(TASKS), choices=TASKS)
    ap.add_argument("--lengths", nargs="+", type=int,
                    default=[32, 64, 128, 256, 512])
    ap.add_argument("--batch", type=int, default=32)
    ap.add_argument("--dim", type=int, default=5)
    ap.add_argument("--depth", type=int, default=4)
    ap.add_argument("--dyadic", type=int, default=0)
    ap.add_argument("--reps", type=int, default=20)
    ap.add_argument("--threads", type=int, default=None)
    ap.add_argument("--out", default="bench_results")
    args = ap.parse_args()

    resolve_threads(args.threads)
    outdir = pathlib.Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)

    curves = {task: [] for task in args.tasks}
    for task in args.tasks:
        for length in args.lengths:
            report = run_bench(task, batch=args.batch, length=length,
                               dim=args.dim, depth=args.depth,
                               dyadic_x=args.dyadic, dyadic_y=args.dyadic,
                               reps=args.reps)
            curves[task].append((length, report.minimum))
            name = f"{task}_L{length}.json"
            (outdir / name).write_text(report.to_json(indent=2) + "\n")
            print(f"{task:14s} L={length:5d} min={report.minimum:.6f}s")

    (outdir / "curves.json").write_text(json.dumps(curves, indent=2) + "\n")

    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        print("matplotlib not available; skipping plot")
        return

    fig, ax = plt.subplots(figsize=(6, 4))
    for task, points in curves.items():
        lengths, mins = zip(*points)
        ax.loglog(lengths, mins, marker="o", label=task)
    ax.set_xlabel("path length")
    ax.set_ylabel("minimum runtime (s)")
    ax.set_title(f"B={args.batch}, d={args.dim}, N={args.depth}")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(outdir / "runtime_curves.png", dpi=150)
    print(f"wrote {outdir}/runtime_curves.png")


if __name__ == "__main__":
    main()
