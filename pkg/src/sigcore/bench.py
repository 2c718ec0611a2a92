"""Benchmark harness: warm up once, time repetitions, report the minimum.

Timed regions cover in-memory library calls only; input generation and any
file I/O stay outside the clock.
"""

import json
import time
from dataclasses import dataclass, field

import numpy as np

from . import config
from .errors import InvalidArgument
from .kernel import KernelConfig, kernel_batch
from .kernel_grad import kernel_batch_backward
from .signature import SigOptions, signature
from .signature_grad import signature_backward

TASKS = ("signature-fwd", "signature-bwd", "kernel-fwd", "kernel-bwd")


@dataclass
class BenchReport:
    """One benchmark run: shape, per-run wall times, and their minimum."""

    task: str
    shape: dict
    repetitions: int
    times: list[float]
    minimum: float = field(init=False)
    threads: int = 1
    scalar_width: int = 64

    def __post_init__(self):
        self.minimum = min(self.times)

    def to_dict(self) -> dict:
        return {
            "task": self.task,
            "shape": self.shape,
            "repetitions": self.repetitions,
            "times": self.times,
            "minimum": self.minimum,
            "threads": self.threads,
            "scalar_width": self.scalar_width,
        }

    def to_json(self, indent=None) -> str:
        return json.dumps(self.to_dict(), indent=indent)


def _make_paths(rng, batch, length, dim, width):
    dtype = np.float32 if width == 32 else np.float64
    steps = rng.standard_normal((batch, length, dim)) / np.sqrt(max(length, 1))
    return np.cumsum(steps, axis=1, dtype=np.float64).astype(dtype)


def run_bench(task: str, *, batch=32, length=128, dim=4, depth=4,
              dyadic_x=0, dyadic_y=0, reps=50, threads=None,
              scalar_width=64, seed=0) -> BenchReport:
    """Run one benchmark task and report the minimum wall time over reps."""
    if task not in TASKS:
        raise InvalidArgument(f"unknown bench task {task!r}, expected one of {TASKS}")
    if reps < 1:
        raise InvalidArgument("reps must be >= 1")
    rng = np.random.default_rng(seed)
    with config.threads(threads) as nw:
        shape = {"B": batch, "L": length, "d": dim}
        if task.startswith("signature"):
            shape["N"] = depth
            opts = SigOptions(depth, scalar_width=scalar_width)
            paths = _make_paths(rng, batch, length, dim, scalar_width)
            if task == "signature-fwd":
                fn = lambda: signature(paths, opts)
            else:
                total = signature(paths, opts).shape[1]
                cot = rng.standard_normal((batch, total)).astype(opts.dtype)
                fn = lambda: signature_backward(paths, opts, cot)
        else:
            shape["dyadic_x"] = dyadic_x
            shape["dyadic_y"] = dyadic_y
            cfg = KernelConfig(dyadic_x, dyadic_y)
            x = _make_paths(rng, batch, length, dim, scalar_width)
            y = _make_paths(rng, batch, length, dim, scalar_width)
            if task == "kernel-fwd":
                fn = lambda: kernel_batch(x, y, cfg)
            else:
                fn = lambda: kernel_batch_backward(x, y, cfg)

        fn()  # warm-up (also triggers JIT on first use)
        times = []
        for _ in range(reps):
            t0 = time.perf_counter()
            fn()
            times.append(time.perf_counter() - t0)
        return BenchReport(task=task, shape=shape, repetitions=reps,
                           times=times, threads=nw, scalar_width=scalar_width)
