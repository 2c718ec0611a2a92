"""Command-line interface.

Exit codes: 0 success, 2 usage error (argparse), 1 data/file error.
``--threads`` defaults to the SIGCORE_THREADS environment variable.
"""

import argparse
import sys

import numpy as np

from . import config
from .bench import TASKS, run_bench
from .errors import FormatError, InvalidArgument, InvalidState
from .io import read_array, write_array
from .kernel import KernelConfig, kernel_batch, kernel_gram
from .kernel_grad import kernel_batch_backward
from .signature import SigOptions, signature
from .signature_grad import signature_backward
from .transforms import KINDS, transform


def _shared_flags(p):
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads (default: $SIGCORE_THREADS or current)")
    p.add_argument("--dtype", choices=("f32", "f64"), default=None,
                   help="force computation width (default: keep input dtype)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="sigcore",
        description="Truncated path signatures and signature kernels")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("signature", help="truncated signatures of a path batch")
    p.add_argument("--input", required=True)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--method", choices=("direct", "horner"), default="horner")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--time-aug", action="store_true",
                   help="fuse time augmentation into the computation")
    g.add_argument("--lead-lag", action="store_true",
                   help="fuse the lead-lag transform into the computation")
    p.add_argument("--output", default=None,
                   help="signature output file (forward pass)")
    p.add_argument("--cotangent", default=None,
                   help="dF/d(signature) file; switches to the backward pass")
    p.add_argument("--grad-output", default=None,
                   help="where to write dF/d(points) (backward pass)")
    _shared_flags(p)

    p = sub.add_parser("kernel", help="pairwise signature kernels of two batches")
    p.add_argument("--input", required=True)
    p.add_argument("--input2", required=True)
    p.add_argument("--dyadic-x", type=int, default=0)
    p.add_argument("--dyadic-y", type=int, default=0)
    p.add_argument("--output", default=None,
                   help="write values to a file instead of stdout")
    p.add_argument("--cotangent", default=None,
                   help="dF/dk per pair; triggers the backward pass")
    p.add_argument("--grad-output-x", default=None)
    p.add_argument("--grad-output-y", default=None)
    _shared_flags(p)

    p = sub.add_parser("gram", help="Gram matrix of kernel values")
    p.add_argument("--input", required=True)
    p.add_argument("--input2", default=None,
                   help="second batch (default: the first batch, symmetric)")
    p.add_argument("--dyadic-x", type=int, default=0)
    p.add_argument("--dyadic-y", type=int, default=0)
    p.add_argument("--output", required=True)
    _shared_flags(p)

    p = sub.add_parser("transform", help="materialize a path transform")
    p.add_argument("--kind", choices=KINDS, required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    _shared_flags(p)

    p = sub.add_parser("bench", help="time a task; minimum over repetitions")
    p.add_argument("--task", choices=TASKS, required=True)
    p.add_argument("--batch", type=int, default=32)
    p.add_argument("--length", type=int, default=128)
    p.add_argument("--dim", type=int, default=4)
    p.add_argument("--depth", type=int, default=4)
    p.add_argument("--dyadic-x", type=int, default=0)
    p.add_argument("--dyadic-y", type=int, default=0)
    p.add_argument("--reps", type=int, default=50)
    p.add_argument("--json", action="store_true", help="print the report as JSON")
    p.add_argument("--output", default=None, help="also write the JSON report here")
    _shared_flags(p)

    return ap


def _load(path, dtype_flag):
    arr = read_array(path)
    if dtype_flag is not None:
        arr = arr.astype(np.float32 if dtype_flag == "f32" else np.float64)
    return arr


def _width(arr, dtype_flag):
    if dtype_flag is not None:
        return 32 if dtype_flag == "f32" else 64
    return 32 if arr.dtype == np.float32 else 64


def _validate_usage(parser, args):
    """Flag-combination problems are usage errors (exit 2), not data errors."""
    if args.command == "signature":
        if args.cotangent is not None and args.grad_output is None:
            parser.error("--cotangent requires --grad-output")
        if args.cotangent is None and args.output is None:
            parser.error("--output is required for the forward pass")
    if args.command == "kernel" and args.cotangent is not None:
        if args.grad_output_x is None or args.grad_output_y is None:
            parser.error("--cotangent requires --grad-output-x and --grad-output-y")


def _cmd_signature(args) -> int:
    paths = _load(args.input, args.dtype)
    kind = "time_augment" if args.time_aug else "lead_lag" if args.lead_lag else None
    opts = SigOptions(args.depth, method=args.method, transform=kind,
                      scalar_width=_width(paths, args.dtype))
    if args.cotangent is not None:
        cot = _load(args.cotangent, args.dtype)
        write_array(signature_backward(paths, opts, cot), args.grad_output)
        if args.output is not None:
            write_array(signature(paths, opts), args.output)
        return 0
    write_array(signature(paths, opts), args.output)
    return 0


def _cmd_kernel(args) -> int:
    x = _load(args.input, args.dtype)
    y = _load(args.input2, args.dtype)
    cfg = KernelConfig(args.dyadic_x, args.dyadic_y)
    if args.cotangent is not None:
        cot = read_array(args.cotangent)
        values, gx, gy = kernel_batch_backward(x, y, cfg, cot)
        write_array(gx, args.grad_output_x)
        write_array(gy, args.grad_output_y)
    else:
        squeeze = x.ndim == 2
        values = kernel_batch(x, y, cfg)
        if squeeze:
            values = values[0]
    if args.output is not None:
        write_array(np.atleast_1d(values), args.output)
    else:
        for v in np.atleast_1d(values):
            print(repr(float(v)))
    return 0


def _cmd_gram(args) -> int:
    x = _load(args.input, args.dtype)
    y = None if args.input2 is None else _load(args.input2, args.dtype)
    cfg = KernelConfig(args.dyadic_x, args.dyadic_y)
    write_array(kernel_gram(x, y, cfg), args.output)
    return 0


def _cmd_transform(args) -> int:
    write_array(transform(_load(args.input, args.dtype), args.kind), args.output)
    return 0


def _cmd_bench(args) -> int:
    report = run_bench(args.task, batch=args.batch, length=args.length,
                       dim=args.dim, depth=args.depth, dyadic_x=args.dyadic_x,
                       dyadic_y=args.dyadic_y, reps=args.reps,
                       scalar_width=32 if args.dtype == "f32" else 64)
    text = report.to_json(indent=2)
    if args.output is not None:
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
    if args.json:
        print(text)
    else:
        print(f"{report.task} shape={report.shape} reps={report.repetitions} "
              f"min={report.minimum:.6f}s threads={report.threads}")
    return 0


_COMMANDS = {
    "signature": _cmd_signature,
    "kernel": _cmd_kernel,
    "gram": _cmd_gram,
    "transform": _cmd_transform,
    "bench": _cmd_bench,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _validate_usage(parser, args)
    try:
        config.resolve_threads(args.threads)
        return _COMMANDS[args.command](args)
    except (InvalidArgument, InvalidState, FormatError, OSError) as exc:
        print(f"sigcore: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
