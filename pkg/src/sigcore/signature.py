"""Truncated signatures of batches of piecewise-linear paths.

Two per-segment update rules are provided: ``direct`` multiplies the running
signature by the segment exponential level by level, ``horner`` (the default)
evaluates each level update in factored form with a single d**N scratch block
per worker. Both walk levels from the top down so updates land in place, and
both skip exact-zero increments (a bit-exact no-op). Work is parallelized
over the batch axis only; outputs never depend on the worker count.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels, config, transforms
from .errors import InvalidArgument
from .tensors import TensorShape, tensor_shape

METHODS = ("direct", "horner")
WIDTHS = (32, 64)


@dataclass
class PathBatch:
    """B x L x d row-major array of path points, optional shared time grid."""

    data: np.ndarray
    times: np.ndarray | None = None

    def __post_init__(self):
        self.data = np.ascontiguousarray(self.data)
        if self.data.ndim == 2:
            self.data = self.data[None]
        if self.data.ndim != 3:
            raise InvalidArgument(f"path batch must be (B, L, d) or (L, d), "
                                  f"got shape {self.data.shape}")
        if self.times is not None:
            self.times = np.asarray(self.times, dtype=self.data.dtype)
            if self.times.shape != (self.L,):
                raise InvalidArgument(
                    f"time grid has shape {self.times.shape}, expected ({self.L},)")
            if np.any(np.diff(self.times) <= 0):
                raise InvalidArgument("time grid must be strictly increasing")

    @property
    def B(self) -> int:
        return self.data.shape[0]

    @property
    def L(self) -> int:
        return self.data.shape[1]

    @property
    def d(self) -> int:
        return self.data.shape[2]


@dataclass(frozen=True)
class SigOptions:
    """Truncation depth, update rule, fused transform, and scalar width."""

    depth: int
    method: str = "horner"
    transform: str | None = None
    scalar_width: int = 64

    def __post_init__(self):
        if self.depth < 1:
            raise InvalidArgument(f"depth must be >= 1, got {self.depth}")
        if self.method not in METHODS:
            raise InvalidArgument(f"method must be one of {METHODS}, got {self.method!r}")
        if self.transform not in (None, "none") + transforms.KINDS:
            raise InvalidArgument(f"unknown transform {self.transform!r}")
        if self.scalar_width not in WIDTHS:
            raise InvalidArgument(f"scalar width must be 32 or 64, got {self.scalar_width}")

    @property
    def dtype(self):
        return np.float32 if self.scalar_width == 32 else np.float64


def as_path_batch(batch) -> PathBatch:
    return batch if isinstance(batch, PathBatch) else PathBatch(np.asarray(batch))


def sig_tensor_shape(path_dim: int, opts: SigOptions) -> TensorShape:
    """Shape of the signature tensors ``signature`` returns, after the
    transform's effect on the path dimension."""
    return tensor_shape(transforms.effective_dim(path_dim, opts.transform), opts.depth)


def _validated_increments(batch: PathBatch, opts: SigOptions) -> np.ndarray:
    if batch.L < 2:
        raise InvalidArgument(f"signature needs at least 2 points, got L={batch.L}")
    data = batch.data
    if not np.isfinite(data).all():  # one pass per batch
        raise InvalidArgument("path batch contains non-finite values")
    if data.dtype != opts.dtype:
        data = data.astype(opts.dtype)
    incs = transforms.fused_increments(data, opts.transform, batch.times)
    return np.ascontiguousarray(incs)


def signature(batch, opts: SigOptions, threads: int | None = None) -> np.ndarray:
    """Truncated signatures of every path in the batch.

    Returns one flat (B, total) buffer of stacked truncated tensors (or a
    (total,) vector for a single unbatched path); ``sig_tensor_shape`` gives
    the level layout.
    """
    pb = as_path_batch(batch)
    squeeze = not isinstance(batch, PathBatch) and np.asarray(batch).ndim == 2
    incs = _validated_increments(pb, opts)
    shape = tensor_shape(incs.shape[2], opts.depth)
    out = np.zeros((pb.B, shape.total), dtype=opts.dtype)
    with config.threads(threads) as nw:
        scratch_len = shape.d ** shape.depth if opts.method == "horner" else shape.total
        scratch = np.empty((nw, scratch_len), dtype=opts.dtype)
        _kernels.sig_batch(incs, out, scratch, shape.offsets_array(),
                           opts.method == "horner")
    return out[0] if squeeze else out
