"""Truncated free tensor algebra on flat contiguous buffers.

A truncated tensor of dimension d and depth N stores levels 1..N back to
back in one buffer; level k holds d**k coefficients in row-major multi-index
order and the level-0 coefficient is implicitly 1 and never stored.
"""

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import InvalidArgument


@dataclass(frozen=True)
class TensorShape:
    """Dimension, depth, and per-level offsets into the flat buffer."""

    d: int
    depth: int
    offsets: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        if self.d < 1 or self.depth < 1:
            raise InvalidArgument(
                f"dimension and depth must be >= 1, got d={self.d}, depth={self.depth}")
        offs = [0]
        size = 1
        for _ in range(self.depth):
            size *= self.d
            offs.append(offs[-1] + size)
        object.__setattr__(self, "offsets", tuple(offs))

    @property
    def total(self) -> int:
        """Stored coefficient count, sum of d**k for k = 1..depth."""
        return self.offsets[-1]

    def level_slice(self, k: int) -> slice:
        """Buffer slice holding level k (1-based)."""
        if not 1 <= k <= self.depth:
            raise InvalidArgument(f"level {k} outside 1..{self.depth}")
        return slice(self.offsets[k - 1], self.offsets[k])

    def offsets_array(self) -> np.ndarray:
        return np.asarray(self.offsets, dtype=np.int64)


def tensor_shape(d: int, depth: int) -> TensorShape:
    return TensorShape(d, depth)


@dataclass
class TruncatedSig:
    """A truncated tensor-algebra element (a signature, typically)."""

    shape: TensorShape
    data: np.ndarray

    def level(self, k: int) -> np.ndarray:
        """Level k as a flat row-major view of length d**k."""
        return self.data[self.shape.level_slice(k)]

    def copy(self) -> "TruncatedSig":
        return TruncatedSig(self.shape, self.data.copy())


def zero_tensor(shape: TensorShape, dtype=np.float64) -> TruncatedSig:
    """The identity element: all stored levels zero, implicit level 0 = 1."""
    return TruncatedSig(shape, np.zeros(shape.total, dtype=dtype))


def _check_buffer(name, arr, shape):
    if arr.ndim != 1 or arr.shape[0] != shape.total:
        raise InvalidArgument(
            f"{name} buffer has length {arr.shape}, expected ({shape.total},)")


def tensor_exp(z, shape: TensorShape, out: np.ndarray | None = None) -> TruncatedSig:
    """Tensor exponential of an increment: level k is z^(x)k / k!.

    Writes into ``out`` when given (no allocation), else allocates.
    """
    z = np.ascontiguousarray(z)
    if z.ndim != 1 or z.shape[0] != shape.d:
        raise InvalidArgument(
            f"increment has shape {z.shape}, expected ({shape.d},)")
    if out is None:
        out = np.empty(shape.total, dtype=z.dtype)
    else:
        _check_buffer("out", out, shape)
    _kernels.exp_into(out, z, shape.offsets_array())
    return TruncatedSig(shape, out)


def mul_acc(C: TruncatedSig, A: TruncatedSig, B: TruncatedSig,
            unit_terms: bool = True) -> TruncatedSig:
    """C_k += sum over splits i+j=k (i,j >= 1) of A_i (x) B_j, plus the
    level-0-paired terms A_k + B_k when ``unit_terms``.

    With ``unit_terms`` and C entering as the zero element this leaves the
    full truncated product A (x) B in C. In-place and allocation-free; C may
    alias A because levels are written from the top down.
    """
    if not (C.shape == A.shape == B.shape):
        raise InvalidArgument("mul_acc operands must share one TensorShape")
    _check_buffer("C", C.data, C.shape)
    _kernels.mul_acc_into(C.data, A.data, B.data, C.shape.offsets_array(),
                          unit_terms)
    return C


def dot(A: TruncatedSig, B: TruncatedSig) -> float:
    """Inner product 1 + sum_k <A_k, B_k> (the 1 is the implicit level 0)."""
    if A.shape != B.shape:
        raise InvalidArgument("dot operands must share one TensorShape")
    return 1.0 + float(np.dot(A.data, B.data))
