"""Array file I/O: a minimal binary format plus a CSV escape hatch.

Binary layout (little-endian throughout):

    bytes 0..3   magic "SGT1"
    byte  4      dtype code: 0 = float64, 1 = float32
    byte  5      ndim: 1, 2, or 3
    next  8*ndim dims as unsigned 64-bit
    rest         payload, row-major

Files with a ``.csv`` suffix are parsed as a single 2-d path, one point per
line, comma-separated coordinates.
"""

import struct

import numpy as np

from .errors import FormatError, InvalidArgument

MAGIC = b"SGT1"
_DTYPES = {0: np.dtype("<f8"), 1: np.dtype("<f4")}
_CODES = {np.dtype(np.float64): 0, np.dtype(np.float32): 1}
_MAX_ELEMENTS = 1 << 48  # dims declaring more than this are corrupt, not big


def write_array(arr: np.ndarray, path) -> None:
    """Serialize a 1-, 2-, or 3-d float array; round-trips losslessly."""
    arr = np.ascontiguousarray(arr)
    if arr.dtype not in _CODES:
        if not np.issubdtype(arr.dtype, np.floating) and not np.issubdtype(arr.dtype, np.integer):
            raise InvalidArgument(f"cannot serialize dtype {arr.dtype}")
        arr = arr.astype(np.float64)
    if arr.ndim not in (1, 2, 3):
        raise InvalidArgument(f"can only serialize 1-3 dimensional arrays, got {arr.ndim}")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(bytes([_CODES[arr.dtype], arr.ndim]))
        fh.write(struct.pack(f"<{arr.ndim}Q", *arr.shape))
        fh.write(arr.astype(arr.dtype.newbyteorder("<"), copy=False).tobytes())


def _read_csv(path) -> np.ndarray:
    try:
        arr = np.loadtxt(path, delimiter=",", dtype=np.float64, ndmin=2)
    except ValueError as exc:
        raise FormatError(f"malformed CSV path file: {exc}", 0) from None
    return arr


def read_array(path) -> np.ndarray:
    """Read an array written by ``write_array`` (or a CSV single path)."""
    if str(path).endswith(".csv"):
        return _read_csv(path)
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < 6:
        raise FormatError("file too short for header", len(raw))
    if raw[:4] != MAGIC:
        raise FormatError(f"bad magic {raw[:4]!r}, expected {MAGIC!r}", 0)
    code, ndim = raw[4], raw[5]
    if code not in _DTYPES:
        raise FormatError(f"unknown dtype code {code}", 4)
    if ndim not in (1, 2, 3):
        raise FormatError(f"ndim must be 1..3, got {ndim}", 5)
    dims_end = 6 + 8 * ndim
    if len(raw) < dims_end:
        raise FormatError("truncated dims", len(raw))
    dims = struct.unpack(f"<{ndim}Q", raw[6:dims_end])
    count = 1
    for dim in dims:
        count *= dim
    if count > _MAX_ELEMENTS:
        raise FormatError(f"dims {dims} overflow", 6)
    dtype = _DTYPES[code]
    expected = count * dtype.itemsize
    if len(raw) - dims_end != expected:
        raise FormatError(
            f"payload is {len(raw) - dims_end} bytes, dims {dims} require {expected}",
            dims_end)
    arr = np.frombuffer(raw, dtype=dtype, count=count, offset=dims_end)
    return arr.reshape(dims).astype(dtype.newbyteorder("="), copy=True)
