"""Path-to-path transforms, their adjoints, and fused increment streams.

Both transforms are linear in the path values, so their adjoints are plain
index bookkeeping: time augmentation appends the time grid as an extra
coordinate, lead-lag doubles the path into a (lead, lag) pair where the lead
component jumps one step ahead.
"""

import numpy as np

from .errors import InvalidArgument

KINDS = ("time_augment", "lead_lag")


def _check_kind(kind):
    if kind not in KINDS:
        raise InvalidArgument(f"unknown transform kind {kind!r}, expected one of {KINDS}")


def _as_3d(data, name="path batch"):
    data = np.asarray(data)
    if data.ndim == 2:
        return data[None], True
    if data.ndim != 3:
        raise InvalidArgument(f"{name} must be (L, d) or (B, L, d), got shape {data.shape}")
    return data, False


def default_times(length: int, dtype=np.float64) -> np.ndarray:
    """Uniform time grid on [0, 1]; a single point sits at t = 0."""
    if length == 1:
        return np.zeros(1, dtype=dtype)
    return np.linspace(0.0, 1.0, length, dtype=dtype)


def transform(batch, kind: str, times=None):
    """Materialize the transformed path batch.

    time_augment: (B, L, d) -> (B, L, d+1), last coordinate the time grid.
    lead_lag:     (B, L, d) -> (B, 2L-1, 2d), lead block first:
                  Z[2k] = (X[k], X[k]), Z[2k+1] = (X[k+1], X[k]).
    """
    _check_kind(kind)
    data, squeeze = _as_3d(batch)
    b, length, d = data.shape
    if length < 1:
        raise InvalidArgument("transform needs at least one point")
    if kind == "time_augment":
        t = default_times(length, data.dtype) if times is None \
            else np.asarray(times, dtype=data.dtype)
        if t.shape != (length,):
            raise InvalidArgument(f"time grid has shape {t.shape}, expected ({length},)")
        out = np.empty((b, length, d + 1), dtype=data.dtype)
        out[:, :, :d] = data
        out[:, :, d] = t
    else:
        out = np.empty((b, 2 * length - 1, 2 * d), dtype=data.dtype)
        out[:, 0::2, :d] = data       # lead at even slots
        out[:, 0::2, d:] = data       # lag at even slots
        out[:, 1::2, :d] = data[:, 1:]   # lead jumps ahead
        out[:, 1::2, d:] = data[:, :-1]  # lag holds back
    return out[0] if squeeze else out


def transform_adjoint(grad_out, kind: str):
    """Adjoint of ``transform`` as a linear map on path values.

    time_augment drops the time column (time receives no gradient);
    lead_lag sums each point's gradient over every output slot reading it.
    """
    _check_kind(kind)
    g, squeeze = _as_3d(grad_out, "gradient batch")
    b, length, dim = g.shape
    if kind == "time_augment":
        if dim < 2:
            raise InvalidArgument("time-augmented gradient needs at least 2 coordinates")
        out = g[:, :, : dim - 1].copy()
    else:
        if dim % 2 != 0 or length % 2 != 1:
            raise InvalidArgument(
                f"lead-lag gradient must be (B, 2L-1, 2d), got shape {g.shape}")
        d = dim // 2
        lead, lag = g[:, :, :d], g[:, :, d:]
        out = lead[:, 0::2] + lag[:, 0::2]
        out[:, :-1] += lag[:, 1::2]
        out[:, 1:] += lead[:, 1::2]
    return out[0] if squeeze else out


def fused_increments(batch, kind: str | None = None, times=None):
    """Increment sequence of the transformed path, built straight from the
    input batch without materializing the transformed points.

    none:         (B, L-1, d) plain differences.
    time_augment: (B, L-1, d+1), each increment gains its time step.
    lead_lag:     (B, 2L-2, 2d), alternating (dX_k, 0) and (0, dX_k).
    """
    data, squeeze = _as_3d(batch)
    b, length, d = data.shape
    if length < 1:
        raise InvalidArgument("increments need at least one point")
    dx = np.diff(data, axis=1)
    if kind is None or kind == "none":
        out = dx
    elif kind == "time_augment":
        t = default_times(length, data.dtype) if times is None \
            else np.asarray(times, dtype=data.dtype)
        if t.shape != (length,):
            raise InvalidArgument(f"time grid has shape {t.shape}, expected ({length},)")
        out = np.empty((b, length - 1, d + 1), dtype=data.dtype)
        out[:, :, :d] = dx
        out[:, :, d] = np.diff(t)
    elif kind == "lead_lag":
        out = np.zeros((b, 2 * length - 2, 2 * d), dtype=data.dtype)
        out[:, 0::2, :d] = dx  # lead moves first
        out[:, 1::2, d:] = dx  # then the lag catches up
    else:
        _check_kind(kind)
    return out[0] if squeeze else out


def effective_dim(d: int, kind: str | None) -> int:
    """Path dimension after the transform."""
    if kind is None or kind == "none":
        return d
    _check_kind(kind)
    return d + 1 if kind == "time_augment" else 2 * d


def effective_length(length: int, kind: str | None) -> int:
    """Point count after the transform."""
    if kind == "lead_lag":
        return 2 * length - 1
    return length
