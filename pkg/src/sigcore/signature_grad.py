"""Exact reverse-mode gradients of truncated signatures.

The forward pass is not stored: the backward walk recovers each prefix
signature by multiplying with the exponential of the negated increment (the
inverse of one linear segment), then pushes the adjoint of that segment's
update into the increment adjoint and the running prefix adjoint. Increment
adjoints telescope into point adjoints at the end. Memory per path stays at
four tensor buffers regardless of length; rounding error grows with length,
which the test tolerances reflect.
"""

import numpy as np

from . import _kernels, config, transforms
from .errors import InvalidArgument
from .signature import (PathBatch, SigOptions, as_path_batch, sig_tensor_shape,
                        _validated_increments)


def signature_backward(batch, opts: SigOptions, cot, threads: int | None = None) -> np.ndarray:
    """Gradient of F w.r.t. every path point, given cot = dF/d(signature).

    ``cot`` is one flat (B, total) cotangent buffer (or (total,) for a single
    path). Returns gradients shaped like the input batch; with a fused
    transform active the result is composed with the transform adjoint, so
    an augmented time coordinate receives no gradient.
    """
    pb = as_path_batch(batch)
    squeeze = not isinstance(batch, PathBatch) and np.asarray(batch).ndim == 2
    shape = sig_tensor_shape(pb.d, opts)
    cot = np.ascontiguousarray(np.asarray(cot, dtype=opts.dtype))
    if cot.ndim == 1:
        cot = cot[None]
    if cot.shape != (pb.B, shape.total):
        raise InvalidArgument(
            f"cotangent has shape {cot.shape}, expected ({pb.B}, {shape.total})")

    incs = _validated_increments(pb, opts)
    n_steps = incs.shape[1]
    g = np.empty((pb.B, n_steps, shape.d), dtype=opts.dtype)
    with config.threads(threads) as nw:
        work = np.empty((nw, 4, shape.total), dtype=opts.dtype)
        _kernels.sig_backward_batch(incs, cot, g, work, shape.offsets_array())

    # telescope increment adjoints into (transformed-)point adjoints
    grad_eff = np.zeros((pb.B, n_steps + 1, shape.d), dtype=opts.dtype)
    grad_eff[:, :-1] -= g
    grad_eff[:, 1:] += g
    if opts.transform in (None, "none"):
        grad = grad_eff
    else:
        grad = transforms.transform_adjoint(grad_eff, opts.transform)
    return grad[0] if squeeze else grad
