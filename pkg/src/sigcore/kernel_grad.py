"""Exact signature-kernel gradients by differentiating the PDE march itself.

One reverse anti-diagonal sweep over the stored forward grid yields every
node adjoint, accumulating per fine cell into the coarse increment-product
adjoint (with the dyadic scaling folded in). That coarse matrix maps to path
space linearly: a product with the other path's increments, then a telescope
from increment adjoints to point adjoints. Gradients are exact derivatives
of the solver output, which is what makes them reliable even for very short
paths or dyadic order 0.
"""

import numpy as np

from . import _kernels, config
from .errors import InvalidArgument, InvalidState
from .kernel import KernelConfig, SolveResult, fine_cells, increment_gram, solve_goursat


def _one_pair(x, name):
    x = np.ascontiguousarray(np.asarray(x, dtype=np.float64))
    if x.ndim != 2 or x.shape[0] < 2:
        raise InvalidArgument(f"{name} must be a single (L, d) path with L >= 2, "
                              f"got shape {x.shape}")
    return x


def kernel_backward(x, y, cfg: KernelConfig, forward: SolveResult,
                    cot: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Gradients of cot * k(x, y) w.r.t. both paths.

    ``forward`` must carry the grid solved with this same cfg (store_grid);
    recomputation on the fly is an extension point, not implemented.
    """
    x = _one_pair(x, "x")
    y = _one_pair(y, "y")
    if x.shape[1] != y.shape[1]:
        raise InvalidArgument(f"path dimensions differ: {x.shape[1]} vs {y.shape[1]}")
    if forward.grid is None:
        raise InvalidState("kernel_backward needs a forward solve with store_grid=True")
    delta = increment_gram(x, y)
    m1, m2 = fine_cells(delta.shape, cfg)
    if forward.grid.shape != (m1 + 1, m2 + 1):
        raise InvalidArgument(
            f"forward grid shape {forward.grid.shape} does not match "
            f"({m1 + 1}, {m2 + 1}) for this config")
    grid = np.ascontiguousarray(forward.grid, dtype=np.float64)
    d1 = np.empty_like(grid)
    d2 = np.zeros(delta.shape, dtype=np.float64)
    _kernels.goursat_backward(delta, cfg.dyadic_x, cfg.dyadic_y, cfg.scale,
                              grid, float(cot), d1, d2)
    dx = np.diff(x, axis=0)
    dy = np.diff(y, axis=0)
    gx = d2 @ dy          # dF/d(dx_i)
    gy = d2.T @ dx        # dF/d(dy_j)
    grad_x = np.zeros_like(x)
    grad_x[:-1] -= gx
    grad_x[1:] += gx
    grad_y = np.zeros_like(y)
    grad_y[:-1] -= gy
    grad_y[1:] += gy
    return grad_x, grad_y


def kernel_batch_backward(x, y, cfg: KernelConfig, cot=None,
                          threads: int | None = None):
    """Forward-with-grid plus backward for a batch of aligned pairs.

    Convenience wrapper used by the CLI and benchmarks: solves each pair with
    a stored grid, then runs the adjoint sweep. Returns (values, grad_x,
    grad_y) with grads shaped like the inputs.
    """
    x = np.ascontiguousarray(np.asarray(x, dtype=np.float64))
    y = np.ascontiguousarray(np.asarray(y, dtype=np.float64))
    squeeze = x.ndim == 2
    if x.ndim == 2:
        x = x[None]
    if y.ndim == 2:
        y = y[None]
    if x.shape[0] != y.shape[0]:
        raise InvalidArgument(f"batch sizes differ: {x.shape[0]} vs {y.shape[0]}")
    if cot is None:
        cot = np.ones(x.shape[0])
    cot = np.atleast_1d(np.asarray(cot, dtype=np.float64))
    if cot.shape != (x.shape[0],):
        raise InvalidArgument(f"cotangent has shape {cot.shape}, "
                              f"expected ({x.shape[0]},)")
    store = KernelConfig(cfg.dyadic_x, cfg.dyadic_y, cfg.strip_width, store_grid=True)
    values = np.empty(x.shape[0])
    grad_x = np.empty_like(x)
    grad_y = np.empty_like(y)
    with config.threads(threads):
        for b in range(x.shape[0]):
            res = solve_goursat(increment_gram(x[b], y[b]), store)
            values[b] = res.value
            grad_x[b], grad_y[b] = kernel_backward(x[b], y[b], store, res, cot[b])
    if squeeze:
        return values[0], grad_x[0], grad_y[0]
    return values, grad_x, grad_y
