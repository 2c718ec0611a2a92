"""Signature-kernel evaluation via a second-order Goursat PDE march.

The solver walks a dyadically refined grid: each data cell is split into
2**dyadic_x by 2**dyadic_y fine cells, whose increment products are read on
the fly from the coarse matrix (scaled by 2**-(dyadic_x + dyadic_y), since
refining a linear segment divides its increments). The march is organized as
strips of anti-diagonals over three rotating line buffers plus one handoff
row, so working memory without a stored grid is O(min grid side + strip
width). Cells on one anti-diagonal are independent; nothing about the result
depends on strip width or worker count.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels, config
from .errors import InvalidArgument


@dataclass(frozen=True)
class KernelConfig:
    """Per-axis dyadic refinement orders, strip width, grid retention."""

    dyadic_x: int = 0
    dyadic_y: int = 0
    strip_width: int = 32
    store_grid: bool = False

    def __post_init__(self):
        if self.dyadic_x < 0 or self.dyadic_y < 0:
            raise InvalidArgument("dyadic orders must be >= 0")
        if self.strip_width < 1:
            raise InvalidArgument("strip width must be >= 1")

    @property
    def scale(self) -> float:
        return 2.0 ** -(self.dyadic_x + self.dyadic_y)


@dataclass
class SolveResult:
    """Kernel value, plus the full fine-resolution grid when retained."""

    value: float
    grid: np.ndarray | None = None


def _as_paths(x, name):
    x = np.ascontiguousarray(x)
    if x.ndim == 2:
        x = x[None]
    if x.ndim != 3:
        raise InvalidArgument(f"{name} must be (L, d) or (B, L, d), got shape {x.shape}")
    if x.shape[1] < 2:
        raise InvalidArgument(f"{name} needs at least 2 points per path")
    return x


def increment_gram(x, y) -> np.ndarray:
    """Matrix of increment inner products, one dense (batched) product.

    For (L1, d) and (L2, d) inputs returns (L1-1, L2-1); for batched inputs
    (B, L1, d) and (B, L2, d) returns (B, L1-1, L2-1).
    """
    x = np.asarray(x)
    squeeze = x.ndim == 2
    x = _as_paths(x, "x")
    y = _as_paths(y, "y")
    if x.shape[0] != y.shape[0]:
        raise InvalidArgument(f"batch sizes differ: {x.shape[0]} vs {y.shape[0]}")
    if x.shape[2] != y.shape[2]:
        raise InvalidArgument(f"path dimensions differ: {x.shape[2]} vs {y.shape[2]}")
    dx = np.diff(x, axis=1)
    dy = np.diff(y, axis=1)
    delta = np.matmul(dx, dy.transpose(0, 2, 1))
    return delta[0] if squeeze else delta


def fine_cells(delta_shape, cfg: KernelConfig) -> tuple[int, int]:
    """Fine-grid cell counts (rows, cols) for a coarse matrix shape."""
    return (delta_shape[0] << cfg.dyadic_x, delta_shape[1] << cfg.dyadic_y)


def solve_workspace_elements(delta_shape, cfg: KernelConfig) -> int:
    """Scalars of working memory a gridless solve allocates: three rotating
    anti-diagonals plus one handoff row along the smaller grid side."""
    m1, m2 = fine_cells(delta_shape, cfg)
    if m2 > m1:
        m1, m2 = m2, m1
    return 3 * (min(cfg.strip_width, m1) + 1) + (m2 + 1)


def solve_goursat(delta, cfg: KernelConfig) -> SolveResult:
    """Solve one kernel PDE over the coarse increment-product matrix.

    Boundary row and column are 1; the returned value is the far corner of
    the fine grid. Non-finite inputs are the caller's problem: overflow
    propagates as inf rather than raising.
    """
    delta = np.asarray(delta)
    if delta.ndim != 2 or delta.shape[0] < 1 or delta.shape[1] < 1:
        raise InvalidArgument(f"increment matrix must be 2-d and non-empty, "
                              f"got shape {delta.shape}")
    lam1, lam2 = cfg.dyadic_x, cfg.dyadic_y
    if cfg.store_grid:
        m1, m2 = fine_cells(delta.shape, cfg)
        grid = np.empty((m1 + 1, m2 + 1), dtype=delta.dtype)
        value = _kernels.goursat_grid(delta, lam1, lam2, cfg.scale, grid)
        return SolveResult(float(value), grid)
    # keep the handoff row on the smaller axis; the update is symmetric so
    # transposing the march leaves every cell's arithmetic identical
    m1, m2 = fine_cells(delta.shape, cfg)
    if m2 > m1:
        delta = delta.T
        lam1, lam2 = lam2, lam1
        m1, m2 = m2, m1
    diags = np.empty((3, min(cfg.strip_width, m1) + 1), dtype=delta.dtype)
    handoff = np.empty(m2 + 1, dtype=delta.dtype)
    value = _kernels.goursat_strip_parallel(delta, lam1, lam2, cfg.scale,
                                            cfg.strip_width, diags, handoff)
    return SolveResult(float(value))


def kernel_batch(x, y, cfg: KernelConfig = KernelConfig(),
                 threads: int | None = None) -> np.ndarray:
    """Pairwise kernel values k(x_b, y_b) for two aligned batches."""
    x = _as_paths(x, "x")
    y = _as_paths(y, "y")
    if x.shape[0] != y.shape[0]:
        raise InvalidArgument(f"batch sizes differ: {x.shape[0]} vs {y.shape[0]}")
    if x.shape[2] != y.shape[2]:
        raise InvalidArgument(f"path dimensions differ: {x.shape[2]} vs {y.shape[2]}")
    lam1, lam2 = cfg.dyadic_x, cfg.dyadic_y
    m1 = (x.shape[1] - 1) << lam1
    m2 = (y.shape[1] - 1) << lam2
    if m2 > m1:
        x, y = y, x
        lam1, lam2 = lam2, lam1
        m1, m2 = m2, m1
    deltas = increment_gram(x, y)
    out = np.empty(x.shape[0], dtype=deltas.dtype)
    with config.threads(threads) as nw:
        diags = np.empty((nw, 3, min(cfg.strip_width, m1) + 1), dtype=deltas.dtype)
        handoffs = np.empty((nw, m2 + 1), dtype=deltas.dtype)
        _kernels.goursat_batch(deltas, lam1, lam2, cfg.scale, cfg.strip_width,
                               diags, handoffs, out)
    return out


def kernel_gram(x, y=None, cfg: KernelConfig = KernelConfig(),
                threads: int | None = None) -> np.ndarray:
    """Gram matrix G[a, b] = k(x_a, y_b).

    When ``y`` is the same object as ``x`` (or omitted) only the upper
    triangle is solved and the result is mirrored, hence exactly symmetric.
    """
    symmetric = y is None or y is x
    x = _as_paths(x, "x")
    y = x if symmetric else _as_paths(y, "y")
    if x.shape[2] != y.shape[2]:
        raise InvalidArgument(f"path dimensions differ: {x.shape[2]} vs {y.shape[2]}")
    lam1, lam2 = cfg.dyadic_x, cfg.dyadic_y
    transposed = False
    m1 = (x.shape[1] - 1) << lam1
    m2 = (y.shape[1] - 1) << lam2
    if m2 > m1:
        x, y = y, x
        lam1, lam2 = lam2, lam1
        transposed = True
    dx = np.ascontiguousarray(np.diff(x, axis=1))
    dyt = np.ascontiguousarray(np.diff(y, axis=1).transpose(0, 2, 1))
    out = np.empty((x.shape[0], y.shape[0]), dtype=dx.dtype)
    with config.threads(threads):
        _kernels.goursat_gram(dx, dyt, lam1, lam2, cfg.scale, cfg.strip_width,
                              out, symmetric)
    if symmetric:
        iu = np.triu_indices(out.shape[0], k=1)
        out[(iu[1], iu[0])] = out[iu]
    return out.T if transposed else out
