"""JIT-compiled kernels over flat truncated-tensor buffers and PDE grids.

Layout convention: a truncated tensor of dimension d and depth N is one
contiguous buffer; level k (1-based) occupies offsets[k-1]:offsets[k] and
holds d**k entries in row-major multi-index order. Level 0 is implicit and
always 1. ``offsets`` is an int64 array of N+1 entries with offsets[N] equal
to the buffer length.

Every function here writes only into caller-provided buffers; none allocates
(the per-path backward allocates one length-d staging vector). All arithmetic
is strict IEEE (no fastmath), so results are bit-reproducible regardless of
worker count or work partitioning.
"""

from . import config  # noqa: F401  (raises the numba thread cap pre-import)

import numba
import numpy as np
from numba import njit, prange


# ---------------------------------------------------------------------------
# truncated tensor algebra
# ---------------------------------------------------------------------------

@njit(cache=True)
def exp_into(out, z, offsets):
    """Write the levels of the tensor exponential of z into ``out``.

    Level k is z^(x)k / k!, built iteratively from level k-1 in one pass.
    """
    d = z.shape[0]
    depth = offsets.shape[0] - 1
    for j in range(d):
        out[j] = z[j]
    for k in range(2, depth + 1):
        prev = offsets[k - 2]
        base = offsets[k - 1]
        m = base - prev  # d**(k-1)
        inv = 1.0 / k
        for row in range(m):
            v = out[prev + row] * inv
            rb = base + row * d
            for j in range(d):
                out[rb + j] = v * z[j]


@njit(cache=True)
def mul_acc_into(out, a, b, offsets, unit_terms):
    """out_k += sum_{i+j=k, i,j>=1} a_i (x) b_j, plus a_k + b_k if unit_terms.

    Levels are written from the top down, so ``out`` may alias ``a``: level k
    only reads levels below k of ``a``, which are still untouched.
    """
    depth = offsets.shape[0] - 1
    for k in range(depth, 0, -1):
        base = offsets[k - 1]
        if unit_terms:
            nk = offsets[k] - base
            for t in range(nk):
                out[base + t] += a[base + t] + b[base + t]
        for i in range(1, k):
            abase = offsets[i - 1]
            bbase = offsets[k - i - 1]
            m = offsets[i] - abase
            n = offsets[k - i] - bbase
            for row in range(m):
                v = a[abase + row]
                rb = base + row * n
                for col in range(n):
                    out[rb + col] += v * b[bbase + col]


@njit(cache=True)
def chen_update_inplace(sig, e, offsets):
    """sig <- sig (x) e over stored levels (implicit unit level 0 on both)."""
    depth = offsets.shape[0] - 1
    for k in range(depth, 0, -1):
        base = offsets[k - 1]
        for i in range(1, k):
            abase = offsets[i - 1]
            bbase = offsets[k - i - 1]
            m = offsets[i] - abase
            n = offsets[k - i] - bbase
            for row in range(m):
                v = sig[abase + row]
                rb = base + row * n
                for col in range(n):
                    sig[rb + col] += v * e[bbase + col]
        nk = offsets[k] - base
        for t in range(nk):
            sig[base + t] += e[base + t]


# ---------------------------------------------------------------------------
# signature forward
# ---------------------------------------------------------------------------

@njit(cache=True)
def _is_zero_step(incs, step):
    for j in range(incs.shape[1]):
        if incs[step, j] != 0.0:
            return False
    return True


@njit(cache=True)
def horner_sig_path(incs, out, scratch, offsets):
    """Accumulate the signature of one piecewise-linear path into ``out``.

    ``out`` must enter zeroed (the identity element); ``scratch`` holds at
    least d**N entries and is clobbered. Per increment, each level update is
    evaluated in factored form; the running factor lives in ``scratch`` and
    the in-place right-multiplies walk backwards so stale entries die exactly
    when they stop being read.
    """
    n_steps = incs.shape[0]
    d = incs.shape[1]
    depth = offsets.shape[0] - 1
    for step in range(n_steps):
        if _is_zero_step(incs, step):
            continue  # identity update, bit-exact no-op
        z = incs[step]
        for k in range(depth, 1, -1):
            inv = 1.0 / k
            for j in range(d):
                scratch[j] = z[j] * inv
            m = d
            for i in range(1, k - 1):
                abase = offsets[i - 1]
                for t in range(m):
                    scratch[t] += out[abase + t]
                inv = 1.0 / (k - i)
                for row in range(m - 1, -1, -1):
                    v = scratch[row] * inv
                    rb = row * d
                    for j in range(d):
                        scratch[rb + j] = v * z[j]
                m *= d
            abase = offsets[k - 2]
            for t in range(m):
                scratch[t] += out[abase + t]
            base = offsets[k - 1]
            for row in range(m):
                v = scratch[row]
                rb = base + row * d
                for j in range(d):
                    out[rb + j] += v * z[j]
        for j in range(d):
            out[j] += z[j]


@njit(cache=True)
def direct_sig_path(incs, out, exp_scratch, offsets):
    """Level-by-level signature update; exp_scratch holds one full tensor."""
    n_steps = incs.shape[0]
    for step in range(n_steps):
        if _is_zero_step(incs, step):
            continue
        exp_into(exp_scratch, incs[step], offsets)
        chen_update_inplace(out, exp_scratch, offsets)


@njit(parallel=True, cache=True)
def sig_batch(incs, out, scratch, offsets, use_horner):
    """Batch signature; one path per task, one scratch block per worker."""
    for b in prange(incs.shape[0]):
        tid = numba.get_thread_id()
        if use_horner:
            horner_sig_path(incs[b], out[b], scratch[tid], offsets)
        else:
            direct_sig_path(incs[b], out[b], scratch[tid], offsets)


# ---------------------------------------------------------------------------
# signature backward: time-reversed deconstruction
# ---------------------------------------------------------------------------

@njit(cache=True)
def sig_backward_path(incs, cot, g_out, sig, sbar, ebuf, ebar, offsets):
    """Increment adjoints of one path's signature, by walking segments in
    reverse and peeling one tensor-exponential factor per step.

    Buffers (each offsets[-1] long): ``sig`` running prefix signature,
    ``sbar`` its adjoint, ``ebuf`` the current segment exponential,
    ``ebar`` its adjoint. g_out[step] receives dF/d(increment step).
    """
    n_steps = incs.shape[0]
    d = incs.shape[1]
    depth = offsets.shape[0] - 1
    total = offsets[depth]

    for t in range(total):
        sig[t] = 0.0
    horner_sig_path(incs, sig, ebuf, offsets)
    for t in range(total):
        sbar[t] = cot[t]

    zneg = np.empty(d, dtype=incs.dtype)

    for step in range(n_steps - 1, -1, -1):
        z = incs[step]
        if step > 0:
            # peel this segment off: prefix <- prefix (x) exp(-z)
            for j in range(d):
                zneg[j] = -z[j]
            exp_into(ebuf, zneg, offsets)
            chen_update_inplace(sig, ebuf, offsets)
        else:
            for t in range(total):
                sig[t] = 0.0  # empty prefix: identity

        exp_into(ebuf, z, offsets)

        # adjoint of C = A (x) E w.r.t. E, using the pre-step prefix A = sig:
        # ebar_m = sbar_m + sum_{k>m} A_{k-m}^T . sbar_k  (contract left block)
        for t in range(total):
            ebar[t] = sbar[t]
        for m in range(1, depth):
            mbase = offsets[m - 1]
            nm = offsets[m] - mbase
            for k in range(m + 1, depth + 1):
                kbase = offsets[k - 1]
                i = k - m
                abase = offsets[i - 1]
                rows = offsets[i] - abase
                for row in range(rows):
                    v = sig[abase + row]
                    rb = kbase + row * nm
                    for col in range(nm):
                        ebar[mbase + col] += v * sbar[rb + col]

        if step > 0:
            # adjoint w.r.t. A: sbar_i += sum_{k>i} sbar_k . E_{k-i}
            # (contract right block); ascending i reads only untouched levels.
            for i in range(1, depth):
                ibase = offsets[i - 1]
                rows = offsets[i] - ibase
                for k in range(i + 1, depth + 1):
                    kbase = offsets[k - 1]
                    m = k - i
                    ebase = offsets[m - 1]
                    nm = offsets[m] - ebase
                    for row in range(rows):
                        acc = 0.0
                        rb = kbase + row * nm
                        for col in range(nm):
                            acc += sbar[rb + col] * ebuf[ebase + col]
                        sbar[ibase + row] += acc

        # adjoint of E = exp(z): reverse the E_m = E_{m-1} (x) z / m recurrence
        for j in range(d):
            g_out[step, j] = 0.0
        for m in range(depth, 1, -1):
            inv = 1.0 / m
            pbase = offsets[m - 2]
            mbase = offsets[m - 1]
            rows = mbase - pbase
            for row in range(rows):
                rb = mbase + row * d
                eprev = ebuf[pbase + row]
                acc = 0.0
                for j in range(d):
                    w = ebar[rb + j] * inv
                    g_out[step, j] += eprev * w
                    acc += w * z[j]
                ebar[pbase + row] += acc
        for j in range(d):
            g_out[step, j] += ebar[j]


@njit(parallel=True, cache=True)
def sig_backward_batch(incs, cot, g_out, work, offsets):
    """Batch backward; ``work`` is (workers, 4, total) per-worker scratch."""
    for b in prange(incs.shape[0]):
        tid = numba.get_thread_id()
        sig_backward_path(incs[b], cot[b], g_out[b],
                          work[tid, 0], work[tid, 1], work[tid, 2], work[tid, 3],
                          offsets)


# ---------------------------------------------------------------------------
# signature-kernel PDE solver (Goursat problem, second-order scheme)
# ---------------------------------------------------------------------------

@njit(cache=True, inline="always")
def _cell_value(p, k_up, k_left, k_diag):
    a = 1.0 + p * 0.5 + p * p * (1.0 / 12.0)
    b = 1.0 - p * p * (1.0 / 12.0)
    return (k_up + k_left) * a - k_diag * b


@njit(cache=True)
def goursat_strip(delta, lam1, lam2, scale, strip, diags, handoff):
    """March the fine grid in strips of ``strip`` rows with three rotating
    anti-diagonal buffers plus one handoff row.

    ``delta`` is the coarse increment-product matrix; fine cell (s, t) reads
    delta[s >> lam1, t >> lam2] * scale. ``diags`` is (3, strip+1); ``handoff``
    is (columns+1,), enters as the all-ones boundary row and leaves as the
    final grid row. Returns the bottom-right grid node.
    """
    m1 = delta.shape[0] << lam1
    m2 = delta.shape[1] << lam2
    for t in range(m2 + 1):
        handoff[t] = 1.0
    r0 = 0
    ia, ib, ic = 0, 1, 2
    while r0 < m1:
        h = min(strip, m1 - r0)
        dlast = h + m2
        for dd in range(2, dlast + 1):
            u_lo = max(1, dd - m2)
            u_hi = min(h, dd - 1)
            for u in range(u_lo, u_hi + 1):
                t = dd - u
                s = r0 + u
                if u == 1:
                    k_up = handoff[t]
                    k_diag = handoff[t - 1]
                else:
                    k_up = diags[ib, u - 1]
                    k_diag = diags[ia, u - 1] if t > 1 else 1.0
                k_left = diags[ib, u] if t > 1 else 1.0
                p = delta[(s - 1) >> lam1, (t - 1) >> lam2] * scale
                diags[ic, u] = _cell_value(p, k_up, k_left, k_diag)
            # the strip's bottom row becomes the next strip's boundary; the
            # write lags two diagonals so this diagonal's reads see old values
            tf = dd - 2 - h
            if tf >= 1:
                handoff[tf] = diags[ia, h]
            ia, ib, ic = ib, ic, ia
        # flush the bottom-row cells of the last two diagonals
        if m2 - 1 >= 1:
            handoff[m2 - 1] = diags[ia, h]
        handoff[m2] = diags[ib, h]
        r0 += h
    return handoff[m2]


@njit(parallel=True, cache=True)
def goursat_strip_parallel(delta, lam1, lam2, scale, strip, diags, handoff):
    """Same march as goursat_strip with cells of one anti-diagonal computed
    in parallel; per-diagonal barriers keep the wavefront synchronized and
    the output bit-identical to the serial march."""
    m1 = delta.shape[0] << lam1
    m2 = delta.shape[1] << lam2
    for t in range(m2 + 1):
        handoff[t] = 1.0
    r0 = 0
    ia, ib, ic = 0, 1, 2
    while r0 < m1:
        h = min(strip, m1 - r0)
        dlast = h + m2
        for dd in range(2, dlast + 1):
            u_lo = max(1, dd - m2)
            u_hi = min(h, dd - 1)
            for u in prange(u_lo, u_hi + 1):
                t = dd - u
                s = r0 + u
                if u == 1:
                    k_up = handoff[t]
                    k_diag = handoff[t - 1]
                else:
                    k_up = diags[ib, u - 1]
                    k_diag = diags[ia, u - 1] if t > 1 else 1.0
                k_left = diags[ib, u] if t > 1 else 1.0
                p = delta[(s - 1) >> lam1, (t - 1) >> lam2] * scale
                diags[ic, u] = _cell_value(p, k_up, k_left, k_diag)
            tf = dd - 2 - h
            if tf >= 1:
                handoff[tf] = diags[ia, h]
            ia, ib, ic = ib, ic, ia
        if m2 - 1 >= 1:
            handoff[m2 - 1] = diags[ia, h]
        handoff[m2] = diags[ib, h]
        r0 += h
    return handoff[m2]


@njit(cache=True)
def goursat_grid(delta, lam1, lam2, scale, grid):
    """Fill the full fine-resolution solution array; returns the corner."""
    m1 = delta.shape[0] << lam1
    m2 = delta.shape[1] << lam2
    for t in range(m2 + 1):
        grid[0, t] = 1.0
    for s in range(m1 + 1):
        grid[s, 0] = 1.0
    for s in range(1, m1 + 1):
        ci = (s - 1) >> lam1
        for t in range(1, m2 + 1):
            p = delta[ci, (t - 1) >> lam2] * scale
            grid[s, t] = _cell_value(p, grid[s - 1, t], grid[s, t - 1],
                                     grid[s - 1, t - 1])
    return grid[m1, m2]


@njit(parallel=True, cache=True)
def goursat_batch(deltas, lam1, lam2, scale, strip, diags, handoffs, out):
    """Solve one PDE per batch entry; per-worker diagonal/handoff buffers."""
    for b in prange(deltas.shape[0]):
        tid = numba.get_thread_id()
        out[b] = goursat_strip(deltas[b], lam1, lam2, scale, strip,
                               diags[tid], handoffs[tid])


@njit(parallel=True, cache=True)
def goursat_gram(dx, dyt, lam1, lam2, scale, strip, out, symmetric):
    """Gram assembly: out[a, b] = solve(dx[a] . dyt[b]).

    ``dyt`` holds transposed increment matrices so the per-pair product is a
    plain contiguous matmul. When ``symmetric`` only the upper triangle is
    solved; the caller mirrors it.
    """
    n1 = dx.shape[0]
    n2 = dyt.shape[0]
    rows = dx.shape[1] << lam1
    cols = dyt.shape[2] << lam2
    npairs = n1 * n2
    for idx in prange(npairs):
        a = idx // n2
        b = idx % n2
        if symmetric and b < a:
            continue
        delta = np.dot(dx[a], dyt[b])
        diags = np.empty((3, min(strip, rows) + 1), dtype=dx.dtype)
        handoff = np.empty(cols + 1, dtype=dx.dtype)
        out[a, b] = goursat_strip(delta, lam1, lam2, scale, strip, diags, handoff)


# ---------------------------------------------------------------------------
# signature-kernel backward: adjoint sweep over the stored forward grid
# ---------------------------------------------------------------------------

@njit(cache=True)
def goursat_backward(delta, lam1, lam2, scale, grid, cot, d1, d2):
    """One reverse traversal computing node adjoints and accumulating
    dF/d(delta) into the coarse matrix ``d2`` (pre-zeroed).

    ``d1`` is an (m1+1, m2+1) workspace for node adjoints; entries beyond the
    grid are treated as zero. The coarse accumulation folds in the dyadic
    scaling of the fine-cell products.
    """
    m1 = grid.shape[0] - 1
    m2 = grid.shape[1] - 1
    for s in range(m1, 0, -1):
        for t in range(m2, 0, -1):
            if s == m1 and t == m2:
                d1[s, t] = cot
            else:
                acc = 0.0
                if s < m1:
                    p = delta[s >> lam1, (t - 1) >> lam2] * scale
                    acc += d1[s + 1, t] * (1.0 + p * 0.5 + p * p * (1.0 / 12.0))
                if t < m2:
                    p = delta[(s - 1) >> lam1, t >> lam2] * scale
                    acc += d1[s, t + 1] * (1.0 + p * 0.5 + p * p * (1.0 / 12.0))
                if s < m1 and t < m2:
                    p = delta[s >> lam1, t >> lam2] * scale
                    acc -= d1[s + 1, t + 1] * (1.0 - p * p * (1.0 / 12.0))
                d1[s, t] = acc
            p = delta[(s - 1) >> lam1, (t - 1) >> lam2] * scale
            w = (grid[s, t - 1] + grid[s - 1, t]) * (0.5 + p * (1.0 / 6.0)) \
                + grid[s - 1, t - 1] * (p * (1.0 / 6.0))
            d2[(s - 1) >> lam1, (t - 1) >> lam2] += d1[s, t] * w * scale
