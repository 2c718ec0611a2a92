import numpy as np
import pytest

import sigcore as sc
from conftest import fd_kernel_grads, rel_err


def _pair(rng, l1, l2, d=2, scale=0.5):
    return rng.standard_normal((l1, d)) * scale, rng.standard_normal((l2, d)) * scale


def _solve_with_grid(x, y, lam1, lam2):
    cfg = sc.KernelConfig(lam1, lam2, store_grid=True)
    res = sc.solve_goursat(sc.increment_gram(x, y), cfg)
    return cfg, res


class TestHandValues:
    def test_single_cell_accumulation(self):
        # delta = 1, lambda = 0, cot = 1: dF/d(delta) = 2*(1/2 + 1/6) + 1/6 = 1.5
        x = np.array([[0.0], [1.0]])
        y = np.array([[0.0], [1.0]])
        cfg, res = _solve_with_grid(x, y, 0, 0)
        gx, gy = sc.kernel_backward(x, y, cfg, res)
        np.testing.assert_allclose(gx, [[-1.5], [1.5]], rtol=1e-15)
        np.testing.assert_allclose(gy, [[-1.5], [1.5]], rtol=1e-15)

    def test_constant_y_freezes_x(self):
        # k == 1 for every x, so dF/dx vanishes identically; dF/dy does not
        # (the solver output varies as y leaves constancy) and must match FD
        rng = np.random.default_rng(0)
        x = rng.standard_normal((4, 2))
        y = np.ones((5, 2))
        cfg, res = _solve_with_grid(x, y, 1, 1)
        gx, gy = sc.kernel_backward(x, y, cfg, res)
        assert not gx.any()
        _, fgy = fd_kernel_grads(x, y, cfg)
        assert rel_err(gy, fgy, floor=1e-9) < 1e-6

    def test_both_constant_all_zero(self):
        x = np.ones((4, 2))
        y = np.ones((5, 2)) * 2.0
        cfg, res = _solve_with_grid(x, y, 0, 1)
        gx, gy = sc.kernel_backward(x, y, cfg, res)
        assert not gx.any() and not gy.any()
        assert res.value == 1.0


class TestFiniteDifferences:
    @pytest.mark.parametrize("lam1", [0, 1, 2])
    @pytest.mark.parametrize("lam2", [0, 1, 2])
    def test_matches_solver_differences(self, lam1, lam2):
        rng = np.random.default_rng(10 * lam1 + lam2)
        x, y = _pair(rng, 4, 6)
        cfg, res = _solve_with_grid(x, y, lam1, lam2)
        gx, gy = sc.kernel_backward(x, y, cfg, res)
        fgx, fgy = fd_kernel_grads(x, y, cfg)
        assert rel_err(gx, fgx, floor=1e-9) < 1e-6
        assert rel_err(gy, fgy, floor=1e-9) < 1e-6

    def test_shortest_paths(self):
        rng = np.random.default_rng(99)
        x, y = _pair(rng, 2, 2)
        for lam1, lam2 in ((0, 0), (2, 1)):
            cfg, res = _solve_with_grid(x, y, lam1, lam2)
            gx, gy = sc.kernel_backward(x, y, cfg, res)
            fgx, fgy = fd_kernel_grads(x, y, cfg)
            assert rel_err(gx, fgx, floor=1e-9) < 1e-6
            assert rel_err(gy, fgy, floor=1e-9) < 1e-6


class TestStructure:
    def test_swap_symmetry(self):
        rng = np.random.default_rng(1)
        x, y = _pair(rng, 4, 7)
        cfg_xy, res_xy = _solve_with_grid(x, y, 1, 2)
        gx, gy = sc.kernel_backward(x, y, cfg_xy, res_xy)
        cfg_yx, res_yx = _solve_with_grid(y, x, 2, 1)
        hy, hx = sc.kernel_backward(y, x, cfg_yx, res_yx)
        assert rel_err(gx, hx) < 1e-13
        assert rel_err(gy, hy) < 1e-13

    def test_linear_in_cotangent(self):
        rng = np.random.default_rng(2)
        x, y = _pair(rng, 3, 5)
        cfg, res = _solve_with_grid(x, y, 1, 1)
        g1x, g1y = sc.kernel_backward(x, y, cfg, res, cot=1.0)
        g2x, g2y = sc.kernel_backward(x, y, cfg, res, cot=-2.5)
        assert rel_err(g2x, -2.5 * g1x) < 1e-13
        assert rel_err(g2y, -2.5 * g1y) < 1e-13

    def test_missing_grid_is_invalid_state(self):
        x = np.zeros((3, 2))
        y = np.zeros((3, 2))
        res = sc.solve_goursat(sc.increment_gram(x, y), sc.KernelConfig())
        with pytest.raises(sc.InvalidState):
            sc.kernel_backward(x, y, sc.KernelConfig(), res)

    def test_grid_shape_mismatch(self):
        rng = np.random.default_rng(3)
        x, y = _pair(rng, 3, 4)
        cfg, res = _solve_with_grid(x, y, 1, 1)
        with pytest.raises(sc.InvalidArgument):
            sc.kernel_backward(x, y, sc.KernelConfig(2, 2, store_grid=True), res)


class TestBatchWrapper:
    def test_matches_single_pairs(self):
        rng = np.random.default_rng(4)
        x = rng.standard_normal((3, 4, 2)) * 0.5
        y = rng.standard_normal((3, 6, 2)) * 0.5
        cfg = sc.KernelConfig(1, 0)
        values, gx, gy = sc.kernel_batch_backward(x, y, cfg)
        kb = sc.kernel_batch(x, y, cfg)
        np.testing.assert_array_equal(values, kb)
        for b in range(3):
            cfg_b, res = _solve_with_grid(x[b], y[b], 1, 0)
            wx, wy = sc.kernel_backward(x[b], y[b], cfg_b, res)
            np.testing.assert_array_equal(gx[b], wx)
            np.testing.assert_array_equal(gy[b], wy)
