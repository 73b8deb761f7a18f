import math

import numpy as np
import pytest

from stochlp import (DomainError, LinearProgram, ShapeError, duality_gap,
                     recover_solution, reformulate)
from stochlp.instances import random_lp


class TestLinearProgram:
    def test_basic_fields(self, tiny_lp):
        assert tiny_lp.d == 1 and tiny_lp.n == 2
        assert tiny_lp.L == 1.0  # defaulted to ||c||_inf

    def test_l_default_floor(self):
        lp = LinearProgram(np.array([[1.0, 1.0]]), np.array([1.0]),
                           np.zeros(2), R=1.0)
        assert lp.L == 1e-30

    def test_l_below_c_norm_rejected(self):
        with pytest.raises(DomainError):
            LinearProgram(np.array([[1.0, 1.0]]), np.array([1.0]),
                          np.array([-3.0, 0.0]), R=1.0, L=2.0)

    def test_d_greater_than_n(self):
        with pytest.raises(ShapeError):
            LinearProgram(np.ones((3, 2)), np.ones(3), np.ones(2), R=1.0)

    def test_rank_deficient_rejected(self):
        a = np.array([[1.0, 2.0, 3.0], [2.0, 4.0, 6.0]])
        with pytest.raises(DomainError):
            LinearProgram(a, np.array([1.0, 2.0]), np.zeros(3), R=1.0)

    def test_bad_r(self, tiny_lp):
        with pytest.raises(DomainError):
            LinearProgram(tiny_lp.A, tiny_lp.b, tiny_lp.c, R=0.0)


class TestReformulate:
    def test_worked_example(self):
        # A=[[1,1]], b=(1), c=(-1,0), R=2, L=1, delta=0.5
        lp = LinearProgram(np.array([[1.0, 1.0]]), np.array([1.0]),
                           np.array([-1.0, 0.0]), R=2.0, L=1.0)
        refm = reformulate(lp, 0.5)
        assert np.allclose(refm.lpbar.A,
                           [[1.0, 1.0, 0.0, -1.5], [1.0, 1.0, 1.0, 0.0]],
                           atol=1e-15)
        assert np.allclose(refm.lpbar.b, [0.5, 3.0], atol=1e-15)
        assert np.allclose(refm.lpbar.c, [-0.5, 0.0, 0.0, 1.0], atol=1e-15)
        assert np.allclose(refm.lpbar.A @ np.ones(4), [0.5, 3.0], atol=1e-15)

    @pytest.mark.parametrize("seed,delta", [(0, 1.0), (1, 0.3), (2, 0.01)])
    def test_initial_triple(self, seed, delta):
        lp = random_lp(np.random.default_rng(seed), 4, 9)
        refm = reformulate(lp, delta)
        abar, bbar, cbar = refm.lpbar.A, refm.lpbar.b, refm.lpbar.c
        # feasible start, slack consistency, near-ones complementarity
        assert np.abs(abar @ refm.x0 - bbar).max() <= 1e-10
        assert np.abs(refm.s0 - (cbar - abar.T @ refm.y0)).max() <= 1e-10
        assert np.all(refm.x0 > 0) and np.all(refm.s0 > 0)
        mu0 = refm.x0 * refm.s0
        assert np.all(mu0 >= 1.0 - delta - 1e-12)
        assert np.all(mu0 <= 1.0 + delta + 1e-12)

    def test_full_row_rank_of_abar(self, rng):
        # the merged second row keeps A-bar full row rank by construction;
        # LinearProgram would reject it otherwise
        lp = random_lp(rng, 5, 12)
        refm = reformulate(lp, 0.25)
        assert refm.lpbar.d == lp.d + 1
        assert refm.lpbar.n == lp.n + 2

    def test_delta_domain(self, tiny_lp):
        for bad in (0.0, -0.1, 1.5):
            with pytest.raises(DomainError):
                reformulate(tiny_lp, bad)


class TestRecoverSolution:
    def test_scaling(self, tiny_lp):
        refm = reformulate(tiny_lp, 0.5)
        xbar = np.array([0.5, 0.0, 0.7, 0.3])
        xhat = recover_solution(xbar, refm, tiny_lp)
        assert np.allclose(xhat, [1.0, 0.0], atol=1e-15)

    def test_roundtrip_identity(self, rng):
        lp = random_lp(rng, 3, 7)
        refm = reformulate(lp, 0.3)
        x = rng.uniform(0.1, 1.0, 7)
        xbar = np.concatenate([x / lp.R, [0.0, 0.0]])
        assert np.abs(recover_solution(xbar, refm, lp) - x).max() <= 1e-12

    def test_negative_entry_rejected(self, tiny_lp):
        refm = reformulate(tiny_lp, 0.5)
        with pytest.raises(DomainError):
            recover_solution(np.array([-1e-6, 0.0, 0.0, 0.0]), refm, tiny_lp)

    def test_tiny_negative_clipped(self, tiny_lp):
        refm = reformulate(tiny_lp, 0.5)
        xhat = recover_solution(np.array([-5e-13, 0.5, 0.0, 0.0]),
                                refm, tiny_lp)
        assert xhat[0] == 0.0

    def test_length_check(self, tiny_lp):
        refm = reformulate(tiny_lp, 0.5)
        with pytest.raises(ShapeError):
            recover_solution(np.ones(3), refm, tiny_lp)


class TestDualityGap:
    def test_ones(self):
        assert duality_gap(np.ones(3), np.ones(3)) == 3.0

    def test_complementary(self):
        assert duality_gap(np.array([2.0, 0.0]), np.array([0.0, 5.0])) == 0.0

    def test_matches_summation_oracle(self, rng):
        x = rng.standard_normal(50)
        s = rng.standard_normal(50)
        oracle = math.fsum(float(a) * float(b) for a, b in zip(x, s))
        assert duality_gap(x, s) == pytest.approx(oracle, rel=1e-13)

    def test_length_mismatch(self):
        with pytest.raises(ShapeError):
            duality_gap(np.ones(2), np.ones(3))
