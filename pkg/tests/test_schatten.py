import math

import numpy as np
import pytest

from schurkit import (
    Box,
    LabeledMatrix,
    QuadratureGrid,
    cs_gap,
    lp_sp_norm,
    pi_embed,
    schatten_norm,
    square_function_norm,
)
from schurkit.schatten import abs_op


def _random(rows, cols, rng):
    shape = (rows.npoints, cols.npoints)
    return LabeledMatrix(rows, cols, rng.standard_normal(shape)
                         + 1j * rng.standard_normal(shape))


class TestLabeledMatrix:
    def test_shape_validation(self):
        with pytest.raises(ValueError):
            LabeledMatrix(Box.interval(0, 2), Box.interval(0, 3), np.zeros((2, 2)))

    def test_unit_entry(self):
        w = Box.interval(-1, 2)
        e = LabeledMatrix.unit(w, w, (0,), (1,))
        assert e.entry((0,), (1,)) == 1
        assert e.data.sum() == 1

    def test_adjoint_swaps_windows(self):
        r, c = Box.interval(0, 2), Box.interval(0, 3)
        A = LabeledMatrix(r, c, np.arange(6).reshape(2, 3) * (1 + 1j))
        B = A.adjoint()
        assert B.rows == c and B.cols == r
        assert np.array_equal(B.data, A.data.conj().T)

    def test_window_mismatch_rejected(self):
        A = LabeledMatrix.zeros(Box.interval(0, 2))
        B = LabeledMatrix.zeros(Box.interval(1, 3))
        with pytest.raises(ValueError):
            A + B

    def test_matmul_window_chain(self):
        r, m, c = Box.interval(0, 2), Box.interval(5, 8), Box.interval(-1, 1)
        rng = np.random.default_rng(0)
        A, B = _random(r, m, rng), _random(m, c, rng)
        C = A @ B
        assert C.rows == r and C.cols == c
        assert np.allclose(C.data, A.data @ B.data)


class TestSchattenNorm:
    def test_rank_one_all_p(self):
        # a rank-one matrix has one singular value: every p-norm agrees
        w = Box.interval(0, 4)
        u = np.array([1.0, 2.0, -1.0, 0.5])
        v = np.array([3.0, 0.0, 4.0, 1.0])
        A = LabeledMatrix(w, w, np.outer(u, v))
        sv = np.linalg.norm(u) * np.linalg.norm(v)
        for p in (1, 1.5, 2, 3, math.inf):
            assert schatten_norm(A, p) == pytest.approx(sv, rel=1e-12)

    def test_diagonal_is_lp_of_entries(self):
        w = Box.interval(0, 3)
        diag = np.array([3.0, -4.0, 1.0])
        A = LabeledMatrix(w, w, np.diag(diag))
        for p in (1, 2, 4):
            assert schatten_norm(A, p) == pytest.approx(
                np.sum(np.abs(diag) ** p) ** (1 / p), rel=1e-14)
        assert schatten_norm(A, math.inf) == pytest.approx(4.0)

    def test_frobenius_agreement(self):
        rng = np.random.default_rng(7)
        A = _random(Box.interval(0, 6), Box.interval(0, 5), rng)
        assert schatten_norm(A, 2) == pytest.approx(
            np.linalg.norm(A.data, "fro"), rel=1e-13)

    def test_unitary_invariance(self):
        rng = np.random.default_rng(8)
        w = Box.interval(0, 5)
        A = _random(w, w, rng)
        Q, _ = np.linalg.qr(rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5)))
        B = LabeledMatrix(w, w, Q @ A.data)
        for p in (1.2, 2, 3.7, math.inf):
            assert schatten_norm(B, p) == pytest.approx(schatten_norm(A, p), rel=1e-11)

    def test_tiny_singular_values_clipped(self):
        # a numerically rank-one matrix must not leak noise into small p
        w = Box.interval(0, 3)
        u = np.array([1.0, 1.0, 1.0])
        A = LabeledMatrix(w, w, np.outer(u, u))
        assert schatten_norm(A, 1) == pytest.approx(3.0, abs=1e-12)

    def test_bad_inputs(self):
        w = Box.interval(0, 2)
        A = LabeledMatrix(w, w, np.array([[np.nan, 0], [0, 1]]))
        with pytest.raises(ValueError):
            schatten_norm(A, 2)
        with pytest.raises(ValueError):
            schatten_norm(LabeledMatrix.identity(w), 0)

    def test_quasi_norm_warns(self):
        w = Box.interval(0, 2)
        with pytest.warns(UserWarning):
            schatten_norm(LabeledMatrix.identity(w), 0.5)


class TestAbsOp:
    def test_square_of_abs_is_gram(self):
        rng = np.random.default_rng(3)
        A = _random(Box.interval(0, 4), Box.interval(0, 4), rng)
        R = abs_op(A)
        assert np.allclose(R.data @ R.data, A.data.conj().T @ A.data, atol=1e-12)

    def test_psd(self):
        rng = np.random.default_rng(4)
        A = _random(Box.interval(0, 5), Box.interval(0, 3), rng)
        R = abs_op(A)
        assert R.rows == A.cols
        w = np.linalg.eigvalsh(R.data)
        assert w.min() >= -1e-12


class TestCsGap:
    def test_gap_nonnegative_randomized(self):
        rng = np.random.default_rng(100)
        for trial in range(200):
            nr = int(rng.integers(1, 7))
            nc = int(rng.integers(1, 7))
            count = int(rng.integers(1, 9))
            rbox, cbox = Box.interval(0, nr), Box.interval(0, nc)
            a = [_random(rbox, cbox, rng) for _ in range(count)]
            c = [_random(rbox, cbox, rng) for _ in range(count)]
            assert cs_gap(a, c) >= -1e-10

    def test_commuting_scalars_tight(self):
        # 1x1 case with matched sequences: equality holds, gap is 0
        w = Box.interval(0, 1)
        a = [LabeledMatrix(w, w, np.array([[x]])) for x in (1.0, 2.0, 2.0)]
        assert cs_gap(a, a) >= -1e-13

    def test_validation(self):
        w = Box.interval(0, 2)
        A = LabeledMatrix.identity(w)
        with pytest.raises(ValueError):
            cs_gap([A], [])
        with pytest.raises(ValueError):
            cs_gap([A], [LabeledMatrix.identity(Box.interval(1, 3))])


class TestTorusNorms:
    def test_single_coefficient_reduces_to_schatten(self):
        rng = np.random.default_rng(5)
        w = Box.interval(0, 4)
        A = _random(w, w, rng)
        from schurkit import MatTrigPoly
        f = MatTrigPoly(1, {(3,): A})
        for p in (1.5, 2, 4, math.inf):
            assert lp_sp_norm(f, p) == pytest.approx(schatten_norm(A, p), rel=1e-12)

    def test_grid_must_resolve_bandwidth(self):
        # a too-coarse grid aliases; the default grid does not
        rng = np.random.default_rng(6)
        w = Box.interval(0, 3)
        A = pi_embed(_random(w, w, rng))
        dense = lp_sp_norm(A, 2)
        finer = lp_sp_norm(A, 2, grid=QuadratureGrid(1, 64))
        assert dense == pytest.approx(finer, rel=1e-12)

    def test_parseval_p2(self):
        rng = np.random.default_rng(9)
        w = Box.interval(-2, 3)
        A = _random(w, w, rng)
        f = pi_embed(A)
        coeff_sq = sum(np.sum(np.abs(C.data) ** 2) for _, C in f.items())
        assert lp_sp_norm(f, 2) == pytest.approx(math.sqrt(coeff_sq), rel=1e-12)

    def test_square_function_single_member_p2(self):
        rng = np.random.default_rng(10)
        w = Box.interval(0, 4)
        f = pi_embed(_random(w, w, rng))
        for side in ("column", "row", "max"):
            assert square_function_norm([f], 2, side=side) == pytest.approx(
                lp_sp_norm(f, 2), rel=1e-12)

    def test_square_function_rejects_bad_p(self):
        w = Box.interval(0, 2)
        f = pi_embed(LabeledMatrix.identity(w))
        with pytest.raises(ValueError):
            square_function_norm([f], 1.5)
        with pytest.raises(ValueError):
            square_function_norm([f], math.inf)
        with pytest.raises(ValueError):
            square_function_norm([f], 4, side="diag")

    def test_square_function_pythagoras(self):
        # frequency-disjoint members at p=2: norms add in squares
        rng = np.random.default_rng(11)
        w = Box.interval(0, 3)
        A, B = _random(w, w, rng), _random(w, w, rng)
        from schurkit import MatTrigPoly
        f = MatTrigPoly(1, {(1,): A})
        g = MatTrigPoly(1, {(2,): B})
        got = square_function_norm([f, g], 2)
        want = math.sqrt(lp_sp_norm(f, 2) ** 2 + lp_sp_norm(g, 2) ** 2)
        assert got == pytest.approx(want, rel=1e-12)

    def test_empty_family_is_zero(self):
        from schurkit import MatTrigPoly
        z = MatTrigPoly.zero(1, Box.interval(0, 2), Box.interval(0, 2))
        assert square_function_norm([z], 4) == 0.0
