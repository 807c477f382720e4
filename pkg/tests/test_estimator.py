"""Lower-bound search, block amplification, growth experiment."""

from fractions import Fraction

import numpy as np
import pytest

from schurkit import (
    Box,
    DiscreteSymbol,
    LabeledMatrix,
    apply_schur,
    catalog,
    cb_lower_bound,
    growth_experiment,
    norm_lower_bound,
    schatten_norm,
)


class TestNormLowerBound:
    def test_p2_equals_sup_of_symbol(self):
        # at p = 2 the multiplier norm is exactly the largest |entry|, and
        # the matrix-unit start attains it
        win = Box.interval(-8, 8)
        m = catalog("smooth_homogeneous")
        res = norm_lower_bound(m, win, 2.0, budget={"restarts": 3, "iterations": 40})
        assert res.value == pytest.approx(0.9375, abs=1e-12)

    def test_p2_random_tables(self):
        win = Box.interval(0, 6)
        for seed in range(5):
            rng = np.random.default_rng(seed)
            entries = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
            m = DiscreteSymbol.dense(win, win, entries)
            res = norm_lower_bound(m, win, 2.0,
                                   budget={"restarts": 2, "iterations": 30},
                                   seed=seed)
            assert res.value == pytest.approx(np.abs(entries).max(), rel=1e-10)

    def test_constant_symbol_is_identity_multiplier(self):
        res = norm_lower_bound(catalog("constant_one"), Box.interval(-3, 3), 3.0,
                               budget={"restarts": 2, "iterations": 20})
        assert res.value == 1.0

    def test_rank_one_attains_sup(self):
        # rank-one symbols multiply as sup|m| at every p; frozen search output
        m = catalog("rank_one", seed=7)
        win = Box.interval(-6, 6)
        res = norm_lower_bound(m, win, 2.5,
                               budget={"restarts": 4, "iterations": 80}, seed=1)
        sup = float(np.abs(m.values_on(win, win)).max())
        assert res.value == pytest.approx(sup, rel=1e-12)
        assert res.value == pytest.approx(0.8443443278048262, abs=1e-12)

    def test_witness_certifies_value(self):
        m = catalog("triangular")
        win = Box.interval(-4, 4)
        res = norm_lower_bound(m, win, 4.0,
                               budget={"restarts": 3, "iterations": 40}, seed=2)
        num = schatten_norm(apply_schur(m, res.witness), 4.0)
        den = schatten_norm(res.witness, 4.0)
        assert res.value == pytest.approx(num / den, rel=1e-13)
        assert res.verify(m) == pytest.approx(res.value, rel=1e-13)

    def test_verify_catches_tampered_value(self):
        m = catalog("triangular")
        res = norm_lower_bound(m, Box.interval(-2, 2), 3.0,
                               budget={"restarts": 2, "iterations": 20})
        res.value += 1e-6
        with pytest.raises(AssertionError, match="drifted"):
            res.verify(m)

    def test_zero_symbol_flagged(self):
        win = Box.interval(0, 4)
        z = DiscreteSymbol.dense(win, win, np.zeros((4, 4), dtype=complex))
        res = norm_lower_bound(z, win, 2.0)
        assert res.value == 0.0
        assert res.flags["zero_symbol"]
        assert res.verify(z) == 0.0

    def test_scaling_at_p2(self):
        m = catalog("lacunary_toeplitz", seed=3)
        win = Box.interval(-4, 4)
        kw = dict(budget={"restarts": 2, "iterations": 30}, seed=0)
        one = norm_lower_bound(m, win, 2.0, **kw)
        three = norm_lower_bound(3.0 * m, win, 2.0, **kw)
        assert three.value == pytest.approx(3.0 * one.value, rel=1e-12)

    def test_seed_reproducibility(self):
        m = catalog("smooth_homogeneous")
        win = Box.interval(-5, 5)
        kw = dict(budget={"restarts": 4, "iterations": 50}, seed=11)
        a = norm_lower_bound(m, win, 3.0, **kw)
        b = norm_lower_bound(m, win, 3.0, **kw)
        assert a.value == b.value
        assert np.array_equal(a.witness.data, b.witness.data)

    def test_p_domain(self):
        m = catalog("triangular")
        win = Box.interval(0, 2)
        for bad in (1.0, 0.5, float("inf")):
            with pytest.raises(ValueError):
                norm_lower_bound(m, win, bad)

    def test_budget_validation(self):
        m = catalog("triangular")
        win = Box.interval(0, 2)
        with pytest.raises(ValueError):
            norm_lower_bound(m, win, 2.0, budget={"restarts": 0})
        with pytest.raises(ValueError):
            norm_lower_bound(m, win, 2.0, budget={"iterations": -1})


class TestAmplified:
    def test_k1_delegates(self):
        m = catalog("triangular")
        win = Box.interval(-3, 3)
        kw = dict(budget={"restarts": 3, "iterations": 30}, seed=5)
        plain = norm_lower_bound(m, win, 3.0, **kw)
        amp = cb_lower_bound(m, win, 3.0, 1, **kw)
        assert amp.value == plain.value
        assert np.array_equal(amp.witness.data, plain.witness.data)

    def test_k2_never_below_k1(self):
        # the unamplified witness embeds into one block slot, so the k = 2
        # search starts at the k = 1 value
        m = catalog("triangular")
        win = Box.interval(-4, 4)
        kw = dict(budget={"restarts": 4, "iterations": 40}, seed=9)
        k1 = cb_lower_bound(m, win, 4.0, 1, **kw)
        k2 = cb_lower_bound(m, win, 4.0, 2, **kw)
        assert k2.value >= k1.value - 1e-12
        assert k1.value == pytest.approx(1.0019604103897, abs=1e-10)
        assert k2.flags["k_amp"] == 2
        assert k2.window.npoints == 2 * win.npoints

    def test_amplified_table_is_blockwise_constant(self):
        m = catalog("lacunary_toeplitz", seed=2)
        win = Box.interval(0, 3)
        res = cb_lower_bound(m, win, 2.0, 3,
                             budget={"restarts": 2, "iterations": 20})
        # p = 2 again gives sup|m|, unchanged by amplification
        assert res.value == pytest.approx(
            np.abs(m.values_on(win, win)).max(), rel=1e-10)

    def test_zero_symbol_and_bad_k(self):
        win = Box.interval(0, 3)
        z = DiscreteSymbol.dense(win, win, np.zeros((3, 3), dtype=complex))
        res = cb_lower_bound(z, win, 2.0, 2)
        assert res.value == 0.0 and res.flags["zero_symbol"]
        with pytest.raises(ValueError):
            cb_lower_bound(catalog("triangular"), win, 2.0, 0)


class TestGrowthExperiment:
    def test_warm_start_monotone(self):
        m = catalog("triangular")
        rows = growth_experiment(m, [2.0, 3.0], [2, 4, 8],
                                 budget={"restarts": 2, "iterations": 20},
                                 seed=0)
        assert len(rows) == 6
        for p in (2.0, 3.0):
            ests = [r["estimate"] for r in rows if r["p"] == p]
            assert all(b >= a - 1e-12 for a, b in zip(ests, ests[1:]))

    def test_row_schema_and_reference(self):
        m = catalog("lacunary_toeplitz", seed=0)
        rows = growth_experiment(m, [Fraction(4, 3)], [2, 4],
                                 budget={"restarts": 1, "iterations": 10})
        want_keys = {"symbol", "d", "p", "N", "k_amp", "estimate", "reference",
                     "ratio", "restarts", "iterations", "seed"}
        for r in rows:
            assert set(r) == want_keys
            assert r["p"] == Fraction(4, 3)
            pf = 4.0 / 3.0
            assert r["reference"] == pytest.approx((pf * pf / (pf - 1.0)) ** 3)
            assert r["ratio"] == pytest.approx(r["estimate"] / r["reference"])
            assert r["k_amp"] == 1

    def test_unsorted_sizes_are_sorted(self):
        m = catalog("triangular")
        rows = growth_experiment(m, [2.0], [8, 2, 4],
                                 budget={"restarts": 1, "iterations": 10})
        assert [r["N"] for r in rows] == [2, 4, 8]
