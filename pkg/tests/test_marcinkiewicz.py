"""Block variation tables, cell-average discretization, continuous conditions.

Reference values are computed from closed forms or independent enumerations
and frozen here; report functions must reproduce them exactly or to stated
quadrature accuracy.
"""

import json
import math

import numpy as np
import pytest

from schurkit import (
    Box,
    ConditionReport,
    ContinuousSymbol,
    DiscreteSymbol,
    ParallelogramIndex,
    QuadratureError,
    SymbolError,
    catalog,
    check_1d,
    check_2d,
    check_continuous,
    check_dd,
    discretize_continuous,
)


def _rows_by(report, *keys):
    return {tuple(r[k] for k in keys): r["value"] for r in report.table}


class TestCheck1d:
    def test_triangular_exact_constants(self):
        rep = check_1d(catalog("triangular"), 8, Box.interval(-16, 16))
        assert rep.c1 == 1.0
        assert rep.c2 == 1.0
        # the single jump sits in the lowest block, row direction only
        vals = _rows_by(rep, "level", "direction")
        assert vals[(1, "row")] == 1.0
        assert all(v == 0.0 for key, v in vals.items() if key != (1, "row"))
        assert rep.within_block_sup == 0.0

    def test_lacunary_seed0_frozen_sums(self):
        # per-block jump budget of the seed-0 sign sequence, enumerated from
        # the level table: both dyadic edges of each block contribute
        eps = np.random.default_rng(0).integers(0, 2, size=64) * 2 - 1
        expected = {N: float(abs(eps[N + 1] - eps[N]) + abs(eps[N] - eps[N - 1]))
                    for N in range(1, 9)}
        assert expected == {1: 0.0, 2: 2.0, 3: 2.0, 4: 0.0,
                            5: 0.0, 6: 0.0, 7: 0.0, 8: 2.0}
        rep = check_1d(catalog("lacunary_toeplitz", seed=0), 8, Box.interval(-4, 4))
        vals = _rows_by(rep, "level", "direction")
        for N, want in expected.items():
            assert vals[(N, "row")] == want
            assert vals[(N, "col")] == want
        assert rep.c1 == 1.0
        assert rep.c2 == 2.0
        # level-constant symbols have no interior variation at all
        assert rep.within_block_sup == 0.0

    def test_toeplitz_base_independence(self):
        m = catalog("lacunary_toeplitz", seed=5)
        a = check_1d(m, 6, Box.interval(0, 1))
        b = check_1d(m, 6, Box.interval(-32, 32))
        va, vb = _rows_by(a, "level", "direction"), _rows_by(b, "level", "direction")
        assert va == vb

    def test_within_sums_bounded_by_two_sided(self):
        m = catalog("smooth_homogeneous")
        rep = check_1d(m, 6, Box.interval(-8, 8))
        two = _rows_by(rep, "level", "direction")
        for r in rep.within_table:
            base_dir = r["direction"][:3]
            assert r["value"] <= two[(r["level"], base_dir)] + 1e-12

    def test_level_one_within_rows_are_empty_sums(self):
        rep = check_1d(catalog("triangular"), 3, Box.interval(-2, 2))
        ones = [r for r in rep.within_table if r["level"] == 1]
        assert len(ones) == 4
        assert all(r["value"] == 0.0 for r in ones)

    def test_scaling_equivariance(self):
        m = catalog("lacunary_toeplitz", seed=1)
        rep1 = check_1d(m, 5, Box.interval(-4, 4))
        rep3 = check_1d(3.0 * m, 5, Box.interval(-4, 4))
        v1 = _rows_by(rep1, "level", "direction")
        v3 = _rows_by(rep3, "level", "direction")
        for key, v in v1.items():
            assert v3[key] == pytest.approx(3.0 * v, abs=1e-14)

    def test_dimension_and_level_validation(self):
        with pytest.raises(ValueError):
            check_1d(catalog("constant_one", d=2), 3, Box.cube(-2, 2, 2))
        with pytest.raises(ValueError):
            check_1d(catalog("constant_one"), 0, Box.interval(-2, 2))


def _quadrant_symbol():
    # m(s, t) = 1 when t - s lies in the closed upper-right quadrant
    return DiscreteSymbol.callback(
        lambda s, t: ((t[:, 0] >= s[:, 0]) & (t[:, 1] >= s[:, 1])).astype(complex),
        d=2, name="quadrant")


class TestCheck2d:
    def test_constant_all_zero(self):
        rep = check_2d(catalog("constant_one", d=2), 4, Box.cube(-2, 2, 2))
        assert rep.c1 == 1.0
        assert rep.c2 == 0.0
        assert rep.c3 == 0.0
        assert not rep.flags["nonuniform_growth"]

    def test_quadrant_frozen_constants(self):
        # the quadrant indicator jumps once per positive edge and its mixed
        # double difference is a unit mass at (-1, -1), so c2 = 2 and the
        # only nonzero mixed row is level 1, left order
        rep = check_2d(_quadrant_symbol(), 4, Box.cube(-2, 2, 2))
        assert rep.c2 == 2.0
        assert rep.c3 == 1.0
        vals = _rows_by(rep, "level", "direction")
        for k in range(1, 5):
            assert vals[(k, "edge-left")] == 2.0
            assert vals[(k, "edge-right")] == 2.0
            assert vals[(k, "mixed-left")] == (1.0 if k == 1 else 0.0)
            assert vals[(k, "mixed-right")] == 0.0

    def test_growth_flag_on_unbounded_symbol(self):
        m = DiscreteSymbol.callback(
            lambda s, t: ((t[:, 0] - s[:, 0]) ** 2 + (t[:, 1] - s[:, 1]) ** 2)
            .astype(complex), d=2, name="parabola")
        rep = check_2d(m, 4, Box.cube(0, 1, 2))
        assert rep.flags["nonuniform_growth"]

    def test_dimension_validation(self):
        with pytest.raises(ValueError):
            check_2d(catalog("triangular"), 3, Box.interval(-2, 2))


class TestCheckDd:
    def test_d1_matches_check_1d(self):
        # anchored differences in one dimension coincide with the two-sided
        # block sums: right order = row direction, left order = column
        for name in ("triangular", "smooth_homogeneous"):
            m = catalog(name)
            base = Box.interval(-4, 4)
            r1 = _rows_by(check_1d(m, 4, base), "level", "direction")
            rd = _rows_by(check_dd(m, 1, 4, base), "level", "direction")
            for N in range(1, 5):
                assert rd[(N, "(1,)-right")] == pytest.approx(r1[(N, "row")], abs=1e-12)
                assert rd[(N, "(1,)-left")] == pytest.approx(r1[(N, "col")], abs=1e-12)

    def test_d2_constant_zero(self):
        rep = check_dd(catalog("constant_one", d=2), 2, 3, Box.cube(-1, 1, 2))
        assert rep.c2 == 0.0
        # three nonzero masks, two orders, three levels
        assert len(rep.table) == 3 * 2 * 3

    def test_d3_runs_and_caps(self):
        m = catalog("constant_one", d=3)
        rep = check_dd(m, 3, 2, Box.cube(0, 1, 3))
        assert rep.c2 == 0.0
        assert len(rep.table) == 7 * 2 * 2
        with pytest.raises(ValueError):
            check_dd(catalog("constant_one", d=4), 4, 2, Box.cube(0, 1, 4))

    def test_symbol_dimension_mismatch(self):
        with pytest.raises(ValueError):
            check_dd(catalog("triangular"), 2, 2, Box.cube(0, 1, 2))


class TestParallelogramCells:
    def test_vertices_and_membership(self):
        cell = ParallelogramIndex(2, 3, -1)
        (x0, y0) = cell.map_unit(0.0, 0.0)
        assert (x0, y0) == (0.75, -0.25)
        assert cell.contains(*cell.map_unit(0.3, 0.7))
        assert not cell.contains(*cell.map_unit(1.01, 0.5))

    def test_cells_tile_without_overlap(self):
        # a point belongs to exactly one cell at each scale
        rng = np.random.default_rng(0)
        for _ in range(50):
            k = int(rng.integers(0, 4))
            x, y = rng.uniform(-2, 2, size=2)
            h = 2.0**-k
            a = math.floor(x / h)
            b = math.floor(y / h - (x / h - a))
            assert ParallelogramIndex(k, a, b).contains(x, y)

    def test_negative_scale_rejected(self):
        with pytest.raises(ValueError):
            ParallelogramIndex(-1, 0, 0)


class TestDiscretize:
    def test_constant_symbol_exact(self):
        win = Box.interval(-5, 6)
        m = discretize_continuous(catalog("continuous_constant"), 3, win)
        assert m.kind == "dense"
        assert np.abs(m.values_on(win, win) - 1.0).max() < 1e-14

    def test_linear_difference_closed_form(self):
        # averages of x - y over the sheared cells: (s - t)/2^k - 2^-(k+1)
        lin = ContinuousSymbol(
            lambda x, y: (x - y).astype(np.complex128), d=1, name="linear")
        win = Box.interval(0, 8)
        m = discretize_continuous(lin, 3, win)
        pts = win.points_array()[:, 0]
        want = (pts[:, None] - pts[None, :]) / 8.0 - 1.0 / 16.0
        assert np.abs(m.values_on(win, win) - want).max() < 1e-13

    def test_first_coordinate_closed_form(self):
        xonly = ContinuousSymbol(
            lambda x, y: np.asarray(x, dtype=np.complex128) + 0.0 * np.asarray(y),
            d=1, name="first")
        win = Box.interval(-4, 5)
        m = discretize_continuous(xonly, 4, win)
        pts = win.points_array()[:, 0]
        want = np.broadcast_to(((pts + 0.5) / 16.0)[:, None], (9, 9))
        assert np.abs(m.values_on(win, win) - want).max() < 1e-13

    def test_shear_adapts_to_the_diagonal(self):
        # |x - y| is linear on every sheared cell, so averages are exact
        kink = ContinuousSymbol(
            lambda x, y: np.abs(x - y).astype(np.complex128), d=1, name="vee")
        k, win = 2, Box.interval(-3, 4)
        m = discretize_continuous(kink, k, win, tol=1e-12)
        pts = win.points_array()[:, 0]
        D = pts[:, None] - pts[None, :]
        h = 2.0**-k
        want = np.where(D >= 1, (D - 0.5) * h, (0.5 - D) * h)
        assert np.abs(m.values_on(win, win) - want).max() < 1e-13

    def test_interior_cusp_detected(self):
        h = 0.25
        cusp = ContinuousSymbol(
            lambda x, y: np.sqrt(np.abs(x - y + 0.5 * h)).astype(np.complex128),
            d=1, name="cusp")
        with pytest.raises(QuadratureError, match="refinement"):
            discretize_continuous(cusp, 2, Box.interval(0, 3), tol=1e-10)
        # the refinement check can be waived explicitly
        m = discretize_continuous(cusp, 2, Box.interval(0, 3), tol=1e-10, check=False)
        assert m.kind == "dense"

    def test_name_records_scale(self):
        m = discretize_continuous(catalog("continuous_constant"), 5, Box.interval(0, 2))
        assert m.name.endswith("_avg_k5")


class TestCheckContinuous:
    def test_arctan_levels_match_closed_form(self):
        # the level-j shell integral of 1/(1 + t^2) over both signs
        rep = check_continuous(catalog("continuous_arctan"), (-2, 3))
        per = {}
        for r in rep.table:
            per[r["level"]] = max(per.get(r["level"], 0.0), r["value"])
        for j, got in per.items():
            want = 2.0 * (math.atan(2.0 ** (j + 1)) - math.atan(2.0**j))
            assert got == pytest.approx(want, abs=1e-8)

    def test_arctan_supremum(self):
        rep = check_continuous(catalog("continuous_arctan"), (-3, 4))
        assert rep.a_const == pytest.approx(2.0 * math.atan(1.0 / 3.0), abs=1e-8)
        assert rep.c1 <= math.pi / 2

    def test_constant_zero(self):
        rep = check_continuous(catalog("continuous_constant"), (-1, 2))
        assert rep.a_const == 0.0

    def test_ratio_symbol_regression(self):
        # frozen build-time value for the smooth quotient symbol
        rep = check_continuous(catalog("continuous_ratio"), (-4, 5))
        assert rep.a_const == pytest.approx(0.5167948918100211, abs=1e-9)

    def test_d2_constant_and_validation(self):
        flat = ContinuousSymbol(
            lambda x, y: np.ones(np.asarray(x, dtype=float).shape[:-1],
                                 dtype=np.complex128), d=2, name="flat2")
        rep = check_continuous(flat, (0, 1), tol=1e-6)
        assert rep.a_const == pytest.approx(0.0, abs=1e-6)
        bad = ContinuousSymbol(lambda x, y: x, d=3)
        with pytest.raises(SymbolError):
            check_continuous(bad, (0, 1))


class TestConditionReport:
    def test_json_roundtrip(self):
        rep = check_1d(catalog("triangular"), 3, Box.interval(-2, 2))
        data = json.loads(rep.to_json())
        assert data["c2"] == 1.0
        assert data["kind"] == "1d"
        assert len(data["table"]) == len(rep.table)

    def test_csv_rows_shape(self):
        rep = check_1d(catalog("triangular"), 3, Box.interval(-2, 2))
        rows = rep.csv_rows()
        assert rows[0] == ["section", "level", "direction", "base",
                           "value", "running_sup"]
        assert len(rows) == 1 + len(rep.table) + len(rep.within_table)
        # running supremum is nondecreasing within each section
        running = [float(r[5]) for r in rows[1:] if r[0] == "block"]
        assert running == sorted(running)

    def test_invariants_catch_tampering(self):
        rep = check_1d(catalog("triangular"), 3, Box.interval(-2, 2))
        rep.table[0]["value"] += 1.0
        with pytest.raises(AssertionError):
            rep.check_invariants()

    def test_invariants_catch_negative(self):
        rep = ConditionReport(kind="1d", symbol="x", d=1,
                              table=[{"level": 1, "direction": "row",
                                      "base": 0, "value": -0.5}])
        with pytest.raises(AssertionError):
            rep.check_invariants()
