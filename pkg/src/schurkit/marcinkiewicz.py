"""Variation-condition checkers for multiplier symbols.

Each checker sums absolute symbol differences over dyadic frequency blocks
and reports the per-block table together with its suprema. The continuous
checker integrates derivative magnitudes over dyadic shells, and
``discretize_continuous`` turns a continuous symbol into a dense discrete one
by averaging over sheared half-open cells.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .lattice import Box, dyadic_block_points
from .symbols import ContinuousSymbol, DiscreteSymbol, SymbolError

__all__ = [
    "QuadratureError",
    "ParallelogramIndex",
    "ConditionReport",
    "check_1d",
    "check_2d",
    "check_dd",
    "discretize_continuous",
    "check_continuous",
]


class QuadratureError(RuntimeError):
    """Raised when a quadrature refinement check fails to converge."""


@dataclass(frozen=True)
class ParallelogramIndex:
    """Sheared half-open cell at scale k: the image of the unit square under
    (u, v) -> ((a + u)/2^k, (b + v + u)/2^k)."""

    k: int
    a: int
    b: int

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("cell scale must be nonnegative")

    @property
    def vertices(self):
        h = 2.0 ** (-self.k)
        a, b = self.a, self.b
        return (
            (a * h, b * h),
            ((a + 1) * h, (b + 1) * h),
            (a * h, (b + 1) * h),
            ((a + 1) * h, (b + 2) * h),
        )

    def map_unit(self, u, v):
        h = 2.0 ** (-self.k)
        return ((self.a + u) * h, (self.b + v + u) * h)

    def contains(self, x, y) -> bool:
        u = x * 2.0**self.k - self.a
        v = y * 2.0**self.k - self.b - u
        return 0.0 <= u < 1.0 and 0.0 <= v < 1.0


@dataclass
class ConditionReport:
    """Table of block variation sums with their suprema.

    ``table`` rows carry level, direction, the base point attaining the
    batch maximum, and the value. ``within_table`` (one-dimensional checks
    only) holds the one-sided sums whose difference endpoints both lie in a
    single signed block; those are the quantities controlled by a continuous
    derivative bound after cell-average discretization.
    """

    kind: str
    symbol: str
    d: int
    table: list = field(default_factory=list)
    c1: float | None = None
    c2: float | None = None
    c3: float | None = None
    a_const: float | None = None
    within_table: list = field(default_factory=list)
    within_block_sup: float | None = None
    flags: dict = field(default_factory=dict)
    truncation: dict = field(default_factory=dict)

    def to_json(self, indent: int = 2) -> str:
        def clean(v):
            if isinstance(v, (np.integer,)):
                return int(v)
            if isinstance(v, (np.floating,)):
                return float(v)
            if isinstance(v, dict):
                return {k: clean(x) for k, x in v.items()}
            if isinstance(v, (list, tuple)):
                return [clean(x) for x in v]
            return v

        payload = {
            "kind": self.kind,
            "symbol": self.symbol,
            "d": self.d,
            "c1": self.c1,
            "c2": self.c2,
            "c3": self.c3,
            "a_const": self.a_const,
            "within_block_sup": self.within_block_sup,
            "flags": self.flags,
            "truncation": self.truncation,
            "table": self.table,
            "within_table": self.within_table,
        }
        return json.dumps(clean(payload), indent=indent, sort_keys=True)

    def csv_rows(self):
        """Rows [section, level, direction, base, value, running_sup]."""
        out = [["section", "level", "direction", "base", "value", "running_sup"]]
        for section, rows in (("block", self.table), ("within", self.within_table)):
            running = 0.0
            for r in rows:
                running = max(running, r["value"])
                out.append([
                    section,
                    r["level"],
                    str(r["direction"]),
                    str(r.get("base", "")),
                    repr(float(r["value"])),
                    repr(running),
                ])
        return out

    def check_invariants(self):
        for r in self.table + self.within_table:
            if r["value"] < 0:
                raise AssertionError("negative variation sum recorded")
        mixed = [r["value"] for r in self.table if str(r["direction"]).startswith("mixed")]
        plain = [r["value"] for r in self.table if not str(r["direction"]).startswith("mixed")]
        if self.c2 is not None and plain and max(plain) != self.c2:
            raise AssertionError("supremum C2 does not match its table")
        if self.c3 is not None and mixed and max(mixed) != self.c3:
            raise AssertionError("supremum C3 does not match its table")
        if self.a_const is not None and self.table:
            if max(r["value"] for r in self.table) != self.a_const:
                raise AssertionError("supremum A does not match its table")
        if self.within_block_sup is not None and self.within_table:
            if max(r["value"] for r in self.within_table) != self.within_block_sup:
                raise AssertionError("within-block supremum does not match its table")
        return True


def _bases_array(base_range: Box, d: int) -> np.ndarray:
    if not isinstance(base_range, Box):
        raise TypeError("base_range must be a Box")
    if base_range.d != d:
        raise ValueError(f"base_range must be {d}-dimensional")
    pts = base_range.points_array()
    if len(pts) == 0:
        raise ValueError("base_range is empty")
    return pts


def check_1d(m: DiscreteSymbol, N_max: int, base_range: Box) -> ConditionReport:
    """Row/column variation sums of a one-dimensional symbol per dyadic block.

    For each block level N and base j, sums |m(k+j+1,j)-m(k+j,j)| over
    2^(N-1) <= |k| < 2^N (direction "row") and the transposed-argument
    analogue (direction "col"). Also records, per signed half block, the
    one-sided sums whose difference endpoints both stay inside that half.
    """
    if m.d != 1:
        raise ValueError("check_1d needs a one-dimensional symbol")
    if N_max < 1:
        raise ValueError("N_max must be >= 1")
    bases = _bases_array(base_range, 1)[:, 0]
    top = 1 << N_max
    ks = np.arange(-top, top + 1, dtype=np.int64)

    KJ = (ks[:, None] + bases[None, :]).reshape(-1, 1)
    JJ = np.broadcast_to(bases[None, :], (len(ks), len(bases))).reshape(-1, 1)
    V = m.eval_pairs(KJ, JJ).reshape(len(ks), len(bases))
    W = m.eval_pairs(JJ, KJ).reshape(len(ks), len(bases))
    c1 = float(max(np.abs(V).max(), np.abs(W).max()))
    Dv = np.abs(np.diff(V, axis=0))  # index i holds k = -top + i
    Dw = np.abs(np.diff(W, axis=0))

    def kslice(klo, khi):
        # inclusive k range -> row slice of Dv/Dw
        return slice(klo + top, khi + top + 1)

    table = []
    within = []
    for N in range(1, N_max + 1):
        a, b = 1 << (N - 1), 1 << N
        two_sided = [kslice(a, b - 1), kslice(-b + 1, -a)]
        for direction, D in (("row", Dv), ("col", Dw)):
            sums = sum(D[s].sum(axis=0) for s in two_sided)
            i = int(np.argmax(sums))
            table.append({
                "level": N, "direction": direction,
                "base": int(bases[i]), "value": float(sums[i]),
            })
        within_slices = [("+", kslice(a, b - 2)), ("-", kslice(-b + 1, -a - 1))]
        for direction, D in (("row", Dv), ("col", Dw)):
            for sign, s in within_slices:
                if s.start >= s.stop:
                    within.append({
                        "level": N, "direction": direction + sign,
                        "base": int(bases[0]), "value": 0.0,
                    })
                    continue
                sums = D[s].sum(axis=0)
                i = int(np.argmax(sums))
                within.append({
                    "level": N, "direction": direction + sign,
                    "base": int(bases[i]), "value": float(sums[i]),
                })

    report = ConditionReport(
        kind="1d",
        symbol=getattr(m, "name", None) or "symbol",
        d=1,
        table=table,
        c1=c1,
        c2=float(max(r["value"] for r in table)),
        within_table=within,
        within_block_sup=float(max(r["value"] for r in within)),
        truncation={
            "N_max": N_max,
            "bases": [int(bases.min()), int(bases.max())],
            "k_range": [int(-top), int(top)],
        },
    )
    report.check_invariants()
    return report


def _growth_flag(per_level: list[float]) -> bool:
    # sustained >= 1.5x growth across the last two level steps
    tail = [v for v in per_level if v > 0]
    if len(tail) < 3:
        return False
    r1 = tail[-2] / tail[-3]
    r2 = tail[-1] / tail[-2]
    return r1 >= 1.5 and r2 >= 1.5


def check_2d(m: DiscreteSymbol, k_max: int, base_range: Box) -> ConditionReport:
    """Edge and mixed variation sums of a two-dimensional symbol per block.

    Per level k and base s: single differences along the four block edges
    (sum recorded as direction "edge"), and the mixed double difference
    summed over the whole block shell (direction "mixed"); each in both the
    (s, s+t) and (s+t, s) argument orders.
    """
    if m.d != 2:
        raise ValueError("check_2d needs a two-dimensional symbol")
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    bases = _bases_array(base_range, 2)
    nb = len(bases)
    c1 = 0.0
    table = []
    edge_by_level = {"left": [], "right": []}

    def eval_pairs(orient, S, T):
        nonlocal c1
        vals = m.eval_pairs(S, T) if orient == "left" else m.eval_pairs(T, S)
        c1 = max(c1, float(np.abs(vals).max(initial=0.0)))
        return vals

    for k in range(1, k_max + 1):
        half, full = 1 << (k - 1), 1 << k
        tfree = np.arange(-full + 1, full + 1, dtype=np.int64)  # one past for diffs

        edge_sums = {"left": np.zeros(nb), "right": np.zeros(nb)}
        for axis in (0, 1):
            for side in (half, -half):
                T = np.zeros((len(tfree), 2), dtype=np.int64)
                T[:, axis] = tfree
                T[:, 1 - axis] = side
                # s + t for every base, extended one step along the free axis
                SS = np.repeat(bases, len(tfree), axis=0)
                TT = SS + np.tile(T, (nb, 1))
                for orient in ("left", "right"):
                    vals = eval_pairs(orient, SS, TT).reshape(nb, len(tfree))
                    edge_sums[orient] += np.abs(np.diff(vals, axis=1)).sum(axis=1)
        for orient in ("left", "right"):
            i = int(np.argmax(edge_sums[orient]))
            table.append({
                "level": k, "direction": f"edge-{orient}",
                "base": tuple(int(v) for v in bases[i]),
                "value": float(edge_sums[orient][i]),
            })
            edge_by_level[orient].append(float(edge_sums[orient].max()))

        shell = dyadic_block_points(k, 2)
        SS = np.repeat(bases, len(shell), axis=0)
        base_T = np.tile(shell, (nb, 1))
        for orient in ("left", "right"):
            acc = np.zeros(nb * len(shell), dtype=np.complex128)
            for b1, b2 in product((0, 1), repeat=2):
                sign = (-1) ** (2 - b1 - b2)
                off = np.array([b1, b2], dtype=np.int64)
                acc = acc + sign * eval_pairs(orient, SS, SS + base_T + off)
            mixed = np.abs(acc).reshape(nb, len(shell)).sum(axis=1)
            i = int(np.argmax(mixed))
            table.append({
                "level": k, "direction": f"mixed-{orient}",
                "base": tuple(int(v) for v in bases[i]),
                "value": float(mixed[i]),
            })

    edge_rows = [r["value"] for r in table if r["direction"].startswith("edge")]
    mixed_rows = [r["value"] for r in table if r["direction"].startswith("mixed")]
    report = ConditionReport(
        kind="2d",
        symbol=getattr(m, "name", None) or "symbol",
        d=2,
        table=table,
        c1=c1,
        c2=float(max(edge_rows)),
        c3=float(max(mixed_rows)),
        flags={
            "nonuniform_growth": _growth_flag(edge_by_level["left"])
            or _growth_flag(edge_by_level["right"]),
        },
        truncation={"k_max": k_max, "bases": len(bases)},
    )
    for r in report.table:
        if r["value"] < 0:
            raise AssertionError("negative variation sum recorded")
    return report


def check_dd(m: DiscreteSymbol, d: int, k_max: int, base_range: Box,
             cap: int = 3) -> ConditionReport:
    """Anchored mixed-difference sums in dimension d, all nonzero axis masks.

    For each level k and mask alpha, the coordinates outside alpha are pinned
    to the positive block corner 2^(k-1) and the alpha coordinates run over
    the block's extent; the mask of all axes runs over the whole shell. Sums
    |difference of m along alpha| in both argument orders; C is the maximum.
    """
    if not 1 <= d <= cap:
        raise ValueError(f"dimension {d} outside the supported range 1..{cap}")
    if m.d != d:
        raise ValueError("symbol dimension mismatch")
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    bases = _bases_array(base_range, d)
    nb = len(bases)
    c1 = 0.0
    table = []
    masks = [alpha for alpha in product((0, 1), repeat=d) if any(alpha)]

    for k in range(1, k_max + 1):
        half, full = 1 << (k - 1), 1 << k
        for alpha in masks:
            free_axes = [i for i, bit in enumerate(alpha) if bit]
            if all(alpha):
                T = dyadic_block_points(k, d)
            else:
                rng = np.arange(-full + 1, full, dtype=np.int64)
                grids = np.meshgrid(*([rng] * len(free_axes)), indexing="ij")
                T = np.full((grids[0].size, d), half, dtype=np.int64)
                for ax, g in zip(free_axes, grids):
                    T[:, ax] = g.ravel()
            SS = np.repeat(bases, len(T), axis=0)
            TT = np.tile(T, (nb, 1))
            subsets = list(product(*[(0, 1) if bit else (0,) for bit in alpha]))
            for orient in ("left", "right"):
                acc = np.zeros(len(SS), dtype=np.complex128)
                for beta in subsets:
                    off = np.asarray(beta, dtype=np.int64)
                    sign = (-1) ** (sum(alpha) - sum(beta))
                    a_pts, b_pts = SS, SS + TT + off
                    if orient == "right":
                        a_pts, b_pts = b_pts, a_pts
                    vals = m.eval_pairs(a_pts, b_pts)
                    c1 = max(c1, float(np.abs(vals).max(initial=0.0)))
                    acc = acc + sign * vals
                sums = np.abs(acc).reshape(nb, len(T)).sum(axis=1)
                i = int(np.argmax(sums))
                table.append({
                    "level": k, "direction": f"{alpha}-{orient}",
                    "alpha": alpha,
                    "base": tuple(int(v) for v in bases[i]),
                    "value": float(sums[i]),
                })

    report = ConditionReport(
        kind="dd",
        symbol=getattr(m, "name", None) or "symbol",
        d=d,
        table=table,
        c1=c1,
        c2=float(max(r["value"] for r in table)),
        truncation={"k_max": k_max, "bases": len(bases), "cap": cap},
    )
    report.check_invariants()
    return report


# ---------------------------------------------------------------------------
# continuous symbols: cell-average discretization and derivative conditions


def _gl_nodes(order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    return (x + 1.0) / 2.0, w / 2.0


def _cell_averages(M: ContinuousSymbol, s_vals, t_vals, k: int, order: int):
    """Averages of M over the sheared cells indexed by (s, t), vectorized."""
    u, wu = _gl_nodes(order)
    h = 2.0 ** (-k)
    W2 = wu[:, None] * wu[None, :]
    n_s, n_t, q = len(s_vals), len(t_vals), order
    out = np.empty((n_s, n_t), dtype=np.complex128)
    rows_per = max(1, 2_000_000 // max(1, n_t * q * q))
    Y = (t_vals[None, :, None, None] + u[None, None, None, :] + u[None, None, :, None]) * h
    for lo in range(0, n_s, rows_per):
        hi = min(n_s, lo + rows_per)
        X = (s_vals[lo:hi, None, None, None] + u[None, None, :, None]) * h
        vals = M(np.broadcast_to(X, (hi - lo, n_t, q, q)),
                 np.broadcast_to(Y, (hi - lo, n_t, q, q)))
        out[lo:hi] = np.einsum("cnuv,uv->cn", vals, W2)
    return out


def _paired_cell_averages(M: ContinuousSymbol, s_arr, t_arr, k: int, order: int):
    """Averages over the cells (s_i, t_i) listed pairwise."""
    u, wu = _gl_nodes(order)
    h = 2.0 ** (-k)
    W2 = wu[:, None] * wu[None, :]
    q = order
    m = len(s_arr)
    X = np.broadcast_to((s_arr[:, None, None] + u[None, :, None]) * h, (m, q, q))
    Y = (t_arr[:, None, None] + u[None, :, None] + u[None, None, :]) * h
    return np.einsum("muv,uv->m", M(X, Y), W2)


def discretize_continuous(M: ContinuousSymbol, k: int, window: Box,
                          order: int = 8, tol: float = 1e-8,
                          check: bool = True) -> DiscreteSymbol:
    """Dense symbol of cell averages of M at scale k over a window.

    Entry (s, t) is the mean of M over the sheared half-open cell traced by
    ((s+u)/2^k, (t+v+u)/2^k) for (u, v) in the unit square, computed with
    tensor Gauss-Legendre quadrature. When ``check`` is set, a strided sample
    of cells is recomputed at a higher order; disagreement above ``tol``
    raises QuadratureError.
    """
    if M.d != 1:
        raise SymbolError("cell-average discretization is defined for d = 1 symbols")
    if k < 0:
        raise ValueError("scale k must be nonnegative")
    if window.d != 1:
        raise ValueError("window must be one-dimensional")
    pts = window.points_array()[:, 0].astype(np.float64)
    entries = _cell_averages(M, pts, pts, k, order)

    if check:
        n = len(pts)
        total = n * n
        if total <= 4096:
            idx = np.arange(total)
        else:
            stride = max(1, total // 1024)
            idx = np.arange(0, total, stride)
        si, ti = idx // n, idx % n
        coarse = entries[si, ti]
        fine = _paired_cell_averages(M, pts[si], pts[ti], k, order + 4)
        gap = np.abs(fine - coarse)
        worst = int(np.argmax(gap))
        if gap[worst] > tol:
            s_bad, t_bad = int(pts[si[worst]]), int(pts[ti[worst]])
            raise QuadratureError(
                f"cell average at (s={s_bad}, t={t_bad}), scale {k}, moved "
                f"{gap[worst]:.3e} under order refinement (tol {tol:g})"
            )

    name = f"{M.name or 'continuous'}_avg_k{k}"
    return DiscreteSymbol.dense(window, window, entries, name=name)


def _adaptive_simpson(f, a: float, b: float, tol: float,
                      initial_panels: int = 8, max_depth: int = 28):
    """Adaptive Simpson integration of a vector-valued integrand.

    ``f`` maps a scalar abscissa to an ndarray; panels refine until the
    worst component's Richardson error estimate passes. Raises
    QuadratureError when the depth cap is hit with the estimate still above
    tolerance.
    """
    if b <= a:
        raise ValueError("empty integration interval")
    initial_panels = max(1, int(initial_panels))

    def rec(lo, hi, flo, fmid, fhi, S, local_tol, depth):
        mid = 0.5 * (lo + hi)
        lm, rm = 0.5 * (lo + mid), 0.5 * (mid + hi)
        flm, frm = f(lm), f(rm)
        Sl = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid)
        Sr = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi)
        err = float(np.max(np.abs(Sl + Sr - S)))
        if err <= 15.0 * local_tol:
            return Sl + Sr + (Sl + Sr - S) / 15.0
        if depth <= 0:
            raise QuadratureError(
                f"adaptive quadrature stalled on [{lo:g}, {hi:g}] with error {err:.3e}"
            )
        return rec(lo, mid, flo, flm, fmid, Sl, local_tol / 2.0, depth - 1) + rec(
            mid, hi, fmid, frm, fhi, Sr, local_tol / 2.0, depth - 1
        )

    edges = np.linspace(a, b, initial_panels + 1)
    total = None
    for lo, hi in zip(edges[:-1], edges[1:]):
        mid = 0.5 * (lo + hi)
        flo, fmid, fhi = f(lo), f(mid), f(hi)
        S = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi)
        part = rec(lo, hi, flo, fmid, fhi, S, tol / initial_panels, max_depth)
        total = part if total is None else total + part
    return total


def _normalize_levels(j_range) -> list[int]:
    if isinstance(j_range, tuple) and len(j_range) == 2:
        lo, hi = int(j_range[0]), int(j_range[1])
        if hi < lo:
            raise ValueError("empty level range")
        return list(range(lo, hi + 1))
    levels = [int(j) for j in j_range]
    if not levels:
        raise ValueError("empty level range")
    return levels


def check_continuous(M: ContinuousSymbol, j_range, base_samples: int = 129,
                     quad_order: int = 16, *, y_grid=None,
                     y_span=(-4.0, 4.0), tol: float = 1e-9) -> ConditionReport:
    """Supremum of dyadic-shell integrals of |derivative of M|.

    d = 1: for each level j and base y, integrates |d/dx M(y+t, y)| (and the
    second-argument mirror) over 2^j <= |t| <= 2^(j+1). d = 2: per nonzero
    axis mask, integrates the mixed derivative magnitude over the mask's
    slice of the shell 2^j < |t|_inf <= 2^(j+1), the other coordinate pinned
    to the shell's outer edge; both argument orders. The supremum over bases
    is a max over the reported sample grid, not a proven supremum.
    """
    levels = _normalize_levels(j_range)
    if M.d == 1:
        ys = (np.linspace(y_span[0], y_span[1], base_samples)
              if y_grid is None else np.asarray(y_grid, dtype=float))
        table = []
        c1 = 0.0
        for j in levels:
            lo, hi = 2.0**j, 2.0 ** (j + 1)
            for slot, label in ((1, "d1"), (2, "d2")):
                if slot == 1:
                    f = lambda t: np.abs(M.partial(1, ys + t, ys))
                else:
                    f = lambda t: np.abs(M.partial(2, ys, ys + t))
                vals = (_adaptive_simpson(f, lo, hi, tol, quad_order)
                        + _adaptive_simpson(f, -hi, -lo, tol, quad_order))
                i = int(np.argmax(vals))
                table.append({
                    "level": j, "direction": label,
                    "base": float(ys[i]), "value": float(vals[i]),
                })
            tsamp = np.concatenate([np.linspace(lo, hi, 9), np.linspace(-hi, -lo, 9)])
            samp = np.abs(M(ys[:, None] + tsamp[None, :], ys[:, None]))
            c1 = max(c1, float(samp.max()))
        report = ConditionReport(
            kind="continuous",
            symbol=M.name or "continuous",
            d=1,
            table=table,
            c1=c1,
            a_const=float(max(r["value"] for r in table)),
            truncation={
                "levels": [levels[0], levels[-1]],
                "y_grid": [float(ys.min()), float(ys.max()), int(len(ys))],
                "tol": tol,
            },
        )
        return report

    if M.d == 2:
        if y_grid is None:
            axis = np.linspace(-2.0, 2.0, 5)
            ys = np.stack(np.meshgrid(axis, axis, indexing="ij"), axis=-1).reshape(-1, 2)
        else:
            ys = np.asarray(y_grid, dtype=float).reshape(-1, 2)
        table = []
        for j in levels:
            a_edge, b_edge = 2.0**j, 2.0 ** (j + 1)
            for alpha in ((1, 0), (0, 1), (1, 1)):
                for orient in ("left", "right"):
                    slot = 2 if orient == "left" else 1
                    D = M.partial_alpha(slot, alpha)

                    def at(t):
                        tt = np.broadcast_to(np.asarray(t, dtype=float), (len(ys), 2))
                        if orient == "left":
                            return np.abs(D(ys, ys + tt))
                        return np.abs(D(ys + tt, ys))

                    if alpha == (1, 1):
                        def inner(t2):
                            return _adaptive_simpson(
                                lambda t1: at((t1, t2)), -b_edge, b_edge,
                                tol, quad_order,
                            )

                        def inner_side(t1):
                            return _adaptive_simpson(
                                lambda t2: at((t1, t2)), -a_edge, a_edge,
                                tol, quad_order,
                            )

                        vals = (
                            _adaptive_simpson(inner, a_edge, b_edge, tol, quad_order)
                            + _adaptive_simpson(inner, -b_edge, -a_edge, tol, quad_order)
                            + _adaptive_simpson(inner_side, a_edge, b_edge, tol, quad_order)
                            + _adaptive_simpson(inner_side, -b_edge, -a_edge, tol, quad_order)
                        )
                    else:
                        free = 0 if alpha == (1, 0) else 1

                        def line(tf):
                            t = [0.0, 0.0]
                            t[free] = tf
                            t[1 - free] = b_edge
                            return at(tuple(t))

                        vals = _adaptive_simpson(line, -b_edge, b_edge, tol, quad_order)
                    i = int(np.argmax(vals))
                    table.append({
                        "level": j, "direction": f"{alpha}-{orient}",
                        "alpha": alpha,
                        "base": tuple(float(v) for v in ys[i]),
                        "value": float(vals[i]),
                    })
        return ConditionReport(
            kind="continuous",
            symbol=M.name or "continuous",
            d=2,
            table=table,
            a_const=float(max(r["value"] for r in table)),
            truncation={"levels": [levels[0], levels[-1]], "bases": len(ys), "tol": tol},
        )

    raise SymbolError("continuous conditions implemented for d <= 2")
