"""Matrix-valued trigonometric polynomials on the d-torus.

This module carries the bridge between entrywise multiplier action on
matrices and Fourier-side multiplier action on polynomials: the unitary
embedding of a matrix as a polynomial, diagonal multiplier operators per
frequency, frequency projections, smooth dyadic cutoffs, and the
block-telescoping decompositions whose parts must reassemble exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .lattice import Box, DyadicIndex, aspoint, dyadic_block_contains
from .schatten import (
    LabeledMatrix,
    QuadratureGrid,
    lp_sp_norm,
    square_function_norm,
)

__all__ = [
    "DiagonalOp",
    "MatTrigPoly",
    "pi_embed",
    "is_pi_image",
    "diag_symbols",
    "apply_fourier_multiplier",
    "freq_project",
    "cutoff_profile",
    "smooth_cutoff",
    "SbpTerms",
    "summation_by_parts_1d",
    "Sbp2dParts",
    "summation_by_parts_2d",
    "LpReport",
    "lp_experiment",
    "max_coeff_diff",
]


class DiagonalOp:
    """Diagonal operator on a window: entry c_s at position (s, s)."""

    __slots__ = ("window", "entries")

    def __init__(self, window: Box, entries):
        entries = np.asarray(entries, dtype=np.complex128)
        if entries.shape != (window.npoints,):
            raise ValueError("diagonal length does not match the window")
        self.window = window
        self.entries = entries

    def lmul(self, A: LabeledMatrix) -> LabeledMatrix:
        """Row scaling: self @ A."""
        if A.rows != self.window:
            raise ValueError("row window mismatch in diagonal product")
        return LabeledMatrix(A.rows, A.cols, self.entries[:, None] * A.data)

    def rmul(self, A: LabeledMatrix) -> LabeledMatrix:
        """Column scaling: A @ self."""
        if A.cols != self.window:
            raise ValueError("column window mismatch in diagonal product")
        return LabeledMatrix(A.rows, A.cols, A.data * self.entries[None, :])

    def __add__(self, other):
        if not isinstance(other, DiagonalOp) or other.window != self.window:
            return NotImplemented
        return DiagonalOp(self.window, self.entries + other.entries)

    def __sub__(self, other):
        if not isinstance(other, DiagonalOp) or other.window != self.window:
            return NotImplemented
        return DiagonalOp(self.window, self.entries - other.entries)

    def __neg__(self):
        return DiagonalOp(self.window, -self.entries)

    def abs(self) -> "DiagonalOp":
        return DiagonalOp(self.window, np.abs(self.entries).astype(np.complex128))

    def to_matrix(self) -> LabeledMatrix:
        return LabeledMatrix(self.window, self.window, np.diag(self.entries))

    def __repr__(self):
        return f"DiagonalOp(window={self.window}, n={self.window.npoints})"


def _askey(n, d):
    return tuple(int(v) for v in aspoint(n, d))


class MatTrigPoly:
    """Finitely supported frequency -> matrix coefficient map.

    All coefficients share one window pair; evaluation at a torus point z is
    the sum of coefficients weighted by z^n.
    """

    def __init__(self, d: int, coeffs: dict, rows: Box | None = None, cols: Box | None = None):
        self.d = int(d)
        clean = {}
        for n, A in coeffs.items():
            key = _askey(n, self.d)
            if not isinstance(A, LabeledMatrix):
                raise TypeError("coefficients must be LabeledMatrix values")
            if rows is None:
                rows, cols = A.rows, A.cols
            elif A.rows != rows or A.cols != cols:
                raise ValueError("all coefficients must share one window pair")
            clean[key] = A
        if rows is None:
            raise ValueError("empty polynomial needs explicit windows")
        self._coeffs = clean
        self.rows = rows
        self.cols = cols

    @classmethod
    def zero(cls, d: int, rows: Box, cols: Box) -> "MatTrigPoly":
        return cls(d, {}, rows=rows, cols=cols)

    @property
    def support(self):
        return sorted(self._coeffs)

    def support_array(self) -> np.ndarray:
        sup = self.support
        if not sup:
            return np.zeros((0, self.d), dtype=np.int64)
        return np.asarray(sup, dtype=np.int64)

    def coeff_stack(self) -> np.ndarray:
        sup = self.support
        shape = (len(sup), self.rows.npoints, self.cols.npoints)
        out = np.zeros(shape, dtype=np.complex128)
        for i, n in enumerate(sup):
            out[i] = self._coeffs[n].data
        return out

    def coeff(self, n) -> LabeledMatrix:
        key = _askey(n, self.d)
        got = self._coeffs.get(key)
        if got is None:
            return LabeledMatrix.zeros(self.rows, self.cols)
        return got

    def max_freq(self) -> int:
        """Largest coordinate magnitude over the support (0 if empty)."""
        sup = self.support_array()
        if sup.size == 0:
            return 0
        return int(np.abs(sup).max())

    def items(self):
        return ((n, self._coeffs[n]) for n in self.support)

    def map_coeffs(self, fn) -> "MatTrigPoly":
        return MatTrigPoly(
            self.d, {n: fn(n, A) for n, A in self.items()}, rows=self.rows, cols=self.cols
        )

    def drop_zeros(self, tol: float = 0.0) -> "MatTrigPoly":
        kept = {n: A for n, A in self.items() if A.max_abs() > tol}
        return MatTrigPoly(self.d, kept, rows=self.rows, cols=self.cols)

    def __add__(self, other):
        if not isinstance(other, MatTrigPoly):
            return NotImplemented
        if other.d != self.d or other.rows != self.rows or other.cols != self.cols:
            raise ValueError("polynomial shape mismatch")
        out = dict(self._coeffs)
        for n, B in other.items():
            out[n] = out[n] + B if n in out else B
        return MatTrigPoly(self.d, out, rows=self.rows, cols=self.cols)

    def __sub__(self, other):
        if not isinstance(other, MatTrigPoly):
            return NotImplemented
        return self + (-1.0) * other

    def __rmul__(self, scalar):
        lam = complex(scalar)
        return self.map_coeffs(lambda n, A: lam * A)

    def __matmul__(self, other):
        """Polynomial product: coefficient convolution with matrix products."""
        if not isinstance(other, MatTrigPoly):
            return NotImplemented
        if other.d != self.d or self.cols != other.rows:
            raise ValueError("inner windows do not match for a product")
        out: dict = {}
        for n1, A in self.items():
            for n2, B in other.items():
                key = tuple(a + b for a, b in zip(n1, n2))
                prod = A @ B
                out[key] = out[key] + prod if key in out else prod
        return MatTrigPoly(self.d, out, rows=self.rows, cols=other.cols)

    def adjoint(self) -> "MatTrigPoly":
        out = {tuple(-v for v in n): A.adjoint() for n, A in self.items()}
        return MatTrigPoly(self.d, out, rows=self.cols, cols=self.rows)

    def eval(self, z) -> LabeledMatrix:
        """Value at z, a length-d sequence of unit-modulus complex numbers."""
        z = np.asarray(z, dtype=np.complex128).reshape(self.d)
        acc = np.zeros((self.rows.npoints, self.cols.npoints), dtype=np.complex128)
        for n, A in self.items():
            acc += A.data * np.prod(z ** np.asarray(n))
        return LabeledMatrix(self.rows, self.cols, acc)

    def max_abs(self) -> float:
        return max((A.max_abs() for _, A in self.items()), default=0.0)

    def __repr__(self):
        return (
            f"MatTrigPoly(d={self.d}, terms={len(self._coeffs)}, "
            f"window={self.rows.npoints}x{self.cols.npoints})"
        )


def max_coeff_diff(f: MatTrigPoly, g: MatTrigPoly) -> float:
    """Largest entrywise coefficient discrepancy between two polynomials."""
    return (f - g).max_abs()


# ---------------------------------------------------------------------------
# the unitary embedding and per-frequency diagonal multipliers


def pi_embed(A: LabeledMatrix) -> MatTrigPoly:
    """Embed a matrix on a square window as the polynomial with the entry at
    (s, t) placed in the coefficient of z^(s-t).

    The embedding is multiplicative and preserves every Schatten norm of the
    matrix under the induced torus-averaged norm.
    """
    if A.rows != A.cols:
        raise ValueError("embedding requires a square window")
    rp = A.rows.points_array()
    d = A.rows.d
    R = len(rp)
    diffs = (rp[:, None, :] - rp[None, :, :]).reshape(R * R, d)
    flat = A.data.reshape(R * R)
    order = np.lexsort(diffs.T[::-1])
    diffs_sorted = diffs[order]
    flat_sorted = flat[order]
    coeffs: dict = {}
    start = 0
    while start < len(flat_sorted):
        stop = start
        while stop < len(flat_sorted) and (diffs_sorted[stop] == diffs_sorted[start]).all():
            stop += 1
        key = tuple(int(v) for v in diffs_sorted[start])
        data = np.zeros((R, R), dtype=np.complex128)
        idx = order[start:stop]
        data[idx // R, idx % R] = flat_sorted[start:stop]
        coeffs[key] = LabeledMatrix(A.rows, A.cols, data)
        start = stop
    return MatTrigPoly(d, coeffs, rows=A.rows, cols=A.cols)


def is_pi_image(f: MatTrigPoly, tol: float = 0.0) -> bool:
    """True when every coefficient at n lives on the diagonal {s - t = n}."""
    if f.rows != f.cols:
        return False
    rp = f.rows.points_array()
    for n, A in f.items():
        onband = ((rp[:, None, :] - rp[None, :, :]) == np.asarray(n)).all(axis=2)
        off = np.abs(A.data[~onband])
        if off.size and off.max() > tol:
            return False
    return True


def diag_symbols(m, n, window: Box):
    """Per-frequency diagonal multipliers on a window.

    Returns the pair (row form, column form): the row form carries m(s, s-n)
    at position s and scales rows; the column form carries m(s+n, s) and
    scales columns.
    """
    n = aspoint(n, window.d)
    pts = window.points_array()
    off = np.asarray(n, dtype=np.int64)[None, :]
    left = m.eval_pairs(pts, pts - off)
    right = m.eval_pairs(pts + off, pts)
    return DiagonalOp(window, left), DiagonalOp(window, right)


def _masked_diag(m, n, window: Box, slot: str):
    """Diagonal entries with out-of-domain positions zeroed; also the mask."""
    n = np.asarray(aspoint(n, window.d), dtype=np.int64)[None, :]
    pts = window.points_array()
    s_pts, t_pts = (pts, pts - n) if slot == "left" else (pts + n, pts)
    ok = m.evaluable_mask(s_pts, t_pts)
    vals = np.zeros(len(pts), dtype=np.complex128)
    if ok.any():
        vals[ok] = m.eval_pairs(s_pts[ok], t_pts[ok])
    return DiagonalOp(window, vals), ok


def _apply_one(m, n, A: LabeledMatrix, side: str) -> LabeledMatrix:
    if side == "left":
        op, ok = _masked_diag(m, n, A.rows, "left")
        if not ok.all():
            live = np.abs(A.data[~ok, :]).max(initial=0.0)
            if live > 0.0:
                bad = A.rows.points_array()[~ok][0]
                raise ValueError(
                    f"symbol not evaluable at row {tuple(bad)} for frequency {tuple(n)}"
                )
        return op.lmul(A)
    op, ok = _masked_diag(m, n, A.cols, "right")
    if not ok.all():
        live = np.abs(A.data[:, ~ok]).max(initial=0.0)
        if live > 0.0:
            bad = A.cols.points_array()[~ok][0]
            raise ValueError(
                f"symbol not evaluable at column {tuple(bad)} for frequency {tuple(n)}"
            )
    return op.rmul(A)


def apply_fourier_multiplier(m, f: MatTrigPoly, side: str = "left",
                             verify_two_sided: bool | None = None) -> MatTrigPoly:
    """Scale the coefficient at each frequency n by the diagonal multiplier.

    ``side`` picks row scaling by m(s, s-n) or column scaling by m(s+n, s).
    On polynomials in the image of the embedding the two agree; with
    ``verify_two_sided`` unset that agreement is checked whenever f is such
    an image (within 1e-12 of the coefficient scale).
    """
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    out = f.map_coeffs(lambda n, A: _apply_one(m, n, A, side))
    check = verify_two_sided
    if check is None:
        check = is_pi_image(f)
    if check:
        other = f.map_coeffs(lambda n, A: _apply_one(m, n, A, "right" if side == "left" else "left"))
        gap = max_coeff_diff(out, other)
        scale = max(out.max_abs(), other.max_abs(), 1.0)
        if gap > 1e-12 * scale:
            raise ArithmeticError(
                f"row and column multiplier forms disagree by {gap:.3e} on an embedded matrix"
            )
    return out


# ---------------------------------------------------------------------------
# frequency projections and the smooth dyadic cutoff


def _region_mask(region, d):
    if isinstance(region, Box):
        if region.d != d:
            raise ValueError("projection box dimension mismatch")
        return lambda n: n in region
    if isinstance(region, DyadicIndex):
        if region.d != d:
            raise ValueError("projection block dimension mismatch")
        return lambda n: dyadic_block_contains(region.j, n, d)
    if isinstance(region, tuple) and len(region) == 2 and all(
        isinstance(v, (int, np.integer)) for v in region
    ):
        if d != 1:
            raise ValueError("open-interval projection is one-dimensional")
        a, b = region
        return lambda n: a < n[0] < b
    if isinstance(region, (list, tuple)):
        tests = [_region_mask(r, d) for r in region]
        return lambda n: any(t(n) for t in tests)
    raise TypeError(f"unsupported projection region {region!r}")


def freq_project(f: MatTrigPoly, region) -> MatTrigPoly:
    """Keep only the coefficients whose frequency lies in the region.

    Regions: a Box, a dyadic block index, an open integer interval (a, b)
    meaning a < n < b (both ends strict), or a list of boxes (their union).
    """
    keep = _region_mask(region, f.d)
    kept = {n: A for n, A in f.items() if keep(n)}
    return MatTrigPoly(f.d, kept, rows=f.rows, cols=f.cols)


def _ramp(x: float) -> float:
    # exp(-1/x) spliced against its mirror: 0 at x<=0, 1 at x>=1, smooth.
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    a = math.exp(-1.0 / x)
    b = math.exp(-1.0 / (1.0 - x))
    return a / (a + b)


def cutoff_profile(x: float, d: int) -> float:
    """Radial bump: 0 off (1/4, 2*sqrt(d)), exactly 1 on [1/2, sqrt(d)]."""
    x = abs(x)
    rd = math.sqrt(d)
    if x <= 0.25 or x >= 2.0 * rd:
        return 0.0
    if 0.5 <= x <= rd:
        return 1.0
    if x < 0.5:
        return _ramp((x - 0.25) / 0.25)
    return _ramp((2.0 * rd - x) / rd)


def _cutoff_factor(n, j: int, d: int) -> float:
    # Integer-arithmetic plateau/support tests keep the on-block factor at
    # exactly 1.0 and the far tail at exactly 0.0; floats only on the ramps.
    S = int(sum(int(v) * int(v) for v in n))
    four_j = 1 << (2 * j)
    if 16 * S <= four_j or S >= 4 * d * four_j:
        return 0.0
    if 4 * S >= four_j and S <= d * four_j:
        return 1.0
    return cutoff_profile(math.sqrt(S) / (1 << j), d)


def smooth_cutoff(f: MatTrigPoly, j: int, d: int | None = None) -> MatTrigPoly:
    """Scale each coefficient by the level-j dyadic bump of its frequency.

    The bump equals 1 on the level-j block for j >= 1, so projecting the
    result onto that block returns the block projection of f unchanged,
    coefficient objects included.
    """
    if j < 0:
        raise ValueError("cutoff level must be nonnegative")
    if d is None:
        d = f.d
    elif d != f.d:
        raise ValueError("cutoff dimension does not match the polynomial")
    out: dict = {}
    for n, A in f.items():
        w = _cutoff_factor(n, j, d)
        if w == 0.0:
            continue
        out[n] = A if w == 1.0 else w * A
    return MatTrigPoly(f.d, out, rows=f.rows, cols=f.cols)


# ---------------------------------------------------------------------------
# block-telescoping decompositions


def _half_blocks_1d(j: int):
    a, b = 1 << (j - 1), 1 << j
    return Box.interval(-b + 1, -a + 1), Box.interval(a, b)


def _diag_for(m, n, window, side):
    row_op, col_op = diag_symbols(m, aspoint(n, window.d), window)
    return row_op if side == "left" else col_op


def _apply_diag(op: DiagonalOp, g: MatTrigPoly, side: str) -> MatTrigPoly:
    if side == "left":
        return g.map_coeffs(lambda n, A: op.lmul(A))
    return g.map_coeffs(lambda n, A: op.rmul(A))


@dataclass
class SbpTerms:
    """One-dimensional block decomposition of the multiplied projection.

    Per half block: one anchored term plus telescoping difference terms whose
    projections open toward the outer block edge. ``total`` must reproduce
    ``direct`` exactly; ``residual`` is their largest coefficient gap.
    """

    j: int
    side: str
    boundary: dict
    differences: dict
    total: MatTrigPoly
    direct: MatTrigPoly
    residual: float


def summation_by_parts_1d(m, f: MatTrigPoly, j: int, side: str = "left") -> SbpTerms:
    """Decompose the level-j block part of the multiplied polynomial.

    Each half block contributes the anchor multiplier (taken at the point of
    the half block nearest zero) applied to the half-block projection, plus
    one difference term per interior cut: the multiplier increment across the
    cut applied to the projection onto the points beyond it.
    """
    if f.d != 1:
        raise ValueError("one-dimensional decomposition needs d = 1")
    if j < 1:
        raise ValueError("block level must be >= 1")
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    a, b = 1 << (j - 1), 1 << j
    neg, pos = _half_blocks_1d(j)
    window = f.rows if side == "left" else f.cols

    boundary = {}
    differences = {"negative": [], "positive": []}

    fpos = freq_project(f, pos)
    anchor_pos = _diag_for(m, a, window, side)
    boundary["positive"] = _apply_diag(anchor_pos, fpos, side)
    for n in range(a, b - 1):
        cut = _diag_for(m, n + 1, window, side) - _diag_for(m, n, window, side)
        piece = freq_project(f, (n, b))
        differences["positive"].append((n, _apply_diag(cut, piece, side)))

    fneg = freq_project(f, neg)
    anchor_neg = _diag_for(m, -a, window, side)
    boundary["negative"] = _apply_diag(anchor_neg, fneg, side)
    for n in range(-b + 2, -a + 1):
        cut = _diag_for(m, n - 1, window, side) - _diag_for(m, n, window, side)
        piece = freq_project(f, (-b, n))
        differences["negative"].append((n, _apply_diag(cut, piece, side)))

    total = boundary["negative"] + boundary["positive"]
    for terms in differences.values():
        for _, t in terms:
            total = total + t

    direct = freq_project(
        apply_fourier_multiplier(m, f, side=side, verify_two_sided=False),
        DyadicIndex(j, 1),
    )
    residual = max_coeff_diff(total, direct)
    return SbpTerms(j, side, boundary, differences, total, direct, residual)


@dataclass
class Sbp2dParts:
    """Four-part decomposition over the first rectangle of a 2-d block."""

    j: int
    anchor: tuple
    p1: MatTrigPoly
    p2: MatTrigPoly
    p3: MatTrigPoly
    p4: MatTrigPoly
    total: MatTrigPoly
    direct: MatTrigPoly
    residual: float


def summation_by_parts_2d(m, f: MatTrigPoly, j: int, check_tol: float = 1e-12) -> Sbp2dParts:
    """Decompose the multiplied projection onto the first rectangle of the
    level-j block in two dimensions.

    The rectangle is the product of the wide strip (first axis) and the
    upper dyadic interval (second axis). The anchor sits at its corner
    nearest the origin; single-difference sums run along each anchored edge
    and the mixed-difference sum runs over the whole rectangle, each paired
    with the projection onto the points beyond the cut. Raises when the
    parts fail to reassemble the direct computation within ``check_tol``
    relative to the coefficient scale.
    """
    if f.d != 2:
        raise ValueError("this decomposition needs d = 2")
    if j < 1:
        raise ValueError("block level must be >= 1")
    a, b = 1 << (j - 1), 1 << j
    strip = Box.interval(-a + 1, b)  # wide first-axis factor
    upper = Box.interval(a, b)  # second-axis factor
    rect = strip.product(upper)
    window = f.rows
    anchor = (-a + 1, a)

    def dop(n1, n2):
        return _diag_for(m, (n1, n2), window, "left")

    frect = freq_project(f, rect)
    p1 = _apply_diag(dop(*anchor), frect, "left")

    p2 = MatTrigPoly.zero(2, f.rows, f.cols)
    for n1 in range(-a + 1, b - 1):
        cut = dop(n1 + 1, a) - dop(n1, a)
        piece = freq_project(f, Box.interval(n1 + 1, b).product(upper))
        p2 = p2 + _apply_diag(cut, piece, "left")

    p3 = MatTrigPoly.zero(2, f.rows, f.cols)
    for n2 in range(a, b - 1):
        cut = dop(-a + 1, n2 + 1) - dop(-a + 1, n2)
        piece = freq_project(f, strip.product(Box.interval(n2 + 1, b)))
        p3 = p3 + _apply_diag(cut, piece, "left")

    p4 = MatTrigPoly.zero(2, f.rows, f.cols)
    for n1 in range(-a + 1, b - 1):
        for n2 in range(a, b - 1):
            cut = dop(n1 + 1, n2 + 1) - dop(n1 + 1, n2) - dop(n1, n2 + 1) + dop(n1, n2)
            piece = freq_project(f, Box.interval(n1 + 1, b).product(Box.interval(n2 + 1, b)))
            p4 = p4 + _apply_diag(cut, piece, "left")

    total = p1 + p2 + p3 + p4
    direct = freq_project(apply_fourier_multiplier(m, f, verify_two_sided=False), rect)
    residual = max_coeff_diff(total, direct)
    scale = max(direct.max_abs(), 1.0)
    if residual > check_tol * scale:
        raise ArithmeticError(
            f"rectangle decomposition failed to reassemble: residual {residual:.3e}"
        )
    return Sbp2dParts(j, anchor, p1, p2, p3, p4, total, direct, residual)


# ---------------------------------------------------------------------------
# empirical square-function ratios


@dataclass
class LpReport:
    """Empirical norm-vs-square-function ratios for one polynomial."""

    p: float
    reference: float
    norm: float
    block_ratio: float
    cutoff_ratio: float
    rect_ratio: float | None
    levels: list
    side: str = "max"
    notes: dict = field(default_factory=dict)

    def as_dict(self):
        return {
            "p": self.p,
            "reference": self.reference,
            "norm": self.norm,
            "block_ratio": self.block_ratio,
            "cutoff_ratio": self.cutoff_ratio,
            "rect_ratio": self.rect_ratio,
            "levels": list(self.levels),
            "side": self.side,
            **self.notes,
        }


def _levels_for(f: MatTrigPoly):
    sup = f.support_array()
    if len(sup) == 0:
        return [0]
    top = int(np.abs(sup).max())
    jmax = 0 if top == 0 else top.bit_length()
    return list(range(0, jmax + 1))


def lp_experiment(f: MatTrigPoly, p: float, grid: QuadratureGrid | None = None,
                  rectangles=None) -> LpReport:
    """Measure how block and cutoff square functions compare to the norm.

    Records norm / square-function for the dyadic block projections, the
    cutoff square function / norm, and optionally the same for a supplied
    family of frequency rectangles. Ratios are reported against the shape
    p^2/(p-1); nothing here passes or fails.
    """
    if p < 2:
        raise ValueError("square-function ratios are computed for p >= 2 only")
    if math.isinf(p):
        raise ValueError("square-function ratios need finite p")
    if grid is None:
        grid = QuadratureGrid.default_for(f)
    levels = _levels_for(f)

    # Norm through the same evaluation path as the square functions, so a
    # single-block polynomial gives ratio 1.0 with no rounding gap at all.
    norm = square_function_norm([f], p, grid=grid, side="max")
    blocks = [freq_project(f, DyadicIndex(j, f.d)) for j in levels]
    blocks = [g for g in blocks if g.support]
    cuts = [smooth_cutoff(f, j) for j in levels]
    cuts = [g for g in cuts if g.support]

    block_sq = square_function_norm(blocks, p, grid=grid, side="max") if blocks else 0.0
    cut_sq = square_function_norm(cuts, p, grid=grid, side="max") if cuts else 0.0
    block_ratio = norm / block_sq if block_sq else math.inf if norm else 1.0
    cutoff_ratio = cut_sq / norm if norm else math.inf if cut_sq else 1.0

    rect_ratio = None
    if rectangles is not None:
        pieces = [freq_project(f, R) for R in rectangles]
        pieces = [g for g in pieces if g.support]
        rect_sq = square_function_norm(pieces, p, grid=grid, side="max") if pieces else 0.0
        rect_ratio = rect_sq / norm if norm else math.inf if rect_sq else 1.0

    return LpReport(
        p=float(p),
        reference=p * p / (p - 1.0),
        norm=norm,
        block_ratio=block_ratio,
        cutoff_ratio=cutoff_ratio,
        rect_ratio=rect_ratio,
        levels=levels,
        notes={"norm_direct": lp_sp_norm(f, p, grid=grid)},
    )
