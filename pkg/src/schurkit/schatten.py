"""Schatten p-norms, operator absolute values, and quadrature norms on the torus.

Matrices carry their index windows explicitly: a :class:`LabeledMatrix` is a
dense complex array whose rows and columns are labeled by the points of two
half-open boxes in Z^d, enumerated lexicographically.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .lattice import Box

__all__ = [
    "LabeledMatrix",
    "QuadratureGrid",
    "schatten_norm",
    "abs_op",
    "cs_gap",
    "lp_sp_norm",
    "square_function_norm",
]

# Singular values below this fraction of the largest are treated as exact zeros
# before any p-th power is taken.
SV_CLIP = 1e-14


class LabeledMatrix:
    """Dense complex matrix indexed by lattice points of two boxes."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, rows: Box, cols: Box, data):
        data = np.asarray(data, dtype=np.complex128)
        if data.shape != (rows.npoints, cols.npoints):
            raise ValueError(
                f"data shape {data.shape} does not match windows "
                f"({rows.npoints}, {cols.npoints})"
            )
        self.rows = rows
        self.cols = cols
        self.data = data

    @classmethod
    def zeros(cls, rows, cols=None):
        cols = rows if cols is None else cols
        return cls(rows, cols, np.zeros((rows.npoints, cols.npoints), dtype=np.complex128))

    @classmethod
    def identity(cls, window):
        return cls(window, window, np.eye(window.npoints, dtype=np.complex128))

    @classmethod
    def unit(cls, rows, cols, s, t):
        """Matrix unit e_{s,t}."""
        out = cls.zeros(rows, cols)
        out.data[rows.index(s), cols.index(t)] = 1.0
        return out

    @property
    def shape(self):
        return self.data.shape

    def entry(self, s, t):
        return self.data[self.rows.index(s), self.cols.index(t)]

    def adjoint(self):
        return LabeledMatrix(self.cols, self.rows, self.data.conj().T)

    def same_windows(self, other):
        return self.rows == other.rows and self.cols == other.cols

    def _check_windows(self, other):
        if not self.same_windows(other):
            raise ValueError("window mismatch between labeled matrices")

    def __add__(self, other):
        self._check_windows(other)
        return LabeledMatrix(self.rows, self.cols, self.data + other.data)

    def __sub__(self, other):
        self._check_windows(other)
        return LabeledMatrix(self.rows, self.cols, self.data - other.data)

    def __neg__(self):
        return LabeledMatrix(self.rows, self.cols, -self.data)

    def __mul__(self, scalar):
        return LabeledMatrix(self.rows, self.cols, self.data * scalar)

    __rmul__ = __mul__

    def __matmul__(self, other):
        if self.cols != other.rows:
            raise ValueError("inner windows do not match for the product")
        return LabeledMatrix(self.rows, other.cols, self.data @ other.data)

    def trace(self):
        if self.rows != self.cols:
            raise ValueError("trace needs matching row and column windows")
        return complex(np.trace(self.data))

    def max_abs(self):
        return float(np.max(np.abs(self.data))) if self.data.size else 0.0

    def __repr__(self):
        return f"LabeledMatrix(rows={self.rows.los}..{self.rows.his}, cols={self.cols.los}..{self.cols.his})"


def _values(A):
    if isinstance(A, LabeledMatrix):
        return A.data
    return np.asarray(A, dtype=np.complex128)


def _clip_singulars(sv):
    if sv.size == 0:
        return sv
    top = sv.max()
    if top > 0:
        sv = np.where(sv < SV_CLIP * top, 0.0, sv)
    return sv


def schatten_norm(A, p):
    """Schatten p-norm via singular values; p = inf gives the operator norm.

    Exponents below 1 are computed as quasi-norms and flagged with a warning.
    """
    data = _values(A)
    if data.size == 0:
        return 0.0
    if not np.all(np.isfinite(data)):
        raise ValueError("matrix has non-finite entries")
    p = float(p)
    if p <= 0:
        raise ValueError("p must be positive")
    sv = _clip_singulars(np.linalg.svd(data, compute_uv=False))
    if math.isinf(p):
        return float(sv[0]) if sv.size else 0.0
    if p < 1:
        warnings.warn("p < 1 yields a quasi-norm, not a norm", stacklevel=2)
    return float(np.sum(sv**p) ** (1.0 / p))


def abs_op(A):
    """Operator absolute value (A* A)^(1/2), a PSD matrix on the column window."""
    if isinstance(A, LabeledMatrix):
        rows, cols, data = A.rows, A.cols, A.data
    else:
        data = _values(A)
        if data.shape[0] != data.shape[1]:
            raise ValueError("bare arrays must be square; wrap in LabeledMatrix otherwise")
        rows = cols = Box.interval(0, data.shape[0])
    gram = data.conj().T @ data
    gram = 0.5 * (gram + gram.conj().T)
    try:
        w, v = np.linalg.eigh(gram)
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError(f"eigendecomposition failed: {exc}") from exc
    w = np.clip(w, 0.0, None)
    root = (v * np.sqrt(w)) @ v.conj().T
    root = 0.5 * (root + root.conj().T)
    return LabeledMatrix(cols, cols, root)


def cs_gap(a_seq, c_seq):
    """Smallest eigenvalue of the operator Cauchy-Schwarz defect.

    For finite sequences (a_n), (c_n) with common windows this is
    lambda_min( ||sum a_n* a_n||_inf * sum c_n* c_n  -  |sum a_n* c_n|^2 ),
    which is nonnegative up to rounding.
    """
    a_seq = list(a_seq)
    c_seq = list(c_seq)
    if len(a_seq) != len(c_seq) or not a_seq:
        raise ValueError("need equally long, nonempty sequences")
    a0, c0 = a_seq[0], c_seq[0]
    for a, c in zip(a_seq, c_seq):
        if not (a.same_windows(a0) and c.same_windows(c0)):
            raise ValueError("all sequence members must share windows")
    if a0.rows != c0.rows or a0.cols != c0.cols:
        raise ValueError("the two sequences must share windows")
    n = a0.cols.npoints
    cross = np.zeros((n, n), dtype=np.complex128)
    gram_a = np.zeros((n, n), dtype=np.complex128)
    gram_c = np.zeros((n, n), dtype=np.complex128)
    for a, c in zip(a_seq, c_seq):
        cross += a.data.conj().T @ c.data
        gram_a += a.data.conj().T @ a.data
        gram_c += c.data.conj().T @ c.data
    lhs = cross.conj().T @ cross
    bound = float(np.linalg.eigvalsh(0.5 * (gram_a + gram_a.conj().T))[-1])
    diff = bound * gram_c - lhs
    diff = 0.5 * (diff + diff.conj().T)
    return float(np.linalg.eigvalsh(diff)[0])


@dataclass(frozen=True)
class QuadratureGrid:
    """Uniform product grid on the d-torus with q nodes per coordinate."""

    d: int
    q: int

    def __post_init__(self):
        if self.d < 1 or self.q < 1:
            raise ValueError("grid needs d >= 1 and q >= 1")

    @property
    def size(self):
        return self.q**self.d

    def indices(self):
        grids = np.meshgrid(*([np.arange(self.q)] * self.d), indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=1)

    def points(self):
        return np.exp(2j * np.pi * self.indices() / self.q)

    def phases(self, freqs):
        """Array of z^n over the grid: shape (grid size, len(freqs))."""
        freqs = np.asarray(freqs, dtype=np.int64).reshape(-1, self.d)
        return np.exp(2j * np.pi * (self.indices() @ freqs.T) / self.q)

    @classmethod
    def default_for(cls, f, factor=4):
        """Grid adapted to a polynomial's bandwidth: q = factor*maxfreq + 1."""
        return cls(f.d, factor * max(1, f.max_freq()) + 1)


def _eval_on_grid(f, grid, chunk=None):
    """Evaluate a matrix trig polynomial on all grid points: (G, R, C)."""
    if f.d != grid.d:
        raise ValueError("grid dimension does not match the polynomial")
    freqs = f.support_array()
    stack = f.coeff_stack()
    rr, cc = stack.shape[1], stack.shape[2]
    g = grid.size
    if chunk is None:
        # keep each chunk's work set around 64 MB
        per = max(1, (4 << 20) // max(1, rr * cc))
        chunk = min(g, per)
    out = np.empty((g, rr, cc), dtype=np.complex128)
    phases = grid.phases(freqs) if len(freqs) else np.zeros((g, 0))
    for start in range(0, g, chunk):
        ph = phases[start : start + chunk]
        out[start : start + chunk] = np.tensordot(ph, stack, axes=(1, 0))
    return out


def lp_sp_norm(f, p, grid=None):
    """Mixed L^p(torus; Schatten-p) norm of a matrix trig polynomial.

    Averages ||f(z)||_p^p over the grid and takes the p-th root; p = inf
    takes the max of operator norms over the grid.
    """
    p = float(p)
    if p < 1 and not math.isinf(p):
        raise ValueError("p >= 1 required")
    if grid is None:
        grid = QuadratureGrid.default_for(f)
    vals = _eval_on_grid(f, grid)
    sv = np.linalg.svd(vals, compute_uv=False)
    top = sv.max(initial=0.0)
    if top > 0:
        sv = np.where(sv < SV_CLIP * top, 0.0, sv)
    if math.isinf(p):
        return float(sv.max(initial=0.0))
    return float(np.mean(np.sum(sv**p, axis=1)) ** (1.0 / p))


def square_function_norm(gs, p, grid=None, side="column"):
    """Norm of the square function of a finite family of polynomials.

    ``side`` selects sum g_j(z)* g_j(z) (column), sum g_j(z) g_j(z)* (row),
    or the max of both.  Requires 2 <= p < inf.
    """
    p = float(p)
    if p < 2 or math.isinf(p):
        raise ValueError("square functions are computed for 2 <= p < inf")
    if side not in ("column", "row", "max"):
        raise ValueError("side must be 'column', 'row', or 'max'")
    gs = [g for g in gs if g.support]
    if not gs:
        return 0.0
    g0 = gs[0]
    for g in gs:
        if g.d != g0.d or g.rows != g0.rows or g.cols != g0.cols:
            raise ValueError("family members must share dimension and windows")
    if grid is None:
        grid = QuadratureGrid(g0.d, 4 * max(1, max(g.max_freq() for g in gs)) + 1)

    def one_side(which):
        dim = g0.cols.npoints if which == "column" else g0.rows.npoints
        acc = np.zeros((grid.size, dim, dim), dtype=np.complex128)
        for g in gs:
            vals = _eval_on_grid(g, grid)
            if which == "column":
                acc += np.einsum("gri,grj->gij", vals.conj(), vals)
            else:
                acc += np.einsum("gir,gjr->gij", vals, vals.conj())
        acc = 0.5 * (acc + np.conj(np.swapaxes(acc, 1, 2)))
        w = np.clip(np.linalg.eigvalsh(acc), 0.0, None)
        return float(np.mean(np.sum(w ** (p / 2.0), axis=1)) ** (1.0 / p))

    if side == "max":
        return max(one_side("column"), one_side("row"))
    return one_side(side)
