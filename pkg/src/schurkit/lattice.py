"""Dyadic geometry of Z^d and finite-difference calculus on the integer lattice.

Blocks are half-open in the sup norm throughout: E_0 = {0} and, for j >= 1,
E_j = { n in Z^d : 2**(j-1) <= |n|_inf < 2**j }.  These sets partition Z^d.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Box",
    "AlphaMask",
    "DyadicIndex",
    "aspoint",
    "dyadic_block_contains",
    "dyadic_block_points",
    "split_block_2d",
    "forward_difference",
    "backward_difference",
    "alpha_project",
    "alpha_merge",
    "fundamental_theorem_expand",
]


def aspoint(n, d=None):
    """Normalize a lattice point to a tuple of ints.

    Scalars are accepted as one-dimensional points.  If ``d`` is given the
    dimension is checked.
    """
    if np.isscalar(n):
        pt = (int(n),)
    else:
        pt = tuple(int(x) for x in n)
    if d is not None and len(pt) != d:
        raise ValueError(f"point {pt} has dimension {len(pt)}, expected {d}")
    return pt


@dataclass(frozen=True)
class Box:
    """Product of half-open integer intervals [lo_i, hi_i).

    Points are enumerated in lexicographic order; ``index`` and ``point_at``
    convert between points and flat positions in that order.
    """

    los: tuple
    his: tuple

    def __post_init__(self):
        los = tuple(int(x) for x in self.los)
        his = tuple(int(x) for x in self.his)
        if len(los) != len(his):
            raise ValueError("lo and hi must have the same length")
        if not los:
            raise ValueError("a box needs at least one axis")
        if any(l > h for l, h in zip(los, his)):
            raise ValueError(f"empty axis interval in box {los}..{his}")
        object.__setattr__(self, "los", los)
        object.__setattr__(self, "his", his)

    @classmethod
    def interval(cls, lo, hi):
        """One-dimensional box [lo, hi)."""
        return cls((int(lo),), (int(hi),))

    @classmethod
    def cube(cls, lo, hi, d):
        return cls((int(lo),) * d, (int(hi),) * d)

    @classmethod
    def from_pairs(cls, pairs):
        pairs = list(pairs)
        return cls(tuple(p[0] for p in pairs), tuple(p[1] for p in pairs))

    @property
    def d(self):
        return len(self.los)

    @property
    def sizes(self):
        return tuple(h - l for l, h in zip(self.los, self.his))

    @property
    def npoints(self):
        return int(math.prod(self.sizes))

    def __contains__(self, n):
        pt = aspoint(n, self.d)
        return all(l <= x < h for x, l, h in zip(pt, self.los, self.his))

    def points(self):
        return itertools.product(*(range(l, h) for l, h in zip(self.los, self.his)))

    def points_array(self):
        return _points_array_cached(self)

    def index(self, n):
        """Flat lexicographic position of a point; raises if outside."""
        pt = aspoint(n, self.d)
        if pt not in self:
            raise ValueError(f"point {pt} outside box {self.los}..{self.his}")
        idx = 0
        for x, l, s in zip(pt, self.los, self.sizes):
            idx = idx * s + (x - l)
        return idx

    def index_array(self, pts):
        """Vectorized ``index`` over an (m, d) int array.

        Returns ``(idx, valid)`` where invalid rows get index 0 and a False
        mask entry instead of raising.
        """
        pts = np.asarray(pts, dtype=np.int64).reshape(-1, self.d)
        los = np.asarray(self.los, dtype=np.int64)
        sizes = np.asarray(self.sizes, dtype=np.int64)
        offs = pts - los
        valid = np.all((offs >= 0) & (offs < sizes), axis=1)
        strides = np.ones(self.d, dtype=np.int64)
        for i in range(self.d - 2, -1, -1):
            strides[i] = strides[i + 1] * sizes[i + 1]
        idx = np.where(valid[:, None], offs, 0) @ strides
        return idx, valid

    def point_at(self, idx):
        if not 0 <= idx < self.npoints:
            raise IndexError(idx)
        coords = []
        for s in reversed(self.sizes):
            coords.append(idx % s)
            idx //= s
        return tuple(l + c for l, c in zip(self.los, reversed(coords)))

    def shift(self, v):
        v = aspoint(v, self.d)
        return Box(
            tuple(l + x for l, x in zip(self.los, v)),
            tuple(h + x for h, x in zip(self.his, v)),
        )

    def product(self, other):
        """Cartesian product box (dimensions concatenate)."""
        return Box(self.los + other.los, self.his + other.his)


@functools.lru_cache(maxsize=256)
def _points_array_cached(box):
    grids = np.meshgrid(
        *(np.arange(l, h, dtype=np.int64) for l, h in zip(box.los, box.his)),
        indexing="ij",
    )
    return np.stack([g.ravel() for g in grids], axis=1)


class AlphaMask(tuple):
    """Element of {0,1}^d marking a subset of coordinate directions."""

    def __new__(cls, bits):
        bits = tuple(int(b) for b in bits)
        if any(b not in (0, 1) for b in bits):
            raise ValueError(f"mask entries must be 0 or 1, got {bits}")
        return super().__new__(cls, bits)

    @property
    def d(self):
        return len(self)

    @property
    def weight(self):
        return sum(self)

    @property
    def axes(self):
        return tuple(i for i, b in enumerate(self) if b)

    def complement(self):
        return AlphaMask(tuple(1 - b for b in self))

    @classmethod
    def all_masks(cls, d):
        return [cls(bits) for bits in itertools.product((0, 1), repeat=d)]

    @classmethod
    def nonzero_masks(cls, d):
        return [m for m in cls.all_masks(d) if m.weight > 0]


@dataclass(frozen=True)
class DyadicIndex:
    """Block index: level j >= 0 in dimension d."""

    j: int
    d: int

    def __post_init__(self):
        if self.j < 0:
            raise ValueError("dyadic level must be >= 0")
        if self.d < 1:
            raise ValueError("dimension must be >= 1")


def dyadic_block_contains(j, n, d=None):
    """Whether a point lies in the dyadic block E_j.

    ``j`` may be a :class:`DyadicIndex` or a plain level (then the dimension
    is taken from ``n``).
    """
    if isinstance(j, DyadicIndex):
        pt = aspoint(n, j.d)
        level = j.j
    else:
        pt = aspoint(n, d)
        level = int(j)
        if level < 0:
            raise ValueError("dyadic level must be >= 0")
    sup = max(abs(x) for x in pt)
    if level == 0:
        return sup == 0
    return 2 ** (level - 1) <= sup < 2**level


def dyadic_block_points(j, d=None):
    """All points of E_j as an (m, d) int array, lexicographically ordered."""
    if isinstance(j, DyadicIndex):
        level, dim = j.j, j.d
    else:
        level, dim = int(j), d
        if dim is None:
            raise ValueError("dimension required when j is a plain level")
    if level == 0:
        return np.zeros((1, dim), dtype=np.int64)
    hull = Box.cube(-(2**level) + 1, 2**level, dim)
    pts = hull.points_array()
    sup = np.max(np.abs(pts), axis=1)
    return pts[sup >= 2 ** (level - 1)]


def split_block_2d(j):
    """The four half-open rectangles partitioning E_j in Z^2 (j >= 1).

    With I = [2**(j-1), 2**j) and J = [-2**(j-1)+1, 2**j) the pieces are
    J x I, (-I) x J, I x (-J), (-J) x (-I), listed in that order.
    """
    if j < 1:
        raise ValueError("the rectangle split needs j >= 1")
    h, f = 2 ** (j - 1), 2**j
    i_lo, i_hi = h, f
    j_lo, j_hi = -h + 1, f
    neg_i = (-f + 1, -h + 1)  # {-n : n in I} as a half-open interval
    neg_j = (-f + 1, h)
    return (
        Box((j_lo, i_lo), (j_hi, i_hi)),
        Box((neg_i[0], j_lo), (neg_i[1], j_hi)),
        Box((i_lo, neg_j[0]), (i_hi, neg_j[1])),
        Box((neg_j[0], neg_i[0]), (neg_j[1], neg_i[1])),
    )


def _asorder(alpha, d=None):
    """Normalize a difference order to a tuple of nonnegative ints."""
    if isinstance(alpha, AlphaMask):
        order = tuple(alpha)
    elif np.isscalar(alpha):
        order = (int(alpha),)
    else:
        order = tuple(int(a) for a in alpha)
    if any(a < 0 for a in order):
        raise ValueError(f"difference order must be nonnegative, got {order}")
    if d is not None and len(order) != d:
        raise ValueError(f"order {order} has dimension {len(order)}, expected {d}")
    return order


def forward_difference(phi, alpha, xi):
    """Mixed forward difference of a lattice function.

    Expands sum over beta <= alpha of (-1)**|alpha-beta| * C(alpha, beta)
    * phi(xi + beta).  ``alpha`` may have entries larger than one.
    """
    xi = aspoint(xi)
    order = _asorder(alpha, len(xi))
    total = 0
    for beta in itertools.product(*(range(a + 1) for a in order)):
        sign = (-1) ** (sum(order) - sum(beta))
        coeff = math.prod(math.comb(a, b) for a, b in zip(order, beta))
        total += sign * coeff * phi(tuple(x + b for x, b in zip(xi, beta)))
    return total


def backward_difference(phi, alpha, xi):
    """Mixed backward difference; equals the forward difference at xi - alpha."""
    xi = aspoint(xi)
    order = _asorder(alpha, len(xi))
    shifted = tuple(x - a for x, a in zip(xi, order))
    return forward_difference(phi, order, shifted)


def alpha_project(n, alpha):
    """Coordinates of ``n`` along the directions selected by ``alpha``."""
    pt = aspoint(n)
    mask = AlphaMask(alpha)
    if mask.d != len(pt):
        raise ValueError("mask and point dimensions differ")
    return tuple(pt[i] for i in mask.axes)


def alpha_merge(n_alpha, n_rest, alpha):
    """Inverse of :func:`alpha_project`: interleave the two coordinate groups."""
    mask = AlphaMask(alpha)
    n_alpha = tuple(n_alpha)
    n_rest = tuple(n_rest)
    if len(n_alpha) != mask.weight or len(n_rest) != mask.d - mask.weight:
        raise ValueError("coordinate group sizes do not match the mask")
    out = []
    ia = ir = 0
    for b in mask:
        if b:
            out.append(int(n_alpha[ia]))
            ia += 1
        else:
            out.append(int(n_rest[ir]))
            ir += 1
    return tuple(out)


def fundamental_theorem_expand(M, s, t, n):
    """Reconstruct M(n) from mixed forward differences anchored at s.

    For s <= n < t coordinatewise, returns
    sum over masks alpha of sum over k_alpha in [s, n)_alpha of
    (forward difference of order alpha of M) at the point whose alpha
    coordinates are k_alpha and whose remaining coordinates are those of s.
    The value equals M(n); callers may use the returned expansion as a check.
    """
    s = aspoint(s)
    n = aspoint(n, len(s))
    t = aspoint(t, len(s))
    if not all(a <= b < c for a, b, c in zip(s, n, t)):
        raise ValueError(f"need s <= n < t coordinatewise, got s={s} n={n} t={t}")
    d = len(s)
    total = 0
    for mask in AlphaMask.all_masks(d):
        ranges = [range(s[i], n[i]) for i in mask.axes]
        for k in itertools.product(*ranges):
            point = alpha_merge(k, tuple(s[i] for i in range(d) if not mask[i]), mask)
            total += forward_difference(M, mask, point)
    return total
