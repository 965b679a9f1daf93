"""Metric geometry of the cone ``(P, d_2)``.

The geodesic between ``a`` and ``b`` is

.. math::

    \\gamma_{a,b}(t) = a^{1/2} (a^{-1/2} b a^{-1/2})^t a^{1/2}

and its length is ``d_2(a, b) = || ln(a^{-1/2} b a^{-1/2}) ||_2``, the trace
2-norm of the logarithm.  Congruences ``a -> g a g*`` act by isometries and
map geodesics to geodesics.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .algebra import (
    EPS_POS,
    AlgebraElement,
    PositiveElement,
    norm2,
    positivize,
    smallest_singular_value,
)
from .errors import BudgetExceeded, MalformedElement, NotInvertible, NotPositive

EPS_BAND = 1e-10
DEDUP_TOL = 1e-9


def _inv_sqrt_blocks(a: PositiveElement) -> list[np.ndarray]:
    return [(u / np.sqrt(v)) @ u.conj().T for v, u in zip(a.eigvals, a.eigvecs)]


def _sqrt_blocks(a: PositiveElement) -> list[np.ndarray]:
    return [(u * np.sqrt(v)) @ u.conj().T for v, u in zip(a.eigvals, a.eigvecs)]


def _same_algebra(a, b):
    if a.algebra != b.algebra:
        raise MalformedElement("points belong to different algebras")


def _hermitize(x: np.ndarray) -> np.ndarray:
    return 0.5 * (x + np.swapaxes(x, -1, -2).conj())


class GeodesicSegment:
    """The geodesic from ``a`` to ``b``, with the whitened endpoint cached.

    ``w = a^{-1/2} b a^{-1/2}`` is eigendecomposed once, so evaluating the
    segment at many parameters costs one matrix product per block each.
    """

    def __init__(self, a: AlgebraElement, b: AlgebraElement):
        a = positivize(a)
        b = positivize(b)
        _same_algebra(a, b)
        self.a = a
        self.b = b
        self.a_sqrt = _sqrt_blocks(a)
        self.a_inv_sqrt = _inv_sqrt_blocks(a)
        self.w_eig = []
        for s, bb in zip(self.a_inv_sqrt, b.blocks):
            lam, u = np.linalg.eigh(_hermitize(s @ bb @ s))
            if lam[0] <= 0:
                raise NotPositive("whitened endpoint lost positivity")
            self.w_eig.append((lam, u))

    def __call__(self, t: float) -> PositiveElement:
        return geodesic_eval(self, t)

    def log_eigs(self) -> list[np.ndarray]:
        return [np.log(lam) for lam, _ in self.w_eig]


def geodesic_eval(seg: GeodesicSegment, t: float) -> PositiveElement:
    """Evaluate ``gamma_{a,b}(t)``; ``t`` outside ``[0, 1]`` extends the geodesic."""
    if t == 0:
        return seg.a
    if t == 1:
        return seg.b
    blocks = []
    for r, (lam, u) in zip(seg.a_sqrt, seg.w_eig):
        blocks.append(r @ ((u * lam ** t) @ u.conj().T) @ r)
    return positivize(AlgebraElement(seg.a.algebra, blocks))


def geodesic(a: AlgebraElement, b: AlgebraElement, t: float) -> PositiveElement:
    return geodesic_eval(GeodesicSegment(a, b), t)


def distance(a: AlgebraElement, b: AlgebraElement) -> float:
    """Geodesic distance ``d_2(a, b)``.

    Computed from the eigenvalues of ``a^{-1/2} b a^{-1/2}``; no dense
    matrix logarithm is formed.
    """
    a = positivize(a)
    b = positivize(b)
    _same_algebra(a, b)
    total = 0.0
    for scale, s, bb in zip(a.algebra.block_scales, _inv_sqrt_blocks(a), b.blocks):
        lam = np.linalg.eigvalsh(_hermitize(s @ bb @ s))
        if lam[0] <= 0:
            raise NotPositive("whitened point lost positivity")
        total += scale * float(np.sum(np.log(lam) ** 2))
    return float(np.sqrt(total))


def midpoint(a: AlgebraElement, b: AlgebraElement) -> PositiveElement:
    """The metric midpoint ``gamma_{a,b}(1/2)``, the geometric mean of ``a`` and ``b``."""
    return geodesic(a, b, 0.5)


def congruence(g: AlgebraElement, a: AlgebraElement) -> PositiveElement:
    """The isometry ``I_g(a) = g a g*``."""
    a = positivize(a)
    _same_algebra(g, a)
    if smallest_singular_value(g) <= EPS_POS:
        raise NotInvertible("congruence by a non-invertible element")
    return positivize(AlgebraElement(a.algebra, [x @ y @ x.conj().T for x, y in zip(g.blocks, a.blocks)]))


# --------------------------------------------------------------------------
# Batched helpers over finite point sets


def stack_points(points: Sequence[PositiveElement]) -> list[np.ndarray]:
    """Per-block arrays of shape ``(N, n, n)``."""
    nb = points[0].algebra.num_blocks
    return [np.stack([p.blocks[i] for p in points]) for i in range(nb)]


def whitened_spectra(center: PositiveElement, stacked: list[np.ndarray], vectors: bool = False):
    """Eigen-data of ``c^{-1/2} S_i c^{-1/2}`` for every stacked point, per block."""
    out = []
    for s, blk in zip(_inv_sqrt_blocks(center), stacked):
        w = _hermitize(s @ blk @ s)
        out.append(np.linalg.eigh(w) if vectors else np.linalg.eigvalsh(w))
    return out


def distances_from(center: PositiveElement, points) -> np.ndarray:
    """``d_2(center, p)`` for every point, evaluated in one batch per block."""
    return distances_from_stacked(center, stack_points(points))


def distances_from_stacked(center: PositiveElement, stacked: list[np.ndarray]) -> np.ndarray:
    sq = 0.0
    for scale, lam in zip(center.algebra.block_scales, whitened_spectra(center, stacked)):
        if np.any(lam <= 0):
            raise NotPositive("whitened point lost positivity")
        sq = sq + scale * np.sum(np.log(lam) ** 2, axis=-1)
    return np.sqrt(sq)


# --------------------------------------------------------------------------
# Bands and convex hulls


@dataclass(frozen=True)
class Band:
    """The order interval ``P_{c1,c2} = {a : c1 <= a <= c2}``.

    ``c1 == c2`` is allowed: a unitary group has uniform bound 1 and its
    band collapses to the single point 1.
    """

    c1: float
    c2: float

    def __post_init__(self):
        if not (0 < self.c1 <= self.c2):
            raise ValueError(f"band needs 0 < c1 <= c2, got ({self.c1}, {self.c2})")

    def __contains__(self, a) -> bool:
        return in_band(a, self)

    @property
    def diameter_bound(self) -> float:
        """``ln(c2/c1)``: no two points of the band are farther apart in ``d_2``."""
        return float(np.log(self.c2 / self.c1))


def in_band(a: AlgebraElement, band: Band, eps: float = EPS_BAND) -> bool:
    a = positivize(a)
    return band.c1 - eps <= a.min_eig and a.max_eig <= band.c2 + eps


@dataclass
class HullApproximation:
    generations: list[list[PositiveElement]]
    depth: int
    samples_per_pair: int
    subsampled: list[bool] = field(default_factory=list)

    @property
    def points(self) -> list[PositiveElement]:
        return self.generations[-1]


class _DedupSet:
    """Insertion-ordered point set; points within ``tol`` in ``norm2`` are merged."""

    def __init__(self, block_scales, tol=DEDUP_TOL):
        self.block_scales = block_scales
        self.tol = tol
        self.points: list[PositiveElement] = []
        self._rows: list[np.ndarray] = []

    def _flat(self, p) -> np.ndarray:
        return np.concatenate([np.sqrt(s) * b.ravel() for s, b in zip(self.block_scales, p.blocks)])

    def add(self, p: PositiveElement) -> bool:
        row = self._flat(p)
        if self._rows:
            diff = np.linalg.norm(np.asarray(self._rows) - row, axis=1)
            if np.any(diff <= self.tol * (1.0 + np.linalg.norm(row))):
                return False
        self._rows.append(row)
        self.points.append(p)
        return True


def hull_expand(
    points: Sequence[AlgebraElement],
    depth: int = 3,
    samples_per_pair: int = 5,
    max_points: int = 5000,
    seed=0,
    subsample: bool = True,
) -> HullApproximation:
    """Finite-depth approximation of the geodesic convex hull.

    ``X_1`` is the input set and ``X_{n+1}`` adds ``gamma_{a,b}(t)`` for
    pairs ``a, b`` of ``X_n`` and ``t`` on a uniform grid of
    ``samples_per_pair`` values in ``[0, 1]``.  When a generation would
    exceed ``max_points`` the pairs are subsampled with a seeded generator,
    or :class:`BudgetExceeded` is raised if ``subsample`` is False.
    """
    if not points:
        raise ValueError("hull_expand needs at least one point")
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if samples_per_pair < 2:
        raise ValueError("samples_per_pair must be >= 2 (the grid includes both endpoints)")
    points = [positivize(p) for p in points]
    algebra = points[0].algebra
    rng = np.random.default_rng(seed)
    grid = np.linspace(0.0, 1.0, samples_per_pair)[1:-1]

    current = _DedupSet(algebra.block_scales)
    for p in points:
        _same_algebra(points[0], p)
        current.add(p)
    generations = [list(current.points)]
    flags = [False]
    for _ in range(depth - 1):
        prev = list(current.points)
        pairs = [(i, j) for i in range(len(prev)) for j in range(i + 1, len(prev))]
        room = max_points - len(prev)
        per_pair = len(grid)
        cut = False
        if per_pair and len(pairs) * per_pair > room:
            if not subsample:
                raise BudgetExceeded(
                    f"hull generation would hold up to {len(prev) + len(pairs) * per_pair} points "
                    f"(cap {max_points})"
                )
            keep = max(room // per_pair, 0)
            idx = np.sort(rng.choice(len(pairs), size=keep, replace=False))
            pairs = [pairs[k] for k in idx]
            cut = True
        for i, j in pairs:
            seg = GeodesicSegment(prev[i], prev[j])
            for t in grid:
                current.add(geodesic_eval(seg, float(t)))
        generations.append(list(current.points))
        flags.append(cut)
    return HullApproximation(generations, depth, samples_per_pair, flags)


def nearest_distance(p: PositiveElement, points: Sequence[PositiveElement]) -> float:
    """Smallest ``d_2`` from ``p`` to a finite set."""
    return float(distances_from(positivize(p), list(points)).min())


def linear_distance(a: AlgebraElement, b: AlgebraElement) -> float:
    """``||a - b||_2``, the flat metric the cone inherits from the algebra."""
    return norm2(a - b)
