"""Unitarization of uniformly bounded groups.

For a bounded group ``H`` with ``M = sup ||h||``, the orbit of the identity
under the congruence action, ``H.1 = {h h*}``, lies in the band
``P_{M^-2, M^2}``.  Its circumcenter ``a`` is fixed by every ``h``
(``h a h* = a``), hence ``a^{-1/2} h a^{1/2}`` is unitary for all ``h`` and
``s = a^{-1/2}`` is a unitarizer lying in ``P_{M^-1, M}``.

Only finite groups are handled: generators are closed breadth-first into
a :class:`GroupTable` first.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .algebra import (
    EPS_POS,
    AlgebraElement,
    BlockAlgebra,
    PositiveElement,
    positivize,
    smallest_singular_value,
    spectral_map,
    uniform_norm,
)
from .circumcenter import circumcenter, karcher_mean
from .errors import MalformedElement, NonConvergence, NotInvertible, OrderExceeded
from .geometry import EPS_BAND, Band, distance, distances_from, in_band

log = logging.getLogger(__name__)

GROUP_DEDUP_TOL = 1e-8
NORM_GROWTH = 1e6
METHODS = ("circumcenter", "karcher")


@dataclass
class GroupTable:
    """A finite group of invertible elements, identity first.

    ``uniform_bound`` is ``M = max ||h||``.  ``closed`` is False for a
    partial table left behind by an aborted closure.
    """

    elements: list[AlgebraElement]
    uniform_bound: float
    closed: bool
    generator_indices: list[int] = field(default_factory=list)

    @property
    def algebra(self) -> BlockAlgebra:
        return self.elements[0].algebra

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self):
        return len(self.elements)

    def index_of(self, x: AlgebraElement) -> int:
        """Index of the table element equal to ``x`` within the dedup tolerance, or -1."""
        return _Lookup.from_elements(self.elements).find(x)


class _Lookup:
    """Vectorized near-duplicate search over flattened elements."""

    def __init__(self):
        self.rows: list[np.ndarray] = []
        self._mat: np.ndarray | None = None

    @classmethod
    def from_elements(cls, elements):
        lk = cls()
        for e in elements:
            lk.add(e)
        return lk

    @staticmethod
    def flat(x: AlgebraElement) -> np.ndarray:
        return np.concatenate([b.ravel() for b in x.blocks])

    def add(self, x):
        self.rows.append(self.flat(x))
        self._mat = None

    def find(self, x, tol=GROUP_DEDUP_TOL) -> int:
        if not self.rows:
            return -1
        if self._mat is None:
            self._mat = np.asarray(self.rows)
        row = self.flat(x)
        # Frobenius distance bounds the uniform-norm distance from above.
        diff = np.linalg.norm(self._mat - row, axis=1)
        hits = np.flatnonzero(diff <= tol * (1.0 + np.linalg.norm(row)))
        return int(hits[0]) if hits.size else -1


def close_group(
    generators: Sequence[AlgebraElement],
    max_order: int = 10000,
    algebra: BlockAlgebra | None = None,
) -> GroupTable:
    """Breadth-first closure of ``generators`` under products.

    Each discovered element is multiplied on the right by every generator
    and every generator inverse; near-duplicates (relative Frobenius
    distance ``1e-8``) are merged.

    Raises
    ------
    NotInvertible
        If a generator is singular.
    OrderExceeded
        If the closure passes ``max_order`` elements, or some product has
        norm above ``1e6`` (``norm_growth=True``: the group is unbounded).
        The partial table is attached to the exception.
    """
    generators = list(generators)
    if algebra is None:
        if not generators:
            raise MalformedElement("an algebra is needed when there are no generators")
        algebra = generators[0].algebra
    for g in generators:
        if g.algebra != algebra:
            raise MalformedElement("generators belong to different algebras")
        if smallest_singular_value(g) <= EPS_POS:
            raise NotInvertible("generator is not invertible")
    moves = generators + [g.inv() for g in generators]

    one = algebra.identity()
    elements = [one]
    lookup = _Lookup.from_elements(elements)
    bound = 1.0
    head = 0
    while head < len(elements):
        x = elements[head]
        head += 1
        for g in moves:
            y = x @ g
            if lookup.find(y) >= 0:
                continue
            ny = uniform_norm(y)
            elements.append(y)
            lookup.add(y)
            bound = max(bound, ny)
            if ny > NORM_GROWTH:
                table = GroupTable(elements, bound, False, [])
                raise OrderExceeded(
                    f"norm growth detected: a product has norm {ny:.3e} > {NORM_GROWTH:g}; "
                    "the generated group is unbounded",
                    max_order,
                    norm_growth=True,
                    table=table,
                )
            if len(elements) > max_order:
                table = GroupTable(elements, bound, False, [])
                raise OrderExceeded(
                    f"order cap reached: closure exceeded {max_order} elements "
                    f"(largest norm so far {bound:.3e})",
                    max_order,
                    norm_growth=False,
                    table=table,
                )
    gen_idx = [lookup.find(g) for g in generators]
    return GroupTable(elements, max(uniform_norm(h) for h in elements), True, gen_idx)


def orbit_of_identity(table: GroupTable, allow_partial: bool = False) -> list[PositiveElement]:
    """The orbit ``{h h*}`` of the identity, deduplicated, in table order."""
    if not table.closed and not allow_partial:
        raise ValueError("group table is not closed; pass allow_partial=True to use it anyway")
    orbit: list[PositiveElement] = []
    lookup = _Lookup()
    for h in table.elements:
        p = positivize(h @ h.H)
        if lookup.find(p, tol=1e-9) < 0:
            orbit.append(p)
            lookup.add(p)
    return orbit


@dataclass
class UnitarizationCertificate:
    """Fixed point, unitarizer and the residuals that certify them.

    ``unitarizer`` is ``s = a^{-1/2}`` for the fixed point ``a`` =
    ``center``; ``s h s^{-1}`` is unitary for every ``h`` of the group.
    """

    center: PositiveElement
    unitarizer: PositiveElement
    band: Band
    residual_unitarity: float
    residual_fixed_point: float
    orbit_band_ok: bool
    unitarizer_band_ok: bool
    uniform_bound: float
    method: str = "circumcenter"
    converged: bool = True
    radius: float = float("nan")
    iterations: int = 0
    orbit_size: int = 0

    def conjugate(self, h: AlgebraElement) -> AlgebraElement:
        """``s h s^{-1}``."""
        return self.unitarizer @ h @ self.unitarizer.inv()


def _unitarity_residual(s: AlgebraElement, s_inv: AlgebraElement, elements) -> float:
    one = s.algebra.identity()
    worst = 0.0
    for h in elements:
        u = s @ h @ s_inv
        worst = max(worst, uniform_norm(u @ u.H - one))
    return worst


def _fixed_point_residual(a: PositiveElement, elements) -> float:
    moved = [positivize(h @ a @ h.H) for h in elements]
    return float(distances_from(a, moved).max())


def fixed_point(
    orbit: Sequence[PositiveElement],
    method: str = "circumcenter",
    tol: float = 1e-8,
    max_iter: int | None = None,
) -> tuple[PositiveElement, bool, float, int]:
    """Fixed point of the action from a finite orbit.

    Returns ``(a, converged, radius, iterations)``; the radius is NaN for
    the Karcher method.
    """
    if method == "circumcenter":
        ball = circumcenter(orbit, tol=tol, max_iter=max_iter)
        return ball.center, ball.converged, ball.radius, ball.iterations
    if method == "karcher":
        try:
            a = karcher_mean(orbit, tol=tol, max_iter=max_iter or 1000)
            return a, True, float("nan"), 0
        except NonConvergence as exc:
            return exc.best, False, float("nan"), exc.iterations or 0
    raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")


def unitarize_group(
    table: GroupTable,
    tol: float = 1e-8,
    max_iter: int | None = None,
    method: str = "circumcenter",
    orbit: Sequence[PositiveElement] | None = None,
    allow_partial: bool = False,
) -> UnitarizationCertificate:
    """Unitarize an already closed group table.

    ``orbit`` may be supplied to skip recomputing ``{h h*}``.
    """
    if orbit is None:
        orbit = orbit_of_identity(table, allow_partial=allow_partial)
    M = table.uniform_bound
    orbit_band = Band(M ** -2, M ** 2)
    orbit_ok = all(in_band(p, orbit_band) for p in orbit)

    a, converged, radius, iters = fixed_point(orbit, method=method, tol=tol, max_iter=max_iter)
    s = spectral_map(a, "inv_sqrt")
    s_inv = spectral_map(a, "sqrt")
    band = Band(1.0 / M, M)
    cert = UnitarizationCertificate(
        center=a,
        unitarizer=s,
        band=band,
        residual_unitarity=_unitarity_residual(s, s_inv, table.elements),
        residual_fixed_point=_fixed_point_residual(a, table.elements),
        orbit_band_ok=orbit_ok,
        unitarizer_band_ok=in_band(s, band, EPS_BAND),
        uniform_bound=M,
        method=method,
        converged=converged,
        radius=radius,
        iterations=iters,
        orbit_size=len(orbit),
    )
    if not converged:
        log.warning("%s solver did not converge; residuals reported for the best iterate", method)
    return cert


def unitarize(
    generators: Sequence[AlgebraElement],
    tol: float = 1e-8,
    max_iter: int | None = None,
    max_order: int = 10000,
    method: str = "circumcenter",
    allow_partial: bool = False,
    algebra: BlockAlgebra | None = None,
) -> UnitarizationCertificate:
    """Find ``s`` with ``s h s^{-1}`` unitary for every ``h`` of the generated group.

    Parameters
    ----------
    generators : sequence of AlgebraElement
        Invertible generators of a finite group.
    tol, max_iter : float, int
        Passed to the fixed-point solver.
    max_order : int
        Closure cap, see :func:`close_group`.
    method : {"circumcenter", "karcher"}
        Which fixed point of the orbit ``{h h*}`` to use.
    allow_partial : bool
        When the closure is aborted by the order cap (not by norm growth),
        unitarize the partial table instead of raising.

    Raises
    ------
    OrderExceeded
        If the closure does not terminate (and ``allow_partial`` is False,
        or norm growth certified unboundedness).
    """
    try:
        table = close_group(generators, max_order=max_order, algebra=algebra)
    except OrderExceeded as exc:
        if not allow_partial or exc.norm_growth:
            raise
        log.warning("unitarizing a partial table of %d elements", len(exc.table))
        table = exc.table
    return unitarize_group(table, tol=tol, max_iter=max_iter, method=method, allow_partial=allow_partial)


def verify_certificate(cert: UnitarizationCertificate, table: GroupTable, tol: float) -> bool:
    """Recompute every residual of ``cert`` from scratch against ``table``.

    Nothing computed by :func:`unitarize` is reused except the two returned
    elements ``center`` and ``unitarizer``: the inverse of ``s`` comes from a
    fresh linear solve, ``M`` and the orbit are recomputed from the table,
    and ``s a s = 1`` is checked so the two elements cannot disagree.
    """
    return all(check["ok"] for check in certificate_checks(cert, table, tol))


def certificate_checks(cert: UnitarizationCertificate, table: GroupTable, tol: float) -> list[dict]:
    """The individual checks behind :func:`verify_certificate`."""
    alg = table.algebra
    s = AlgebraElement(alg, cert.unitarizer.blocks)
    a = AlgebraElement(alg, cert.center.blocks)
    checks = []

    try:
        s_pos = positivize(s)
        a_pos = positivize(a)
        s_inv = AlgebraElement(alg, [np.linalg.solve(b, np.eye(b.shape[0])) for b in s.blocks])
    except Exception as exc:  # noqa: BLE001 - any failure means the certificate is invalid
        return [{"name": "well_formed", "ok": False, "measured": str(exc), "tolerance": None}]

    one = alg.identity()
    consistency = uniform_norm(s @ a @ s - one)
    checks.append({"name": "unitarizer_matches_center", "ok": consistency <= tol,
                   "measured": consistency, "tolerance": tol})

    unit = _unitarity_residual(s, s_inv, table.elements)
    checks.append({"name": "residual_unitarity", "ok": unit <= tol, "measured": unit, "tolerance": tol})

    fixed = max(distance(positivize(h @ a @ h.H), a_pos) for h in table.elements)
    checks.append({"name": "residual_fixed_point", "ok": fixed <= tol, "measured": fixed, "tolerance": tol})

    M = max(uniform_norm(h) for h in table.elements)
    orbit_ok = all(in_band(h @ h.H, Band(M ** -2, M ** 2)) for h in table.elements)
    checks.append({"name": "orbit_band", "ok": orbit_ok, "measured": M, "tolerance": EPS_BAND})

    unit_band = in_band(s_pos, Band(1.0 / M, M))
    checks.append({"name": "unitarizer_band", "ok": unit_band,
                   "measured": [s_pos.min_eig, s_pos.max_eig], "tolerance": EPS_BAND})
    return checks
