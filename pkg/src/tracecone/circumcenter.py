"""Circumcenters and Karcher means of finite subsets of the cone.

The circumcenter of a bounded set ``S`` is the center of the unique closed
``d_2``-ball of minimal radius containing ``S``.  It is computed in two
phases:

1. the Riemannian farthest-point iteration
   ``a_{k+1} = gamma_{a_k, f_k}(1/(k+1))`` (``f_k`` the farthest point of
   ``S`` from ``a_k``), which needs only geodesics and distances but
   converges like ``O(1/sqrt(k))``;
2. a log-barrier interior-point polish of ``min r s.t. d_2(c, S_i)^2 <= r``
   with Riemannian Newton steps, using the closed-form gradient
   ``-2 log_c(S_i)`` and Hessian of ``d_2(., S_i)^2``.  This reaches
   the optimum to near machine precision in a few dozen steps.

The Karcher mean is an independent cross-check: it is the minimizer of
``sum_i d_2(c, S_i)^2`` and, like the circumcenter, is fixed by every
isometry that permutes ``S``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import nnls

from .algebra import AlgebraElement, BlockAlgebra, PositiveElement, positivize
from .errors import EmptySet, MalformedElement, NonConvergence
from .geometry import (
    GeodesicSegment,
    _inv_sqrt_blocks,
    _sqrt_blocks,
    distances_from_stacked,
    geodesic_eval,
    stack_points,
)

HISTORY_JITTER = 1e-7


@dataclass
class EnclosingBall:
    """Minimal enclosing ball found by :func:`circumcenter`.

    ``radius_history`` holds the best radius seen after each iteration, so
    it is non-increasing.  ``converged`` is False when the iteration budget
    ran out; the best iterate is still returned.
    """

    center: PositiveElement
    radius: float
    iterations: int
    radius_history: list[float] = field(default_factory=list)
    converged: bool = True
    farthest_index: int = 0


def _as_points(S) -> list[PositiveElement]:
    if len(S) == 0:
        raise EmptySet("the point set is empty")
    pts = [positivize(p) for p in S]
    alg = pts[0].algebra
    if any(p.algebra != alg for p in pts):
        raise MalformedElement("points belong to different algebras")
    return pts


def max_radius(candidate: AlgebraElement, S: Sequence[AlgebraElement]) -> tuple[float, int]:
    """Largest distance from ``candidate`` to ``S`` and the first index attaining it."""
    pts = _as_points(S)
    d = distances_from_stacked(positivize(candidate), stack_points(pts))
    j = int(np.argmax(d))
    return float(d[j]), j


# --------------------------------------------------------------------------
# Tangent-space coordinates


def tangent_basis(algebra: BlockAlgebra) -> list[np.ndarray]:
    """Per block, an orthonormal basis of Hermitian matrices for ``Re tau(x* y)``.

    Returns arrays of shape ``(n*n, n, n)``; concatenating the blocks gives a
    basis of the whole selfadjoint part.
    """
    out = []
    for n, s in zip(algebra.block_dims, algebra.block_scales):
        mats = []
        for j in range(n):
            e = np.zeros((n, n), dtype=complex)
            e[j, j] = 1.0
            mats.append(e)
        for j in range(n):
            for k in range(j + 1, n):
                e = np.zeros((n, n), dtype=complex)
                e[j, k] = e[k, j] = 1 / np.sqrt(2)
                mats.append(e)
                e = np.zeros((n, n), dtype=complex)
                e[j, k] = 1j / np.sqrt(2)
                e[k, j] = -1j / np.sqrt(2)
                mats.append(e)
        out.append(np.stack(mats) / np.sqrt(s))
    return out


def _x_coth_x(x: np.ndarray) -> np.ndarray:
    small = np.abs(x) < 1e-8
    safe = np.where(small, 1.0, x)
    return np.where(small, 1.0 + x * x / 3.0, safe / np.tanh(safe))


def _sq_distance_model(center, stacked, basis, derivs=True):
    """Squared distances to every point, with gradients and Hessians at ``center``.

    In coordinates of ``basis`` around ``center``: the gradient of
    ``d^2(., S_i)`` is ``-2 log_c(S_i)`` and its Hessian acts in the
    eigenbasis of ``c^{-1/2} S_i c^{-1/2}`` entrywise by
    ``2 * x coth(x)`` with ``x = (l_j - l_k)/2``.
    """
    alg = center.algebra
    sq = 0.0
    grads, hessians = [], []
    for scale, s, blk, B in zip(alg.block_scales, _inv_sqrt_blocks(center), stacked, basis):
        w = s @ blk @ s
        lam, U = np.linalg.eigh(0.5 * (w + np.swapaxes(w, -1, -2).conj()))
        if np.any(lam <= 0):
            return None
        l = np.log(lam)
        sq = sq + scale * np.sum(l * l, axis=-1)
        if not derivs:
            continue
        bt = np.einsum("nja,mjk,nkb->nmab", U.conj(), B, U)
        diag = np.real(np.einsum("nmaa->nma", bt))
        grads.append(-2.0 * scale * np.einsum("nma,na->nm", diag, l))
        theta = _x_coth_x(0.5 * (l[:, :, None] - l[:, None, :]))
        hb = np.real(np.einsum("nkab,nab,nmab->nkm", bt.conj(), theta, bt))
        hessians.append(2.0 * scale * hb)
    if not derivs:
        return sq, None, None
    G = np.concatenate(grads, axis=1)
    N = G.shape[0]
    D = G.shape[1]
    H = np.zeros((N, D, D))
    off = 0
    for hb in hessians:
        m = hb.shape[1]
        H[:, off:off + m, off:off + m] = hb
        off += m
    return sq, G, H


def _exp_at(center: PositiveElement, basis, v: np.ndarray) -> PositiveElement:
    """``c^{1/2} exp(V) c^{1/2}`` for the tangent vector with coordinates ``v``."""
    blocks = []
    off = 0
    for r, B in zip(_sqrt_blocks(center), basis):
        m = B.shape[0]
        V = np.tensordot(v[off:off + m], B, axes=1)
        off += m
        lam, U = np.linalg.eigh(0.5 * (V + V.conj().T))
        blocks.append(r @ ((U * np.exp(lam)) @ U.conj().T) @ r)
    return positivize(AlgebraElement(center.algebra, blocks))


# --------------------------------------------------------------------------
# Circumcenter


def _farthest_point_phase(pts, stacked, tol, iters, history):
    a = pts[0]
    best_a, best_r = a, np.inf
    converged = False
    k = 0
    for k in range(iters):
        d = distances_from_stacked(a, stacked)
        j = int(np.argmax(d))
        if d[j] < best_r:
            best_a, best_r = a, float(d[j])
        history.append(best_r)
        step = float(d[j]) / (k + 1)
        window = len(history) > 10 and history[-11] - history[-1] < tol
        if window and step <= tol:
            converged = True
            break
        a = geodesic_eval(GeodesicSegment(a, pts[j]), 1.0 / (k + 1))
    return best_a, converged, k + 1


def _barrier_polish(center, stacked, budget, history):
    """Interior-point refinement of the minimax problem from a warm start.

    Path-following on ``t*r - sum_i log(r - d_2(c, S_i)^2)`` with Newton
    steps in tangent coordinates at the current center.  The path is
    followed until centering fails on rounding noise or the duality gap
    ``N/t`` reaches ``1e-14`` of the squared radius.  Returns
    ``(center, iterations, converged)``; converged means a centered point
    with relative gap at most ``1e-10`` was reached.
    """
    basis = tangent_basis(center.algebra)
    f, G, H = _sq_distance_model(center, stacked, basis)
    n_pts = f.shape[0]
    fmax = float(f.max())
    if fmax <= 0.0:
        return center, 0, np.full(n_pts, 1.0 / n_pts)
    r = 1.05 * fmax
    slack = r - f
    t = float(np.sum(1.0 / slack))
    iters = 0
    while iters < budget:
        centered = False
        for _ in range(50):
            if iters >= budget:
                break
            inv = 1.0 / slack
            inv2 = inv * inv
            g_v = G.T @ inv
            hvr = -(G.T @ inv2)
            D = g_v.shape[0]
            K = np.empty((D + 1, D + 1))
            K[:D, :D] = np.einsum("n,nij->ij", inv, H) + (G * inv2[:, None]).T @ G
            K[:D, D] = hvr
            K[D, :D] = hvr
            K[D, D] = inv2.sum()
            grad = np.append(g_v, t - inv.sum())
            try:
                step = -np.linalg.solve(K, grad)
            except np.linalg.LinAlgError:
                step = -np.linalg.lstsq(K, grad, rcond=None)[0]
            decrement = -float(grad @ step)
            if decrement <= 1e-10:
                centered = True
                break
            alpha = 1.0
            accepted = False
            while alpha > 1e-14:
                cand = _exp_at(center, basis, alpha * step[:D])
                r_new = r + alpha * step[D]
                cand_model = _sq_distance_model(cand, stacked, basis)
                if cand_model is not None:
                    s_new = r_new - cand_model[0]
                    if np.all(s_new > 0):
                        change = t * (r_new - r) - np.sum(np.log(s_new / slack))
                        # Near the central point a feasible full step is safe and
                        # the barrier change itself is below rounding noise.
                        if change <= -0.25 * alpha * decrement or (alpha == 1.0 and decrement < 1e-6):
                            accepted = True
                            break
                alpha *= 0.5
            iters += 1
            if not accepted:
                break
            center, r = cand, r_new
            f, G, H = cand_model
            slack = s_new
            history.append(min(history[-1] if history else np.inf, float(np.sqrt(f.max()))))
        if not centered or n_pts / t <= 1e-14 * fmax:
            break
        t *= 10.0
    return center, iters, 1.0 / (t * slack)


def _active_set_refine(center, stacked, mu, steps=8):
    """Newton iteration on the optimality system of the active constraints.

    Solves ``sum_A mu_i grad f_i = 0``, ``f_i = rho`` (``i`` in ``A``) and
    ``sum mu_i = 1`` for the points the barrier left active.  No line
    search is involved, so the iteration is not limited by rounding noise
    in the objective.  Degenerate multipliers (more active points than
    dimensions, common for symmetric sets) are handled by least squares.
    """
    basis = tangent_basis(center.algebra)
    f, G, H = _sq_distance_model(center, stacked, basis)
    fmax = float(f.max())
    weights = mu / mu.sum()
    active = np.flatnonzero((weights >= 1e-8) & (fmax - f <= 1e-6 * fmax))
    if active.size == 0:
        return center
    D = G.shape[1]
    m = active.size
    for _ in range(steps):
        lagr = np.einsum("n,nij->ij", weights[active], H[active])
        K = np.zeros((D + m + 1, D + m + 1))
        K[:D, :D] = lagr
        K[:D, D:D + m] = G[active].T
        K[D:D + m, :D] = G[active]
        K[D:D + m, D + m] = -1.0
        K[D + m, D:D + m] = 1.0
        rhs = np.concatenate([np.zeros(D), -f[active], [1.0]])
        sol = np.linalg.lstsq(K, rhs, rcond=1e-13)[0]
        dv = sol[:D]
        new_w = np.zeros_like(weights)
        new_w[active] = sol[D:D + m]
        cand = _exp_at(center, basis, dv)
        model = _sq_distance_model(cand, stacked, basis)
        if model is None:
            break
        center, (f, G, H) = cand, model
        weights = new_w
        if np.linalg.norm(dv) <= 1e-15 * max(1.0, np.sqrt(fmax)):
            break
    return center


def stationarity_residual(center: PositiveElement, stacked, rel: float = 1e-8) -> float:
    """Distance from 0 to the convex hull of ``log_c(S_i)`` over the farthest points.

    The points within ``rel`` (relative, in squared distance) of the
    farthest one are used, and the result is divided by the radius.  It is
    zero exactly at the circumcenter.
    """
    basis = tangent_basis(center.algebra)
    f, G, _ = _sq_distance_model(center, stacked, basis)
    fmax = float(f.max())
    if fmax <= 0:
        return 0.0
    near = np.flatnonzero(fmax - f <= rel * fmax)
    logs = -0.5 * G[near]
    big = 1e3 * np.sqrt(fmax)
    A = np.vstack([logs.T, np.full((1, near.size), big)])
    b = np.append(np.zeros(logs.shape[1]), big)
    mu, _ = nnls(A, b)
    return float(np.linalg.norm(logs.T @ mu) / np.sqrt(fmax))


def circumcenter(
    S: Sequence[AlgebraElement],
    tol: float = 1e-8,
    max_iter: int | None = None,
    polish: bool = True,
    warm_start: int = 100,
) -> EnclosingBall:
    """Center of the minimal enclosing ``d_2``-ball of a finite set.

    Parameters
    ----------
    S : sequence of PositiveElement
        Nonempty finite set of points of one algebra.
    tol : float
        Radius tolerance.  The farthest-point phase stops when the best
        radius improves by less than ``tol`` over 10 iterations and the
        step is at most ``tol``.
    max_iter : int, optional
        Total iteration budget, default ``50*len(S) + 1000``.
    polish : bool
        Run the interior-point polish after ``warm_start`` farthest-point
        iterations.  With ``polish=False`` the farthest-point iteration runs
        alone until its stopping rule or the budget.

    Returns
    -------
    EnclosingBall
        ``converged`` is False if the budget ran out before the stopping rule.
    """
    pts = _as_points(S)
    if max_iter is None:
        max_iter = 50 * len(pts) + 1000
    if len(pts) == 1:
        return EnclosingBall(pts[0], 0.0, 0, [0.0], True, 0)
    stacked = stack_points(pts)
    history: list[float] = []
    if polish:
        start, _, used = _farthest_point_phase(pts, stacked, tol, min(warm_start, max_iter), history)
        barrier, extra, mu = _barrier_polish(start, stacked, max_iter - used, history)
        used += extra
        refined = _active_set_refine(barrier, stacked, mu)
        res_b = stationarity_residual(barrier, stacked)
        res_r = stationarity_residual(refined, stacked)
        r_b = float(distances_from_stacked(barrier, stacked).max())
        r_r = float(distances_from_stacked(refined, stacked).max())
        if res_r <= res_b and r_r <= r_b + 1e-12 * max(r_b, 1.0):
            center, residual = refined, res_r
        else:
            center, residual = barrier, res_b
        converged = residual <= tol
    else:
        center, converged, used = _farthest_point_phase(pts, stacked, tol, max_iter, history)
    d = distances_from_stacked(center, stacked)
    j = int(np.argmax(d))
    radius = float(d[j])
    if history and radius < history[-1]:
        history.append(radius)
    return EnclosingBall(center, radius, used, history, converged, j)


# --------------------------------------------------------------------------
# Karcher mean


def _log_sum(center, stacked):
    """``sum_i log(c^{-1/2} S_i c^{-1/2})`` per block and its trace 2-norm."""
    total = []
    sq = 0.0
    for scale, s, blk in zip(center.algebra.block_scales, _inv_sqrt_blocks(center), stacked):
        w = s @ blk @ s
        lam, U = np.linalg.eigh(0.5 * (w + np.swapaxes(w, -1, -2).conj()))
        L = np.einsum("nij,nj,nkj->ik", U, np.log(lam), U.conj())
        L = 0.5 * (L + L.conj().T)
        total.append(L)
        sq += scale * float(np.vdot(L, L).real)
    return total, float(np.sqrt(sq))


def _step(center, direction, alpha):
    blocks = []
    for r, L in zip(_sqrt_blocks(center), direction):
        lam, U = np.linalg.eigh(alpha * L)
        blocks.append(r @ ((U * np.exp(lam)) @ U.conj().T) @ r)
    return positivize(AlgebraElement(center.algebra, blocks))


def karcher_mean(
    S: Sequence[AlgebraElement],
    tol: float = 1e-10,
    max_iter: int = 1000,
) -> PositiveElement:
    """Riemannian barycenter of ``S`` by the exp/log fixed-point iteration.

    ``c <- c^{1/2} exp(mean_i log(c^{-1/2} S_i c^{-1/2})) c^{1/2}``, with the
    step halved whenever the gradient norm would increase.  Stops when
    ``||sum_i log(c^{-1/2} S_i c^{-1/2})||_2 <= tol``.

    Raises
    ------
    NonConvergence
        After ``max_iter`` iterations; the best iterate is attached.
    """
    pts = _as_points(S)
    if len(pts) == 1:
        return pts[0]
    stacked = stack_points(pts)
    n = len(pts)
    c = pts[0]
    grad, gnorm = _log_sum(c, stacked)
    alpha = 1.0
    for it in range(max_iter):
        if gnorm <= tol:
            return c
        while True:
            cand = _step(c, grad, alpha / n)
            cgrad, cnorm = _log_sum(cand, stacked)
            if cnorm <= gnorm or alpha < 1e-8:
                break
            alpha *= 0.5
        if cnorm > gnorm:
            break
        c, grad, gnorm = cand, cgrad, cnorm
        alpha = min(1.0, 2.0 * alpha)
    if gnorm <= tol:
        return c
    raise NonConvergence(
        f"Karcher iteration stalled with gradient norm {gnorm:.3e} (tol {tol:g})", best=c, iterations=max_iter
    )


def karcher_gradient_norm(center: AlgebraElement, S: Sequence[AlgebraElement]) -> float:
    """The certificate ``||sum_i log(c^{-1/2} S_i c^{-1/2})||_2``."""
    pts = _as_points(S)
    return _log_sum(positivize(center), stack_points(pts))[1]
