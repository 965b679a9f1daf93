"""Seeded random elements: Hermitian, positive (inside a band), unitary, invertible."""

from __future__ import annotations

import numpy as np

from .algebra import AlgebraElement, BlockAlgebra, PositiveElement, positive_from_spectrum


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def haar_unitary(n: int, rng) -> np.ndarray:
    """Haar-distributed ``n x n`` unitary (QR of a complex Ginibre matrix)."""
    rng = _rng(rng)
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def conditioned_matrix(n: int, cond: float, rng) -> np.ndarray:
    """``Q1 diag(s) Q2`` with singular values log-uniform in ``[1/cond, cond]``."""
    rng = _rng(rng)
    s = np.exp(rng.uniform(-np.log(cond), np.log(cond), size=n))
    return (haar_unitary(n, rng) * s) @ haar_unitary(n, rng)


def random_hermitian(algebra: BlockAlgebra, rng, scale: float = 1.0) -> AlgebraElement:
    rng = _rng(rng)
    blocks = []
    for n in algebra.block_dims:
        z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        blocks.append(scale * 0.5 * (z + z.conj().T))
    return AlgebraElement(algebra, blocks)


def random_positive(algebra: BlockAlgebra, rng, lo: float = 1e-2, hi: float = 1e2) -> PositiveElement:
    """Random point of the band ``P_{lo,hi}``: eigenvalues log-uniform in ``[lo, hi]``."""
    rng = _rng(rng)
    vals, vecs = [], []
    for n in algebra.block_dims:
        vals.append(np.exp(rng.uniform(np.log(lo), np.log(hi), size=n)))
        vecs.append(haar_unitary(n, rng))
    return positive_from_spectrum(algebra, vals, vecs)


def random_unitary(algebra: BlockAlgebra, rng) -> AlgebraElement:
    rng = _rng(rng)
    return AlgebraElement(algebra, [haar_unitary(n, rng) for n in algebra.block_dims])


def random_invertible(algebra: BlockAlgebra, rng, cond: float = 10.0) -> AlgebraElement:
    """Random invertible element; each block has condition number at most ``cond``."""
    rng = _rng(rng)
    c = np.sqrt(cond)
    return AlgebraElement(algebra, [conditioned_matrix(n, c, rng) for n in algebra.block_dims])
