"""Finite-dimensional finite von Neumann algebras.

Every such algebra is a direct sum of full matrix blocks
``A = M_{n_1}(C) + ... + M_{n_k}(C)`` and every faithful normalized trace on
it has the form

.. math::

    \\tau(x) = \\sum_i \\lambda_i \\, \\mathrm{tr}(x_i) / n_i,
    \\qquad \\lambda_i > 0, \\quad \\sum_i \\lambda_i = 1.

Elements are stored as tuples of complex ``(n_i, n_i)`` arrays.  Positive
invertible elements additionally carry their per-block eigendecomposition,
which every spectral function reuses.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import (
    IllConditioned,
    MalformedElement,
    NotHermitian,
    NotInvertible,
    NotPositive,
)

# Tolerances (double precision with headroom for chained spectral maps).
EPS_HERM = 1e-10
EPS_POS = 1e-12
EPS_EIG = 1e-10
KAPPA_MAX = 1e12
WEIGHT_SUM_TOL = 1e-12


@dataclass(frozen=True)
class BlockAlgebra:
    """Shape of the algebra: block sizes ``n_i`` and trace weights ``lambda_i``."""

    block_dims: tuple[int, ...]
    trace_weights: tuple[float, ...]

    def __post_init__(self):
        dims = tuple(int(n) for n in self.block_dims)
        weights = tuple(float(w) for w in self.trace_weights)
        if not dims:
            raise MalformedElement("algebra needs at least one block")
        if len(dims) != len(weights):
            raise MalformedElement("one trace weight per block is required")
        if any(n < 1 for n in dims):
            raise MalformedElement(f"block dimensions must be >= 1, got {dims}")
        if any(not w > 0 for w in weights):
            raise MalformedElement(f"trace weights must be positive (faithful trace), got {weights}")
        if abs(sum(weights) - 1.0) > WEIGHT_SUM_TOL:
            raise MalformedElement(f"trace not normalized: weights sum to {sum(weights)!r}")
        object.__setattr__(self, "block_dims", dims)
        object.__setattr__(self, "trace_weights", weights)

    @classmethod
    def matrices(cls, n: int) -> "BlockAlgebra":
        """The full matrix algebra ``M_n(C)`` with its normalized trace."""
        return cls((n,), (1.0,))

    @classmethod
    def from_dims(cls, dims: Sequence[int], weights: Sequence[float] | None = None) -> "BlockAlgebra":
        """Build an algebra; weights default to equal shares."""
        if weights is None:
            weights = [1.0 / len(dims)] * len(dims)
        return cls(tuple(dims), tuple(weights))

    @property
    def num_blocks(self) -> int:
        return len(self.block_dims)

    @property
    def real_dim(self) -> int:
        """Real dimension of the selfadjoint part (the tangent space of the cone)."""
        return sum(n * n for n in self.block_dims)

    @property
    def block_scales(self) -> tuple[float, ...]:
        """Per-block factors ``lambda_i / n_i`` of the trace."""
        return tuple(w / n for n, w in zip(self.block_dims, self.trace_weights))

    def identity(self) -> "AlgebraElement":
        return AlgebraElement(self, [np.eye(n, dtype=complex) for n in self.block_dims])

    def zeros(self) -> "AlgebraElement":
        return AlgebraElement(self, [np.zeros((n, n), dtype=complex) for n in self.block_dims])

    def element(self, blocks) -> "AlgebraElement":
        return AlgebraElement(self, blocks)

    def scalar(self, value: complex) -> "AlgebraElement":
        return AlgebraElement(self, [value * np.eye(n, dtype=complex) for n in self.block_dims])

    def diag(self, *entries) -> "AlgebraElement":
        """Diagonal element; one sequence of diagonal entries per block."""
        if len(entries) != self.num_blocks:
            raise MalformedElement("diag() needs one entry list per block")
        return AlgebraElement(self, [np.diag(np.asarray(e, dtype=complex)) for e in entries])


def _frozen(block) -> np.ndarray:
    arr = np.array(block, dtype=complex, copy=True)
    arr.setflags(write=False)
    return arr


class AlgebraElement:
    """An element of a :class:`BlockAlgebra`: one complex matrix per block.

    Supports ``+``, ``-``, scalar ``*``, the algebra product ``@`` and the
    adjoint ``.H``.  Blocks are stored read-only.
    """

    __slots__ = ("algebra", "blocks")

    def __init__(self, algebra: BlockAlgebra, blocks):
        blocks = tuple(_frozen(b) for b in blocks)
        if len(blocks) != algebra.num_blocks:
            raise MalformedElement(
                f"expected {algebra.num_blocks} blocks, got {len(blocks)}"
            )
        for i, (b, n) in enumerate(zip(blocks, algebra.block_dims)):
            if b.shape != (n, n):
                raise MalformedElement(f"block {i} has shape {b.shape}, expected {(n, n)}")
        self.algebra = algebra
        self.blocks = blocks

    def _check(self, other: "AlgebraElement"):
        if not isinstance(other, AlgebraElement):
            raise MalformedElement(f"expected an AlgebraElement, got {type(other).__name__}")
        if other.algebra != self.algebra:
            raise MalformedElement("elements belong to different algebras")

    def __add__(self, other):
        self._check(other)
        return AlgebraElement(self.algebra, [x + y for x, y in zip(self.blocks, other.blocks)])

    def __sub__(self, other):
        self._check(other)
        return AlgebraElement(self.algebra, [x - y for x, y in zip(self.blocks, other.blocks)])

    def __neg__(self):
        return AlgebraElement(self.algebra, [-x for x in self.blocks])

    def __mul__(self, scalar):
        if isinstance(scalar, AlgebraElement):
            raise TypeError("use @ for the algebra product")
        return AlgebraElement(self.algebra, [scalar * x for x in self.blocks])

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return AlgebraElement(self.algebra, [x / scalar for x in self.blocks])

    def __matmul__(self, other):
        self._check(other)
        return AlgebraElement(self.algebra, [x @ y for x, y in zip(self.blocks, other.blocks)])

    @property
    def H(self) -> "AlgebraElement":
        """The adjoint ``x*``."""
        return AlgebraElement(self.algebra, [x.conj().T for x in self.blocks])

    def inv(self) -> "AlgebraElement":
        if smallest_singular_value(self) <= EPS_POS:
            raise NotInvertible("element is not invertible")
        return AlgebraElement(self.algebra, [np.linalg.inv(x) for x in self.blocks])

    def __repr__(self):
        body = ", ".join(np.array2string(b, precision=4, suppress_small=True) for b in self.blocks)
        return f"{type(self).__name__}({body})"


class PositiveElement(AlgebraElement):
    """A certified point of the cone ``P`` of positive invertible elements.

    Construct through :func:`positivize`; the per-block eigendecomposition
    is cached in ``eigvals`` / ``eigvecs``.  A positive element lies in the
    band ``P_{c1,c2}`` iff ``c1 <= min_eig`` and ``max_eig <= c2``.
    """

    __slots__ = ("eigvals", "eigvecs", "min_eig", "max_eig")

    def __init__(self, algebra, blocks, eigvals, eigvecs):
        super().__init__(algebra, blocks)
        self.eigvals = tuple(_frozen_real(v) for v in eigvals)
        self.eigvecs = tuple(_frozen(u) for u in eigvecs)
        self.min_eig = float(min(v[0] for v in self.eigvals))
        self.max_eig = float(max(v[-1] for v in self.eigvals))
        if not self.min_eig >= EPS_POS:
            raise NotPositive(f"smallest eigenvalue {self.min_eig:.3e} is below {EPS_POS:g}")

    @property
    def element(self) -> AlgebraElement:
        """The underlying element without the positivity certificate."""
        return AlgebraElement(self.algebra, self.blocks)

    @property
    def condition(self) -> float:
        return self.max_eig / self.min_eig


def _frozen_real(v) -> np.ndarray:
    arr = np.array(v, dtype=float, copy=True)
    arr.setflags(write=False)
    return arr


# --------------------------------------------------------------------------
# Trace and norms


def trace(x: AlgebraElement) -> complex:
    """The faithful normalized trace ``tau(x)``."""
    if not isinstance(x, AlgebraElement):
        raise MalformedElement("trace() expects an AlgebraElement")
    return complex(sum(s * np.trace(b) for s, b in zip(x.algebra.block_scales, x.blocks)))


def inner(x: AlgebraElement, y: AlgebraElement) -> float:
    """Real inner product ``Re tau(x* y)``."""
    x._check(y)
    return float(
        sum(s * np.vdot(a, b).real for s, a, b in zip(x.algebra.block_scales, x.blocks, y.blocks))
    )


def norm2(x: AlgebraElement) -> float:
    """Trace 2-norm ``tau(x* x)^(1/2)``."""
    if not isinstance(x, AlgebraElement):
        raise MalformedElement("norm2() expects an AlgebraElement")
    total = sum(s * np.vdot(b, b).real for s, b in zip(x.algebra.block_scales, x.blocks))
    return float(np.sqrt(total))


def uniform_norm(x: AlgebraElement) -> float:
    """Operator norm: the largest singular value over all blocks."""
    if not isinstance(x, AlgebraElement):
        raise MalformedElement("uniform_norm() expects an AlgebraElement")
    return float(max(np.linalg.norm(b, 2) for b in x.blocks))


def smallest_singular_value(x: AlgebraElement) -> float:
    return float(min(np.linalg.svd(b, compute_uv=False)[-1] for b in x.blocks))


# --------------------------------------------------------------------------
# Hermitian eigendecomposition and spectral calculus


def is_hermitian(x: AlgebraElement, tol: float = EPS_HERM) -> bool:
    for b in x.blocks:
        scale = max(1.0, float(np.abs(b).max()))
        if np.abs(b - b.conj().T).max() > tol * scale:
            return False
    return True


def hermitian_part(x: AlgebraElement) -> AlgebraElement:
    """``(x + x*)/2``, after checking that ``x`` is Hermitian within tolerance."""
    if not is_hermitian(x):
        raise NotHermitian("element is not Hermitian within tolerance")
    return AlgebraElement(x.algebra, [0.5 * (b + b.conj().T) for b in x.blocks])


def hermitian_eig(x: AlgebraElement) -> list[tuple[np.ndarray, np.ndarray]]:
    """Per-block ``(eigenvalues ascending, unitary eigenvectors)``.

    Raises
    ------
    NotHermitian
        If some block is not Hermitian within ``EPS_HERM`` (relative).
    """
    if isinstance(x, PositiveElement):
        return list(zip(x.eigvals, x.eigvecs))
    x = hermitian_part(x)
    return [np.linalg.eigh(b) for b in x.blocks]


def _from_eigh(algebra, eigvals, eigvecs) -> list[np.ndarray]:
    blocks = []
    for v, u in zip(eigvals, eigvecs):
        b = (u * v) @ u.conj().T
        blocks.append(0.5 * (b + b.conj().T))
    return blocks


def positivize(x: AlgebraElement) -> PositiveElement:
    """Certify ``x`` as a point of the cone.

    The Hermitian part is taken (within ``EPS_HERM``) and eigendecomposed;
    the smallest eigenvalue must be at least ``EPS_POS``.
    """
    if isinstance(x, PositiveElement):
        return x
    pairs = hermitian_eig(x)
    vals = [p[0] for p in pairs]
    vecs = [p[1] for p in pairs]
    lo = min(v[0] for v in vals)
    if not lo >= EPS_POS:
        raise NotPositive(f"smallest eigenvalue {lo:.3e} is below {EPS_POS:g}")
    herm = [0.5 * (b + b.conj().T) for b in x.blocks]
    return PositiveElement(x.algebra, herm, vals, vecs)


def positive_from_spectrum(algebra: BlockAlgebra, eigvals, eigvecs) -> PositiveElement:
    """Assemble ``U diag(v) U*`` per block, keeping the decomposition as cache."""
    eigvals = [np.asarray(v, dtype=float) for v in eigvals]
    eigvecs = [np.asarray(u, dtype=complex) for u in eigvecs]
    order = [np.argsort(v) for v in eigvals]
    eigvals = [v[o] for v, o in zip(eigvals, order)]
    eigvecs = [u[:, o] for u, o in zip(eigvecs, order)]
    return PositiveElement(algebra, _from_eigh(algebra, eigvals, eigvecs), eigvals, eigvecs)


_SCALAR_FUNCS: dict[str, Callable[..., np.ndarray]] = {
    "log": np.log,
    "exp": np.exp,
    "sqrt": np.sqrt,
    "inv_sqrt": lambda v: 1.0 / np.sqrt(v),
}


def spectral_map(a: AlgebraElement, f: str, t: float | None = None) -> AlgebraElement:
    """Apply a scalar function to a positive element through its spectrum.

    Parameters
    ----------
    a : PositiveElement or AlgebraElement
        A point of the cone (non-positive elements are certified first).
        For ``f="exp"`` any Hermitian element is accepted.
    f : {"power", "log", "exp", "sqrt", "inv_sqrt"}
        The function; ``"power"`` needs the exponent ``t``.
    t : float, optional
        Exponent for ``"power"``.

    Returns
    -------
    AlgebraElement
        A :class:`PositiveElement` for every function except ``"log"``,
        whose result is Hermitian but not positive in general.
    """
    if f == "exp" and not isinstance(a, PositiveElement):
        return hermitian_exp(a)
    a = positivize(a)
    if a.condition > KAPPA_MAX:
        raise IllConditioned(f"condition number {a.condition:.3e} exceeds {KAPPA_MAX:g}")
    if f == "power":
        if t is None:
            raise ValueError("power needs an exponent t")
        func = lambda v: v ** t  # noqa: E731
    elif f in _SCALAR_FUNCS:
        func = _SCALAR_FUNCS[f]
    else:
        raise ValueError(f"unknown spectral function {f!r}")
    new_vals = [func(v) for v in a.eigvals]
    if f == "log":
        return AlgebraElement(a.algebra, _from_eigh(a.algebra, new_vals, a.eigvecs))
    return positive_from_spectrum(a.algebra, new_vals, a.eigvecs)


def hermitian_exp(x: AlgebraElement) -> PositiveElement:
    """``exp(x)`` for Hermitian ``x``; always a point of the cone."""
    pairs = hermitian_eig(x)
    return positive_from_spectrum(x.algebra, [np.exp(v) for v, _ in pairs], [u for _, u in pairs])


def sqrtm(a):
    return spectral_map(a, "sqrt")


def invsqrtm(a):
    return spectral_map(a, "inv_sqrt")


def logm(a):
    return spectral_map(a, "log")


def expm(x):
    return hermitian_exp(x)


def powm(a, t):
    return spectral_map(a, "power", t)
