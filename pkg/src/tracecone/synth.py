"""Random bounded-group instances with a known unitary ground truth.

A finite group is realized by unitary matrices ``u_i`` in every block and
published as ``g u_i g^{-1}`` for a hidden invertible ``g``.  The solver
never sees ``g``; it is returned separately for debugging.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np
from scipy.linalg import block_diag

from .algebra import AlgebraElement, BlockAlgebra
from .instances import Instance
from .sampling import conditioned_matrix, haar_unitary


@dataclass
class GroupModel:
    """A faithful unitary representation of a finite group in dimension ``dim``."""

    name: str
    order: int
    generators: list[np.ndarray]

    @property
    def dim(self) -> int:
        return self.generators[0].shape[0]


def _rot(angle):
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _perm_matrix(p):
    n = len(p)
    m = np.zeros((n, n), dtype=complex)
    m[list(p), range(n)] = 1.0
    return m


def cyclic(k: int) -> GroupModel:
    return GroupModel(f"cyclic-{k}", k, [np.array([[np.exp(2j * np.pi / k)]])])


def dihedral(k: int) -> GroupModel:
    return GroupModel(f"dihedral-{k}", 2 * k, [_rot(2 * np.pi / k), np.diag([1.0, -1.0]).astype(complex)])


def symmetric(k: int) -> GroupModel:
    if k == 1:
        return GroupModel("perm-1", 1, [np.eye(1, dtype=complex)])
    swap = list(range(k))
    swap[0], swap[1] = 1, 0
    cycle = [(i + 1) % k for i in range(k)]
    return GroupModel(f"perm-{k}", math.factorial(k), [_perm_matrix(swap), _perm_matrix(cycle)])


def cyclic_product(a: int, b: int) -> GroupModel:
    return GroupModel(
        f"cyclic-{a}x{b}",
        a * b,
        [np.diag([np.exp(2j * np.pi / a), 1.0]), np.diag([1.0, np.exp(2j * np.pi / b)])],
    )


def quaternion() -> GroupModel:
    return GroupModel("quaternion", 8, [np.diag([1j, -1j]), np.array([[0, 1], [-1, 0]], dtype=complex)])


def tetrahedral() -> GroupModel:
    cyc = _perm_matrix([1, 2, 0])
    return GroupModel("tetrahedral", 12, [np.diag([1.0, -1.0, -1.0]).astype(complex), cyc])


def octahedral() -> GroupModel:
    quarter = np.array([[0, -1, 0], [1, 0, 0], [0, 0, 1]], dtype=complex)
    return GroupModel("octahedral", 24, [quarter, _perm_matrix([1, 2, 0])])


def full_octahedral() -> GroupModel:
    oct_ = octahedral()
    return GroupModel("full-octahedral", 48, oct_.generators + [-np.eye(3, dtype=complex)])


def groups_of_order(n: int, max_dim: int) -> list[GroupModel]:
    """Catalogued groups of order ``n`` with a faithful representation of dimension <= ``max_dim``."""
    out = [cyclic(n)]
    for a in range(2, n):
        if n % a == 0 and a <= n // a and n // a >= 2:
            out.append(cyclic_product(a, n // a))
    if n % 2 == 0 and n // 2 >= 3:
        out.append(dihedral(n // 2))
    if n == 6:
        out.append(symmetric(3))
    if n == 8:
        out.append(quaternion())
    if n == 12:
        out.append(tetrahedral())
    if n == 24:
        out += [octahedral(), symmetric(4)]
    if n == 48:
        out.append(full_octahedral())
    return [g for g in out if g.dim <= max_dim]


def parse_group(name: str, max_dim: int, rng) -> GroupModel:
    """Resolve ``cyclic-k``, ``dihedral-k``, ``perm-k`` or ``random-unitary-order-n``."""
    m = re.fullmatch(r"(cyclic|dihedral|perm|random-unitary-order)-(\d+)", name)
    if not m:
        raise ValueError(f"unknown group {name!r}")
    kind, k = m.group(1), int(m.group(2))
    if k < 1:
        raise ValueError("group parameter must be >= 1")
    if kind == "cyclic":
        return cyclic(k)
    if kind == "dihedral":
        return dihedral(k)
    if kind == "perm":
        return symmetric(k)
    options = groups_of_order(k, max_dim)
    return options[int(rng.integers(len(options)))]


def block_representation(model: GroupModel, n: int, rng) -> tuple[list[np.ndarray], bool]:
    """Unitary images of the generators in an ``n x n`` block.

    If the block is large enough it carries the faithful representation,
    padded with copies of the trivial or determinant character; otherwise
    it carries characters only.  The result is rotated by a Haar unitary.
    Returns the matrices and whether the block is faithful.
    """
    d = model.dim
    faithful = n >= d
    pad = n - d if faithful else n
    powers = rng.integers(0, 2, size=pad)
    v = haar_unitary(n, rng)
    mats = []
    for u in model.generators:
        chars = np.linalg.det(u) ** powers
        core = [u] if faithful else []
        m = block_diag(*core, np.diag(chars)) if pad else u
        mats.append(v @ m @ v.conj().T)
    return mats, faithful


def synthesize(
    block_dims,
    group: str,
    cond: float = 1.0,
    seed=0,
    weights=None,
) -> tuple[Instance, dict]:
    """Build an instance whose generators are ``g u_i g^{-1}`` for unitary ``u_i``.

    Returns the instance and a ``hidden`` dict with the conjugator, the
    unitary generators and the group name/order.  With ``cond == 1`` the
    conjugator is unitary, so the published generators are already unitary.
    """
    rng = np.random.default_rng(seed)
    algebra = BlockAlgebra.from_dims(block_dims, weights)
    model = parse_group(group, max(algebra.block_dims), rng)
    per_block, faithful = [], []
    for n in algebra.block_dims:
        mats, ok = block_representation(model, n, rng)
        per_block.append(mats)
        faithful.append(ok)
    if model.order > 1 and not any(faithful):
        raise ValueError(
            f"{model.name} needs a block of dimension >= {model.dim} for a faithful representation"
        )
    conj = [conditioned_matrix(n, cond, rng) for n in algebra.block_dims]
    conj_inv = [np.linalg.inv(c) for c in conj]
    inst = Instance(algebra)
    unitary = []
    for i in range(len(model.generators)):
        u = [per_block[b][i] for b in range(algebra.num_blocks)]
        unitary.append(AlgebraElement(algebra, u))
        published = [c @ ub @ ci for c, ub, ci in zip(conj, u, conj_inv)]
        inst.add(f"g{i}", AlgebraElement(algebra, published), "generator")
    hidden = {
        "group": model.name,
        "order": model.order,
        "conjugator": AlgebraElement(algebra, conj),
        "unitary_generators": unitary,
    }
    return inst, hidden
