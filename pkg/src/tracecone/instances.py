"""JSON instance and report documents.

An instance looks like::

    {
      "schema": 1,
      "algebra": {"blocks": [{"dim": 2, "weight": 1.0}]},
      "elements": {
        "h": {"role": "generator",
              "blocks": [[[[0, 0], [-2, 0]], [[0.5, 0], [0, 0]]]]}
      }
    }

Matrices are row-major and every complex entry is a ``[re, im]`` pair.
Floats are written with ``repr`` so a write/read cycle is bit-exact.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .algebra import AlgebraElement, BlockAlgebra
from .errors import TraceconeError

SCHEMA = 1
ROLES = ("generator", "point", "candidate")
INSTANCE_WEIGHT_TOL = 1e-9


class InvalidInstance(TraceconeError, ValueError):
    pass


@dataclass
class Instance:
    algebra: BlockAlgebra
    elements: dict[str, AlgebraElement] = field(default_factory=dict)
    roles: dict[str, str] = field(default_factory=dict)

    def add(self, name: str, element: AlgebraElement, role: str = "point"):
        if role not in ROLES:
            raise InvalidInstance(f"unknown role {role!r}")
        if element.algebra != self.algebra:
            raise InvalidInstance(f"element {name!r} is not in the instance algebra")
        self.elements[name] = element
        self.roles[name] = role

    def get(self, name: str) -> AlgebraElement:
        try:
            return self.elements[name]
        except KeyError:
            raise InvalidInstance(f"no element named {name!r}") from None

    def with_role(self, role: str) -> list[AlgebraElement]:
        return [e for n, e in self.elements.items() if self.roles[n] == role]

    @property
    def generators(self) -> list[AlgebraElement]:
        return self.with_role("generator")

    @property
    def points(self) -> list[AlgebraElement]:
        return self.with_role("point")


def encode_matrix(m: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m, dtype=complex)]


def decode_matrix(rows) -> np.ndarray:
    try:
        arr = np.array(rows, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InvalidInstance(f"matrix is not a grid of [re, im] pairs: {exc}") from None
    if arr.ndim != 3 or arr.shape[2] != 2 or arr.shape[0] != arr.shape[1]:
        raise InvalidInstance(f"matrix must be square with [re, im] entries, got shape {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def encode_element(x: AlgebraElement) -> list:
    return [encode_matrix(b) for b in x.blocks]


def algebra_to_dict(algebra: BlockAlgebra) -> dict:
    return {"blocks": [{"dim": n, "weight": w} for n, w in zip(algebra.block_dims, algebra.trace_weights)]}


def algebra_from_dict(data) -> BlockAlgebra:
    try:
        blocks = data["blocks"]
        dims = [int(b["dim"]) for b in blocks]
        weights = [float(b["weight"]) for b in blocks]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInstance(f"malformed algebra description: {exc!r}") from None
    if not dims:
        raise InvalidInstance("algebra has no blocks")
    if any(n < 1 for n in dims):
        raise InvalidInstance("block dimensions must be >= 1")
    if any(not (w > 0 and math.isfinite(w)) for w in weights):
        raise InvalidInstance("trace weights must be positive")
    total = math.fsum(weights)
    if abs(total - 1.0) > INSTANCE_WEIGHT_TOL:
        raise InvalidInstance(f"trace not normalized: weights sum to {total!r}")
    if total != 1.0:
        weights = [w / total for w in weights]
    return BlockAlgebra(tuple(dims), tuple(weights))


def instance_to_dict(inst: Instance) -> dict:
    return {
        "schema": SCHEMA,
        "algebra": algebra_to_dict(inst.algebra),
        "elements": {
            name: {"role": inst.roles[name], "blocks": encode_element(x)} for name, x in inst.elements.items()
        },
    }


def instance_from_dict(data) -> Instance:
    if not isinstance(data, dict):
        raise InvalidInstance("instance must be a JSON object")
    if data.get("schema", SCHEMA) != SCHEMA:
        raise InvalidInstance(f"unsupported schema {data.get('schema')!r}")
    if "algebra" not in data:
        raise InvalidInstance("instance has no algebra")
    algebra = algebra_from_dict(data["algebra"])
    inst = Instance(algebra)
    for name, entry in (data.get("elements") or {}).items():
        if not isinstance(entry, dict) or "blocks" not in entry:
            raise InvalidInstance(f"element {name!r} has no blocks")
        blocks = [decode_matrix(b) for b in entry["blocks"]]
        try:
            x = AlgebraElement(algebra, blocks)
        except ValueError as exc:
            raise InvalidInstance(f"element {name!r}: {exc}") from None
        inst.add(name, x, entry.get("role", "point"))
    return inst


def read_instance(path) -> Instance:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InvalidInstance(f"cannot read {path}: {exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInstance(f"{path} is not valid JSON: {exc}") from None
    return instance_from_dict(data)


def write_instance(inst: Instance, path) -> None:
    Path(path).write_text(json.dumps(instance_to_dict(inst), indent=1) + "\n")


def write_report(report: dict, path) -> None:
    Path(path).write_text(json.dumps(report, indent=2, default=_jsonable) + "\n")


def _jsonable(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"cannot serialize {type(obj).__name__}")
