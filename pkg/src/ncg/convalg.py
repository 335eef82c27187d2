"""Convolution algebra of measures supported on a finite equivalence relation.

A measure on a finite relation is its density on pairs ``(x, y)``. Convolution
sums over the middle point, which makes the algebra isomorphic to a direct sum
of full matrix algebras, one per block of the relation.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import SpaceMismatch
from .linop import operator_norm
from .qspace import FiniteQuantumSpace, blocks, relation_pairs


@dataclass(frozen=True, init=False, eq=False)
class BlockMeasure:
    space: FiniteQuantumSpace
    weights: Mapping[tuple[str, str], complex]

    def __init__(self, space: FiniteQuantumSpace, weights: Mapping):
        rel = relation_pairs(space)
        clean = {}
        for (x, y), w in weights.items():
            key = (str(x), str(y))
            if key not in rel:
                raise ValueError(f"weight on {key} lies outside the relation")
            w = complex(w)
            if w != 0:
                clean[key] = clean.get(key, 0) + w
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "weights", dict(sorted(clean.items())))

    def __call__(self, x, y) -> complex:
        return self.weights.get((str(x), str(y)), 0j)

    def __add__(self, other):
        _check_same(self, other)
        w = dict(self.weights)
        for k, v in other.weights.items():
            w[k] = w.get(k, 0) + v
        return BlockMeasure(self.space, w)

    def scale(self, c: complex) -> "BlockMeasure":
        return BlockMeasure(self.space, {k: c * v for k, v in self.weights.items()})

    def __matmul__(self, other):
        return convolve(self, other)

    @classmethod
    def unit(cls, space: FiniteQuantumSpace) -> "BlockMeasure":
        return cls(space, {(p, p): 1.0 for p in space.points})

    @classmethod
    def random(cls, space: FiniteQuantumSpace, rng: np.random.Generator) -> "BlockMeasure":
        pairs = sorted(relation_pairs(space))
        vals = rng.standard_normal(len(pairs)) + 1j * rng.standard_normal(len(pairs))
        return cls(space, dict(zip(pairs, vals)))

    def to_json(self) -> dict:
        return {
            "space": self.space.to_json(),
            "weights": [
                {"from": x, "to": y, "re": float(w.real), "im": float(w.imag)}
                for (x, y), w in self.weights.items()
            ],
        }

    @classmethod
    def from_json(cls, obj, space: FiniteQuantumSpace | None = None) -> "BlockMeasure":
        try:
            own = FiniteQuantumSpace.from_json(obj["space"]) if "space" in obj else None
            if own is None and space is None:
                raise ValueError("measure JSON has no space")
            if own is not None and space is not None and own != space:
                raise SpaceMismatch("measure space differs from the given space")
            weights = {}
            for item in obj["weights"]:
                key = (str(item["from"]), str(item["to"]))
                weights[key] = weights.get(key, 0) + complex(
                    float(item.get("re", 0.0)), float(item.get("im", 0.0))
                )
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed measure JSON: {exc}") from exc
        return cls(own or space, weights)


def _check_same(mu: BlockMeasure, nu: BlockMeasure):
    if mu.space != nu.space:
        raise SpaceMismatch("measures live on different quantum spaces")


def convolve(mu: BlockMeasure, nu: BlockMeasure) -> BlockMeasure:
    """``(mu * nu)(x, z) = sum_y mu(x, y) nu(y, z)`` over the block of x."""
    _check_same(mu, nu)
    out = {}
    for b in blocks(mu.space):
        for x in b.members:
            for z in b.members:
                total = 0j
                for y in b.members:
                    total += mu(x, y) * nu(y, z)
                if total != 0:
                    out[(x, z)] = total
    return BlockMeasure(mu.space, out)


def involution(mu: BlockMeasure) -> BlockMeasure:
    return BlockMeasure(mu.space, {(y, x): w.conjugate() for (x, y), w in mu.weights.items()})


def to_block_matrices(mu: BlockMeasure) -> list[np.ndarray]:
    """One ``k x k`` matrix per block, rows and columns in sorted point order."""
    mats = []
    for b in blocks(mu.space):
        k = b.size
        m = np.zeros((k, k), dtype=np.complex128)
        for i, x in enumerate(b.members):
            for j, y in enumerate(b.members):
                m[i, j] = mu(x, y)
        mats.append(m)
    return mats


def from_block_matrices(space: FiniteQuantumSpace, mats) -> BlockMeasure:
    bl = blocks(space)
    if len(mats) != len(bl):
        raise ValueError(f"expected {len(bl)} block matrices, got {len(mats)}")
    weights = {}
    for b, m in zip(bl, mats):
        m = np.asarray(m, dtype=np.complex128)
        if m.shape != (b.size, b.size):
            raise ValueError(f"block {b.class_label}: expected shape {(b.size, b.size)}")
        for i, x in enumerate(b.members):
            for j, y in enumerate(b.members):
                weights[(x, y)] = m[i, j]
    return BlockMeasure(space, weights)


def cstar_norm(mu: BlockMeasure) -> float:
    return max((operator_norm(m) for m in to_block_matrices(mu)), default=0.0)


def block_dims(space: FiniteQuantumSpace) -> list[int]:
    return [b.size for b in blocks(space)]


def distance(mu: BlockMeasure, nu: BlockMeasure) -> float:
    """Largest entrywise difference between two measures on the same space."""
    _check_same(mu, nu)
    keys = set(mu.weights) | set(nu.weights)
    return max((abs(mu.weights.get(k, 0) - nu.weights.get(k, 0)) for k in keys), default=0.0)
