"""Finite quantum spaces: a finite point set together with a quotient map.

The quotient map is stored as a class assignment, so the induced relation is an
equivalence relation by construction.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping


@dataclass(frozen=True)
class Block:
    class_label: str
    members: tuple[str, ...]

    @property
    def size(self) -> int:
        return len(self.members)


@dataclass(frozen=True, init=False, eq=False)
class FiniteQuantumSpace:
    points: tuple[str, ...]
    class_of: Mapping[str, str]

    def __init__(self, points: Iterable, class_of: Mapping):
        pts = tuple(sorted({str(p) for p in points}))
        classes = {str(k): str(v) for k, v in class_of.items()}
        missing = [p for p in pts if p not in classes]
        if missing:
            raise ValueError(f"class_of is not total; missing {missing}")
        extra = [k for k in classes if k not in pts]
        if extra:
            raise ValueError(f"class_of names unknown points {extra}")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "class_of", dict(sorted(classes.items())))

    def __eq__(self, other):
        if not isinstance(other, FiniteQuantumSpace):
            return NotImplemented
        return self.points == other.points and self.class_of == other.class_of

    def __hash__(self):
        return hash((self.points, tuple(self.class_of.items())))

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(sorted(set(self.class_of.values())))

    def index(self) -> dict[str, int]:
        return {p: i for i, p in enumerate(self.points)}

    @classmethod
    def diagonal(cls, points: Iterable) -> "FiniteQuantumSpace":
        pts = [str(p) for p in points]
        return cls(pts, {p: p for p in pts})

    @classmethod
    def full(cls, points: Iterable, label: str = "0") -> "FiniteQuantumSpace":
        pts = [str(p) for p in points]
        return cls(pts, {p: label for p in pts})

    @classmethod
    def from_sizes(cls, sizes: Iterable[int]) -> "FiniteQuantumSpace":
        """Space with consecutive blocks of the given sizes; points ``p00, p01, ...``."""
        sizes = list(sizes)
        width = max(2, len(str(sum(sizes))))
        cwidth = max(2, len(str(len(sizes))))
        class_of = {}
        k = 0
        for c, size in enumerate(sizes):
            for _ in range(size):
                class_of[f"p{k:0{width}d}"] = f"c{c:0{cwidth}d}"
                k += 1
        return cls(class_of.keys(), class_of)

    @classmethod
    def from_pairs(cls, points: Iterable, pairs: Iterable[tuple]) -> "FiniteQuantumSpace":
        """Rebuild a space from its relation; rejects non-equivalence relations."""
        pts = sorted({str(p) for p in points})
        rel = {(str(x), str(y)) for x, y in pairs}
        for x, y in rel:
            if x not in pts or y not in pts:
                raise ValueError(f"pair {(x, y)} leaves the point set")
        if any((p, p) not in rel for p in pts):
            raise ValueError("relation is not reflexive")
        if any((y, x) not in rel for x, y in rel):
            raise ValueError("relation is not symmetric")
        class_of = {}
        for p in pts:
            if p in class_of:
                continue
            cls_members = sorted(y for x, y in rel if x == p)
            for q in cls_members:
                if set(y for x, y in rel if x == q) != set(cls_members):
                    raise ValueError("relation is not transitive")
                class_of[q] = cls_members[0]
        return cls(pts, class_of)

    def to_json(self) -> dict:
        return {"points": list(self.points), "classes": dict(self.class_of)}

    @classmethod
    def from_json(cls, obj) -> "FiniteQuantumSpace":
        try:
            return cls(obj["points"], obj["classes"])
        except (KeyError, TypeError, AttributeError) as exc:
            raise ValueError(f"malformed quantum space JSON: {exc}") from exc


def blocks(s: FiniteQuantumSpace) -> list[Block]:
    members: dict[str, list[str]] = {}
    for p in s.points:
        members.setdefault(s.class_of[p], []).append(p)
    return [Block(label, tuple(sorted(members[label]))) for label in sorted(members)]


def relation_pairs(s: FiniteQuantumSpace) -> set[tuple[str, str]]:
    return {(x, y) for b in blocks(s) for x in b.members for y in b.members}
