"""Riesz projections, the Dunford decomposition and invariant subspaces.

The Schur form is reordered so that each eigenvalue cluster occupies a
contiguous diagonal block, then block-diagonalized by a sequence of triangular
Sylvester solves. The similarity that achieves this gives every Riesz
projection and its nilpotent part at once.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import (
    ClusterInstability,
    DimensionTooSmall,
    LabelMismatch,
    PreconditionViolated,
)
from .linop import (
    DEFAULT_TOL,
    Subspace,
    Tolerances,
    as_matrix,
    cluster_indices,
    kernel,
    operator_norm,
    range_closure,
    schur,
)
from .speccalc import FiniteSpectralMeasure, hermitian_residual

MERGE_FACTOR = 10.0


def _swap(t: np.ndarray, q: np.ndarray, k: int):
    """Exchange diagonal entries k, k+1 of upper-triangular ``t`` in place."""
    t1, t2 = t[k, k], t[k + 1, k + 1]
    x = np.array([t[k, k + 1], t2 - t1])
    r = np.linalg.norm(x)
    if r == 0:
        return
    x = x / r
    g = np.array([[x[0], -np.conj(x[1])], [x[1], np.conj(x[0])]])
    t[k:k + 2, :] = g.conj().T @ t[k:k + 2, :]
    t[:, k:k + 2] = t[:, k:k + 2] @ g
    q[:, k:k + 2] = q[:, k:k + 2] @ g
    t[k + 1, k] = 0.0


def reorder_schur(t: np.ndarray, q: np.ndarray, keys) -> tuple[np.ndarray, np.ndarray, list]:
    """Bubble diagonal entries into nondecreasing ``keys`` order by Givens swaps."""
    t, q, keys = t.copy(), q.copy(), list(keys)
    n = len(keys)
    for end in range(n - 1, 0, -1):
        moved = False
        for k in range(end):
            if keys[k] > keys[k + 1]:
                _swap(t, q, k)
                keys[k], keys[k + 1] = keys[k + 1], keys[k]
                moved = True
        if not moved:
            break
    return t, q, keys


def solve_triangular_sylvester(t11: np.ndarray, t22: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve ``t11 X - X t22 = rhs`` for upper-triangular ``t11``, ``t22``."""
    p, m = rhs.shape
    x = np.zeros((p, m), dtype=np.complex128)
    eye = np.eye(p)
    for j in range(m):
        col = rhs[:, j] + x[:, :j] @ t22[:j, j]
        x[:, j] = scipy.linalg.solve_triangular(t11 - t22[j, j] * eye, col)
    return x


@dataclass(frozen=True)
class _Sorted:
    t: np.ndarray
    q: np.ndarray
    sizes: list[int]
    eigenvalues: list[complex]
    notes: list[str]


def _order_clusters(t, q, raw, clusters) -> _Sorted:
    keys = np.empty(len(raw), dtype=int)
    for c, idx in enumerate(clusters):
        keys[idx] = c
    t, q, _ = reorder_schur(t, q, keys)
    sizes = [len(idx) for idx in clusters]
    eigs = [complex(np.mean(raw[idx])) for idx in clusters]
    return _Sorted(t, q, sizes, eigs, [])


def _schur_clusters(a: np.ndarray, tol: Tolerances):
    t, q = schur(a)
    raw = np.diag(t).copy()
    scale = 1.0 + operator_norm(a)
    base = cluster_indices(raw, tol.tol_eig * scale)
    merged = cluster_indices(raw, MERGE_FACTOR * tol.tol_eig * scale)
    notes = []
    if len(merged) < len(base):
        notes.append(
            f"{len(base)} eigenvalue clusters merged into {len(merged)}: "
            f"gap below {MERGE_FACTOR:g} * tol_eig"
        )
    return t, q, raw, merged, notes


def _sorted_schur(a: np.ndarray, tol: Tolerances) -> _Sorted:
    t, q, raw, clusters, notes = _schur_clusters(a, tol)
    for msg in notes:
        warnings.warn(msg, ClusterInstability, stacklevel=3)
    srt = _order_clusters(t, q, raw, clusters)
    return _Sorted(srt.t, srt.q, srt.sizes, srt.eigenvalues, notes)


def _block_diagonalize(t: np.ndarray, sizes: list[int], bound: float):
    """Zero the off-diagonal blocks of sorted ``t``.

    Returns ``(t, y, None)`` with ``t_orig = y t y^-1``, or ``(None, None, k)``
    when the coupling ``X`` of cluster ``k`` exceeds ``bound``.
    """
    n = t.shape[0]
    t = t.copy()
    y = np.eye(n, dtype=np.complex128)
    starts = np.concatenate([[0], np.cumsum(sizes)]).astype(int)
    for k in range(len(sizes) - 1):
        s, e = starts[k], starts[k + 1]
        x = solve_triangular_sylvester(t[s:e, s:e], t[e:, e:], -t[s:e, e:])
        if not np.all(np.isfinite(x)) or np.linalg.norm(x, 2) > bound:
            return None, None, k
        t[s:e, e:] = 0.0
        y[:, e:] += y[:, s:e] @ x
    return t, y, None


@dataclass(frozen=True, eq=False)
class StronglySpectralBlock:
    label: str
    eigenvalue: complex
    projection: np.ndarray
    nilpotent: np.ndarray
    nilpotency_index: int
    hermitian: bool = False
    residuals: dict = field(default_factory=dict)

    @property
    def rank(self) -> int:
        return int(round(np.trace(self.projection).real))

    @property
    def j(self) -> np.ndarray:
        """The strongly spectral operator ``eigenvalue * P + N``."""
        return self.eigenvalue * self.projection + self.nilpotent

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "eigenvalue": [self.eigenvalue.real, self.eigenvalue.imag],
            "rank": self.rank,
            "nilpotency_index": self.nilpotency_index,
            "hermitian": self.hermitian,
            "residuals": dict(self.residuals),
        }


@dataclass(frozen=True, eq=False)
class DunfordDecomposition:
    blocks: tuple[StronglySpectralBlock, ...]
    measure: FiniteSpectralMeasure
    notes: tuple[str, ...] = ()

    def __iter__(self):
        yield self.blocks
        yield self.measure

    def reconstruct(self) -> np.ndarray:
        return sum(b.j for b in self.blocks)

    def to_json(self) -> dict:
        return {"blocks": [b.to_json() for b in self.blocks], "notes": list(self.notes)}


def _nilpotency_index(nil: np.ndarray, rank: int, bound: float, scale: float) -> int:
    power = np.eye(nil.shape[0], dtype=np.complex128)
    for k in range(1, rank + 1):
        power = power @ nil
        if operator_norm(power) <= bound * scale**k:
            return k
    return rank


def dunford_decompose(a, tol: Tolerances = DEFAULT_TOL) -> DunfordDecomposition:
    """Split ``a`` into strongly spectral pieces ``lambda_i P_i + N_i``.

    Clusters closer than ``10 * tol_eig * (1 + ||a||)`` are merged. A cluster
    whose block-diagonalizing coupling exceeds ``sqrt(tol_resid / eps)`` is
    merged with its nearest neighbour as well, since its projection could not
    be formed to ``tol_resid``. Either merge issues a
    :class:`ClusterInstability` warning and is listed in ``notes``.
    """
    a = as_matrix(a)
    n = a.shape[0]
    t0, q0, raw, clusters, notes = _schur_clusters(a, tol)
    bound = np.sqrt(tol.tol_resid / np.finfo(float).eps)
    while True:
        srt = _order_clusters(t0, q0, raw, clusters)
        t, y, bad = _block_diagonalize(srt.t, srt.sizes, bound)
        if bad is None:
            break
        means = srt.eigenvalues
        other = min((j for j in range(len(clusters)) if j != bad), key=lambda j: abs(means[j] - means[bad]))
        notes.append(
            f"cluster at {means[bad]:.6g} merged with cluster at {means[other]:.6g}: "
            f"coupling norm above {bound:.3g}"
        )
        merged = sorted(clusters[bad] + clusters[other])
        clusters = [c for j, c in enumerate(clusters) if j not in (bad, other)] + [merged]
        clusters.sort(key=lambda idx: (np.mean(raw[idx]).real, np.mean(raw[idx]).imag))
    for msg in notes:
        warnings.warn(msg, ClusterInstability, stacklevel=2)
    starts = np.concatenate([[0], np.cumsum(srt.sizes)]).astype(int)
    y_inv = scipy.linalg.solve_triangular(y, np.eye(n), unit_diagonal=True)
    left, right = srt.q @ y, y_inv @ srt.q.conj().T

    norm_a = operator_norm(a)
    blocks, projs = [], []
    for k, lam in enumerate(srt.eigenvalues):
        s, e = starts[k], starts[k + 1]
        p = left[:, s:e] @ right[s:e, :]
        nil = left[:, s:e] @ (t[s:e, s:e] - lam * np.eye(e - s)) @ right[s:e, :]
        rank = e - s
        index = _nilpotency_index(nil, rank, tol.tol_resid, 1.0 + norm_a)
        residuals = {
            "idempotency": operator_norm(p @ p - p),
            "commutation": operator_norm(a @ p - p @ a),
            "nilpotent_vs_definition": operator_norm(nil - (a - lam * np.eye(n)) @ p),
            "nilpotent_power": operator_norm(np.linalg.matrix_power(nil, rank)),
            "hermitian": hermitian_residual(p),
        }
        blocks.append(StronglySpectralBlock(
            f"y{k}", lam, p, nil, index, residuals["hermitian"] <= tol.tol_resid, residuals
        ))
        projs.append(p)
    measure = FiniteSpectralMeasure.build([b.label for b in blocks], projs, srt.eigenvalues, tol)
    return DunfordDecomposition(tuple(blocks), measure, tuple(notes))


@dataclass(frozen=True, eq=False)
class SplitPair:
    b: np.ndarray
    c: np.ndarray

    def residuals(self, a) -> dict[str, float]:
        a = np.asarray(a)
        return {
            "sum": operator_norm(a - self.b - self.c),
            "bc": operator_norm(self.b @ self.c),
            "cb": operator_norm(self.c @ self.b),
            "ab_minus_b2": operator_norm(a @ self.b - self.b @ self.b),
        }


def split(a, E: FiniteSpectralMeasure, subset) -> SplitPair:
    """``b = sum_{y in subset} a E_y`` and ``c`` the same over the complement."""
    a = as_matrix(a)
    subset = set(subset)
    unknown = subset - set(E.labels)
    if unknown:
        raise LabelMismatch(f"labels {sorted(unknown)} not in the spectral measure")
    n = a.shape[0]
    b = np.zeros((n, n), dtype=np.complex128)
    c = np.zeros((n, n), dtype=np.complex128)
    for label, p in zip(E.labels, E.idempotents):
        if label in subset:
            b += a @ p
        else:
            c += a @ p
    return SplitPair(b, c)


def common_invariant_subspace(b, c, tol: Tolerances = DEFAULT_TOL) -> tuple[Subspace, Subspace]:
    """Kernel of b and range of c, each invariant under both when ``bc = 0``."""
    b, c = as_matrix(b), as_matrix(c)
    nb, nc = operator_norm(b), operator_norm(c)
    if nb == 0 or nc == 0:
        raise PreconditionViolated("b and c must both be nonzero")
    if operator_norm(b @ c) > tol.tol_resid * nb * nc:
        raise PreconditionViolated("bc is not zero within tolerance")
    return kernel(b, tol), range_closure(c, tol)


def invariance_residuals(b, c, s1: Subspace, s2: Subspace) -> dict[str, float]:
    """Relative residuals ``||(I - P_S) x P_S|| / ||x||`` for x in {b, c}, S in {s1, s2}."""
    out = {}
    for xname, x in (("b", b), ("c", c)):
        nx = max(operator_norm(x), np.finfo(float).tiny)
        for sname, s in (("s1", s1), ("s2", s2)):
            out[f"{xname}_{sname}"] = s.invariance_residual(x) / nx
    return out


def find_invariant_subspace(a, tol: Tolerances = DEFAULT_TOL) -> tuple[Subspace, str]:
    """Nontrivial invariant subspace of ``a`` and the branch that produced it.

    ``"spectral"``: two or more clusters, range of the first Riesz projection
    (spanned by the leading Schur vectors after reordering).
    ``"nilpotent"``: one cluster, kernel of ``a - lambda``.
    ``"scalar"``: ``a = lambda I``, the first coordinate axis.
    """
    a = as_matrix(a)
    n = a.shape[0]
    if n < 2:
        raise DimensionTooSmall("need dimension at least 2")
    srt = _sorted_schur(a, tol)
    if len(srt.sizes) >= 2:
        return Subspace(n, srt.q[:, : srt.sizes[0]]), "spectral"
    lam = srt.eigenvalues[0]
    shifted = a - lam * np.eye(n)
    if operator_norm(shifted) <= tol.tol_resid * (1 + operator_norm(a)):
        return Subspace(n, np.eye(n)[:, :1]), "scalar"
    ker = kernel(shifted, tol)
    if ker.is_trivial():
        # eigenvalue error pushed the kernel below the rank cut; the leading
        # Schur vector is an eigenvector regardless
        return Subspace(n, srt.q[:, :1]), "nilpotent-schur"
    return ker, "nilpotent"


def invariant_subspace(a, tol: Tolerances = DEFAULT_TOL) -> Subspace:
    return find_invariant_subspace(a, tol)[0]


def invariant_subspace_via_split(a, tol: Tolerances = DEFAULT_TOL) -> tuple[Subspace, str]:
    """Invariant subspace through decomposition, split and the kernel/range construction.

    Picks one cluster as ``b``; with ``c = 0`` the range of its projection is
    used, otherwise the common invariant subspace S of b and c, or ``b(S)``
    when b does not vanish on S.
    """
    a = as_matrix(a)
    n = a.shape[0]
    if n < 2:
        raise DimensionTooSmall("need dimension at least 2")
    dec = dunford_decompose(a, tol)
    E = dec.measure
    if len(E.labels) < 2:
        return find_invariant_subspace(a, tol)
    norm_a = operator_norm(a)
    for label in E.labels:
        pair = split(a, E, {label})
        nb, nc = operator_norm(pair.b), operator_norm(pair.c)
        if nb <= tol.tol_resid * (1 + norm_a):
            continue
        if nc <= tol.tol_resid * (1 + norm_a):
            return range_closure(E[label], tol), "split:c=0"
        s1, _ = common_invariant_subspace(pair.b, pair.c, tol)
        image = pair.b @ s1.projector
        if operator_norm(image) > tol.tol_resid * nb:
            return range_closure(image, tol), "split:b(S)"
        return s1, "split:S"
    return find_invariant_subspace(a, tol)
