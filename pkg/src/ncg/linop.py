"""Dense complex matrix primitives.

Every other module works on plain ``numpy`` complex arrays; :func:`as_matrix`
is the single gate that enforces squareness, finiteness and the dimension cap.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.linalg

from .errors import NonConvergence

MAX_DIM = 64


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds.

    tol_eig is a relative cluster radius for eigenvalues, tol_resid bounds
    residuals and rank cuts, tol_ortho bounds deviations from orthonormality.
    """

    tol_eig: float = 1e-6
    tol_resid: float = 1e-9
    tol_ortho: float = 1e-10

    def __post_init__(self):
        for name in ("tol_eig", "tol_resid", "tol_ortho"):
            value = getattr(self, name)
            if not (0.0 < value <= 1e-2):
                raise ValueError(f"{name} must lie in (0, 1e-2], got {value!r}")


DEFAULT_TOL = Tolerances()


def as_matrix(m) -> np.ndarray:
    """Validate ``m`` and return it as a square complex128 array."""
    arr = np.array(m, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise ValueError(f"expected a non-empty square matrix, got shape {arr.shape}")
    if arr.shape[0] > MAX_DIM:
        raise ValueError(f"dimension {arr.shape[0]} exceeds cap {MAX_DIM}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix has non-finite entries")
    return arr


@dataclass(frozen=True)
class Subspace:
    """Subspace of C^n held as an orthonormal basis (columns of ``basis``)."""

    ambient_dim: int
    basis: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=np.complex128).reshape(self.ambient_dim, -1)
        object.__setattr__(self, "basis", b)

    @property
    def rank(self) -> int:
        return self.basis.shape[1]

    @property
    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.conj().T

    def orthonormality_error(self) -> float:
        if self.rank == 0:
            return 0.0
        gram = self.basis.conj().T @ self.basis
        return float(np.max(np.abs(gram - np.eye(self.rank))))

    def invariance_residual(self, m) -> float:
        """``||(I - P_S) m P_S||``; zero iff ``m`` maps S into S."""
        m = as_matrix(m)
        p = self.projector
        return operator_norm((np.eye(self.ambient_dim) - p) @ m @ p)

    def is_trivial(self) -> bool:
        return self.rank == 0 or self.rank == self.ambient_dim

    @classmethod
    def span(cls, vectors, ambient_dim: int | None = None) -> "Subspace":
        """Orthonormalize arbitrary spanning columns (full-rank assumed)."""
        v = np.asarray(vectors, dtype=np.complex128)
        if v.ndim == 1:
            v = v[:, None]
        n = ambient_dim if ambient_dim is not None else v.shape[0]
        if v.size == 0:
            return cls(n, np.zeros((n, 0), dtype=np.complex128))
        q, _ = np.linalg.qr(v)
        return cls(n, q)


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.complex128)


def adjoint(m) -> np.ndarray:
    return as_matrix(m).conj().T


def operator_norm(m) -> float:
    """Largest singular value."""
    arr = np.asarray(m, dtype=np.complex128)
    if arr.size == 0:
        return 0.0
    return float(np.linalg.norm(arr, 2))


def schur(m) -> tuple[np.ndarray, np.ndarray]:
    """Complex Schur form ``m = Q T Q*`` with T upper triangular."""
    m = as_matrix(m)
    try:
        t, q = scipy.linalg.schur(m, output="complex")
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NonConvergence(f"Schur iteration failed: {exc}") from exc
    return t, q


def cluster_indices(values, radius: float) -> list[list[int]]:
    """Single-linkage clusters of complex ``values`` at the given radius.

    Clusters are returned sorted by the (real, imag) order of their means.
    """
    values = np.asarray(values, dtype=np.complex128)
    n = len(values)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(values[i] - values[j]) <= radius:
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    clusters = list(groups.values())
    clusters.sort(key=lambda idx: (np.mean(values[idx]).real, np.mean(values[idx]).imag))
    return clusters


def spectrum(m, tol: Tolerances = DEFAULT_TOL) -> list[tuple[complex, int]]:
    """Clustered eigenvalues with algebraic multiplicities.

    Raw eigenvalues come from the diagonal of the complex Schur form and are
    merged when within ``tol_eig * (1 + ||m||)`` of each other.
    """
    m = as_matrix(m)
    t, _ = schur(m)
    raw = np.diag(t)
    radius = tol.tol_eig * (1.0 + operator_norm(m))
    return [(complex(np.mean(raw[idx])), len(idx)) for idx in cluster_indices(raw, radius)]


def kernel(m, tol: Tolerances = DEFAULT_TOL) -> Subspace:
    m = as_matrix(m)
    n = m.shape[0]
    norm = operator_norm(m)
    if norm == 0.0:
        return Subspace(n, identity(n))
    _, s, vh = np.linalg.svd(m)
    null = s <= tol.tol_resid * norm
    return Subspace(n, vh[null].conj().T)


def range_closure(m, tol: Tolerances = DEFAULT_TOL) -> Subspace:
    m = as_matrix(m)
    n = m.shape[0]
    norm = operator_norm(m)
    if norm == 0.0:
        return Subspace(n, np.zeros((n, 0), dtype=np.complex128))
    u, s, _ = np.linalg.svd(m)
    return Subspace(n, u[:, s > tol.tol_resid * norm])


def null_space(a, rcond: float) -> np.ndarray:
    """Orthonormal basis (columns) of the null space of a possibly tall ``a``.

    Rows are compressed by QR first so that only an ``m x m`` SVD is needed;
    singular values at or below ``rcond * s_max`` count as zero.
    """
    a = np.asarray(a, dtype=np.complex128)
    m = a.shape[1]
    if a.shape[0] > m:
        a = scipy.linalg.qr(a, mode="r")[0][:m]
    _, s, vh = scipy.linalg.svd(a, full_matrices=True)
    cut = rcond * s[0] if s.size else 0.0
    rank = int(np.sum(s > cut))
    return vh[rank:].conj().T


def is_normal(m, tol: Tolerances = DEFAULT_TOL) -> bool:
    m = as_matrix(m)
    norm = operator_norm(m)
    return operator_norm(m.conj().T @ m - m @ m.conj().T) <= tol.tol_resid * norm**2


# -- serialization ----------------------------------------------------------

def matrix_to_json(m) -> dict:
    m = as_matrix(m)
    return {
        "dim": m.shape[0],
        "entries": [[float(z.real), float(z.imag)] for z in m.ravel()],
    }


def matrix_from_json(obj) -> np.ndarray:
    try:
        n = int(obj["dim"])
        entries = obj["entries"]
        if len(entries) != n * n:
            raise ValueError(f"expected {n * n} entries, got {len(entries)}")
        flat = np.array([complex(float(re), float(im)) for re, im in entries])
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed matrix JSON: {exc}") from exc
    return as_matrix(flat.reshape(n, n))


def matrix_from_csv(text: str) -> np.ndarray:
    rows = [r for r in csv.reader(text.splitlines()) if r and any(c.strip() for c in r)]
    n = len(rows)
    if n == 0:
        raise ValueError("empty CSV matrix")
    out = np.empty((n, n), dtype=np.complex128)
    for i, row in enumerate(rows):
        if len(row) != 2 * n:
            raise ValueError(f"row {i}: expected {2 * n} columns, got {len(row)}")
        vals = [float(c) for c in row]
        out[i] = np.array(vals[0::2]) + 1j * np.array(vals[1::2])
    return as_matrix(out)


def matrix_to_csv(m) -> str:
    m = as_matrix(m)
    lines = []
    for row in m:
        cells = []
        for z in row:
            cells += [repr(float(z.real)), repr(float(z.imag))]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def read_matrix(path) -> np.ndarray:
    """Load a matrix from ``.json`` or ``.csv`` (chosen by suffix)."""
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".csv":
        return matrix_from_csv(text)
    return matrix_from_json(json.loads(text))
