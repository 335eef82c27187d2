"""Numerical range, finite spectral measures, and the integral formula.

Also hosts the claims audit, which runs the finite versions of the
functional-calculus statements against a given matrix and reports each one as
data instead of raising.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from .errors import MissingLabel, NonConvergence, NotNormal
from .linop import (
    DEFAULT_TOL,
    Tolerances,
    as_matrix,
    cluster_indices,
    is_normal,
    matrix_to_json,
    operator_norm,
    schur,
)


@dataclass(frozen=True, eq=False)
class FiniteSpectralMeasure:
    """Idempotents indexed by a finite label set.

    ``points`` holds the eigenvalue attached to each label. ``hermitian`` is
    recorded per idempotent and is not required to hold.
    """

    labels: tuple[str, ...]
    idempotents: tuple[np.ndarray, ...]
    points: tuple[complex, ...]
    hermitian: tuple[bool, ...] = field(default=())

    @classmethod
    def build(cls, labels, idempotents, points, tol: Tolerances = DEFAULT_TOL) -> "FiniteSpectralMeasure":
        mats = tuple(np.asarray(p, dtype=np.complex128) for p in idempotents)
        herm = tuple(hermitian_residual(p) <= tol.tol_resid for p in mats)
        return cls(tuple(labels), mats, tuple(complex(z) for z in points), herm)

    def __post_init__(self):
        if not (len(self.labels) == len(self.idempotents) == len(self.points)):
            raise ValueError("labels, idempotents and points must align")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("duplicate labels")

    def __getitem__(self, label: str) -> np.ndarray:
        try:
            return self.idempotents[self.labels.index(label)]
        except ValueError:
            raise MissingLabel(label) from None

    def point(self, label: str) -> complex:
        try:
            return self.points[self.labels.index(label)]
        except ValueError:
            raise MissingLabel(label) from None

    @property
    def dim(self) -> int:
        return self.idempotents[0].shape[0]

    def residuals(self) -> dict[str, float]:
        ps = self.idempotents
        idem = max(operator_norm(p @ p - p) for p in ps)
        annih = max(
            (operator_norm(p @ q) for i, p in enumerate(ps) for j, q in enumerate(ps) if i != j),
            default=0.0,
        )
        complete = operator_norm(sum(ps) - np.eye(self.dim))
        herm = max(hermitian_residual(p) for p in ps)
        return {"idempotency": idem, "annihilation": annih, "completeness": complete, "hermitian": herm}

    def to_json(self) -> dict:
        return {
            "labels": list(self.labels),
            "points": [[z.real, z.imag] for z in self.points],
            "hermitian": list(self.hermitian),
            "idempotents": [matrix_to_json(p) for p in self.idempotents],
        }


def hermitian_residual(p) -> float:
    """``||P - P*|| / max(1, ||P||)``."""
    p = np.asarray(p)
    return operator_norm(p - p.conj().T) / max(1.0, operator_norm(p))


def integrate(values: Mapping | Callable, E: FiniteSpectralMeasure) -> np.ndarray:
    """Finite integral ``sum_i values(y_i) E_i``.

    ``values`` maps labels to scalars or matrices; a callable is evaluated at
    each label's point instead.
    """
    n = E.dim
    out = np.zeros((n, n), dtype=np.complex128)
    for label, p, z in zip(E.labels, E.idempotents, E.points):
        if callable(values):
            v = values(z)
        else:
            if label not in values:
                raise MissingLabel(label)
            v = values[label]
        v = np.asarray(v, dtype=np.complex128)
        out += (v * p) if v.ndim == 0 else v @ p
    return out


@dataclass(frozen=True, eq=False)
class NumericalRange:
    angles: np.ndarray
    boundary: np.ndarray
    support: np.ndarray  # max of Re(e^{i theta} z) over the range, per angle

    def hull_distance(self, z: complex) -> float:
        """Distance of ``z`` outside the supporting half-planes on the angle grid."""
        rot = np.real(np.exp(1j * self.angles) * z)
        return float(max(0.0, np.max(rot - self.support)))

    @property
    def max_modulus(self) -> float:
        return float(np.max(np.abs(self.boundary)))

    def summary(self) -> dict:
        b = self.boundary
        return {
            "angle_count": len(self.angles),
            "max_modulus": self.max_modulus,
            "real_extent": [float(b.real.min()), float(b.real.max())],
            "imag_extent": [float(b.imag.min()), float(b.imag.max())],
        }

    def to_csv(self) -> str:
        lines = ["angle,re,im"]
        for t, z in zip(self.angles, self.boundary):
            lines.append(f"{t:.17g},{z.real:.17g},{z.imag:.17g}")
        return "\n".join(lines) + "\n"


def numerical_range(a, angle_count: int = 256) -> NumericalRange:
    """Boundary of ``{<a v, v> : ||v|| = 1}`` by the support-function method.

    For each angle the top eigenvector of the hermitian part of
    ``e^{i theta} a`` gives the boundary point farthest in that direction.
    """
    if angle_count < 3:
        raise ValueError("angle_count must be at least 3")
    a = as_matrix(a)
    angles = 2 * np.pi * np.arange(angle_count) / angle_count
    rot = np.exp(1j * angles)[:, None, None] * a[None]
    herm = (rot + rot.conj().transpose(0, 2, 1)) / 2
    try:
        w, v = np.linalg.eigh(herm)
    except np.linalg.LinAlgError as exc:
        raise NonConvergence(str(exc)) from exc
    top = v[:, :, -1]
    boundary = np.einsum("ki,ij,kj->k", top.conj(), a, top)
    return NumericalRange(angles, boundary, w[:, -1])


@dataclass(frozen=True)
class SigmaCheck:
    eigenvalues: tuple[complex, ...]
    distances: tuple[float, ...]
    threshold: float

    @property
    def passed(self) -> bool:
        return all(d <= self.threshold for d in self.distances)

    @property
    def worst(self) -> float:
        return max(self.distances, default=0.0)


def check_spectrum_in_sigma(a, tol: Tolerances = DEFAULT_TOL, angle_count: int = 256) -> SigmaCheck:
    a = as_matrix(a)
    t, _ = schur(a)
    eigs = np.diag(t)
    nr = numerical_range(a, angle_count)
    dists = tuple(nr.hull_distance(z) for z in eigs)
    return SigmaCheck(tuple(complex(z) for z in eigs), dists, tol.tol_resid * (1 + operator_norm(a)))


def spectral_measure_normal(a, tol: Tolerances = DEFAULT_TOL) -> FiniteSpectralMeasure:
    """Orthogonal eigenprojections of a normal matrix, one per eigenvalue cluster."""
    a = as_matrix(a)
    if not is_normal(a, tol):
        raise NotNormal("matrix is not normal within tolerance")
    t, q = schur(a)
    eigs = np.diag(t)
    clusters = cluster_indices(eigs, tol.tol_eig * (1 + operator_norm(a)))
    projs, points = [], []
    for idx in clusters:
        qc = q[:, idx]
        projs.append(qc @ qc.conj().T)
        points.append(np.mean(eigs[idx]))
    labels = [f"y{i}" for i in range(len(clusters))]
    return FiniteSpectralMeasure.build(labels, projs, points, tol)


# -- claims audit ------------------------------------------------------------

@dataclass
class Claim:
    id: str
    statement: str
    passed: bool | None
    expected: bool | None
    residual: float | None
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "statement": self.statement,
            "pass": self.passed,
            "expected": self.expected,
            "residual": self.residual,
            **self.detail,
        }


@dataclass
class ClaimsReport:
    claims: list[Claim]

    def __getitem__(self, claim_id: str) -> Claim:
        for c in self.claims:
            if c.id == claim_id:
                return c
        raise KeyError(claim_id)

    def to_json(self) -> dict:
        return {"claims": [c.to_json() for c in self.claims]}


def audit_claims(
    a,
    tol: Tolerances = DEFAULT_TOL,
    angle_count: int = 256,
    sample_count: int = 10,
    seed: int = 0,
    decomposition=None,
) -> ClaimsReport:
    """Check the finite functional-calculus claims on ``a``.

    c1  Riesz idempotents are idempotent, mutually annihilating and complete.
    c2  those idempotents are hermitian (expected only for normal ``a`` or a
        single cluster, where the one idempotent is the identity).
    c3  every eigenvalue lies in the numerical range.
    c4  ``a = sum_i j(y_i) E_i``.
    c5  the functional representation is multiplicative on C*(1, a).
    """
    from .jordan import dunford_decompose
    from .states import GENERATE_MAX_DIM, generate_algebra, hat_is_multiplicative, sample_pure_states

    a = as_matrix(a)
    n = a.shape[0]
    normal = is_normal(a, tol)
    norm_a = operator_norm(a)
    dec = decomposition if decomposition is not None else dunford_decompose(a, tol)
    E = dec.measure
    res = E.residuals()
    pscale = max(1.0, max(operator_norm(p) for p in E.idempotents))
    claims = []

    c1 = max(res["idempotency"], res["annihilation"], res["completeness"])
    claims.append(Claim(
        "c1", "spectral idempotents are idempotent, mutually annihilating, complete",
        c1 <= tol.tol_resid * pscale**2, True, c1,
    ))

    herm = [hermitian_residual(p) for p in E.idempotents]
    worst = int(np.argmax(herm))
    detail = {}
    if herm[worst] > tol.tol_resid:
        detail = {
            "non_hermitian_label": E.labels[worst],
            "non_hermitian_projection": matrix_to_json(E.idempotents[worst]),
        }
    claims.append(Claim(
        "c2", "spectral idempotents are hermitian",
        herm[worst] <= tol.tol_resid, normal or len(E.labels) == 1, herm[worst], detail,
    ))

    sig = check_spectrum_in_sigma(a, tol, angle_count)
    claims.append(Claim("c3", "spectrum lies in the numerical range", sig.passed, True, sig.worst))

    recon = integrate({b.label: b.j for b in dec.blocks}, E)
    c4 = operator_norm(a - recon) / (1 + norm_a)
    claims.append(Claim(
        "c4", "a equals the integral of j against the spectral measure",
        c4 <= tol.tol_resid * pscale, True, c4,
    ))

    if n <= GENERATE_MAX_DIM:
        alg = generate_algebra([a], tol=tol)
        states = sample_pure_states(alg, sample_count, seed, tol)
        mult = hat_is_multiplicative(alg, states, trials=10, seed=seed, tol=tol)
        claims.append(Claim(
            "c5", "functional representation is multiplicative on the generated algebra",
            mult, normal, 0.0 if mult else 1.0,
            {"algebra_dim": alg.dim, "states": len(states)},
        ))
    else:
        claims.append(Claim(
            "c5", "functional representation is multiplicative on the generated algebra",
            None, normal, None, {"skipped": f"dimension {n} above {GENERATE_MAX_DIM}"},
        ))
    return ClaimsReport(claims)
