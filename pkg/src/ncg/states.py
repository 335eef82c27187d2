"""Finite-dimensional *-algebras, states and GNS representations.

An algebra is presented as a subalgebra of M_n through a basis that is
orthonormal for the trace inner product ``<X, Y> = tr(X* Y)``. States are
density matrices, and pure states are found through the Wedderburn block
structure of the algebra.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    CapExceeded,
    DimensionMismatch,
    EquivalenceInconsistent,
    ImpureState,
    InvalidState,
    NotInAlgebra,
)
from .linop import DEFAULT_TOL, Tolerances, cluster_indices, null_space, operator_norm
from .qspace import FiniteQuantumSpace

GENERATE_MAX_DIM = 16
# fixed seed for internal random probes (block structure, intertwiner search)
_PROBE_SEED = 20050812


@dataclass(frozen=True, eq=False)
class AlgebraPresentation:
    ambient_dim: int
    basis: np.ndarray  # (d, n, n), trace-orthonormal
    generators: tuple = ()

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def _flat(self) -> np.ndarray:
        return self.basis.reshape(self.dim, -1)

    def coefficients(self, x) -> np.ndarray:
        """Coordinates ``tr(B_i* x)`` of the orthogonal projection of ``x``."""
        x = np.asarray(x, dtype=np.complex128).reshape(-1)
        return self._flat().conj() @ x

    def element(self, coeffs) -> np.ndarray:
        return np.tensordot(np.asarray(coeffs, dtype=np.complex128), self.basis, axes=1)

    def span_residual(self, x) -> float:
        """Frobenius distance from ``x`` to the span, relative to ``max(1, ||x||_F)``."""
        x = np.asarray(x, dtype=np.complex128)
        r = x - self.element(self.coefficients(x))
        return float(np.linalg.norm(r) / max(1.0, np.linalg.norm(x)))

    def closure_residual(self) -> float:
        worst = self.span_residual(np.eye(self.ambient_dim))
        for bi in self.basis:
            worst = max(worst, self.span_residual(bi.conj().T))
            for bj in self.basis:
                worst = max(worst, self.span_residual(bi @ bj))
        return worst

    def is_commutative(self, tol: Tolerances = DEFAULT_TOL) -> bool:
        for i, bi in enumerate(self.basis):
            for bj in self.basis[i + 1:]:
                if np.linalg.norm(bi @ bj - bj @ bi) > tol.tol_resid:
                    return False
        return True

    def random_element(self, rng: np.random.Generator) -> np.ndarray:
        c = rng.standard_normal(self.dim) + 1j * rng.standard_normal(self.dim)
        return self.element(c)

    def generating_set(self) -> list[np.ndarray]:
        if self.generators:
            gens = [np.asarray(g) for g in self.generators]
            return gens + [g.conj().T for g in gens]
        return list(self.basis)

    def to_json(self) -> dict:
        from .linop import matrix_to_json

        return {
            "ambient_dim": self.ambient_dim,
            "generators": [matrix_to_json(g) for g in self.generators],
        }


def algebra_from_json(obj, tol: Tolerances = DEFAULT_TOL) -> AlgebraPresentation:
    from .linop import matrix_from_json

    try:
        n = int(obj["ambient_dim"])
        gens = [matrix_from_json(g) for g in obj.get("generators", [])]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed algebra JSON: {exc}") from exc
    return generate_algebra(gens, ambient_dim=n, tol=tol)


def generate_algebra(
    generators: Sequence, ambient_dim: int | None = None, tol: Tolerances = DEFAULT_TOL
) -> AlgebraPresentation:
    """Unital *-algebra generated by ``generators``.

    Starts from the identity and repeatedly right-multiplies the current
    orthonormal basis by the generators and their adjoints until the span
    stops growing.
    """
    gens = [np.asarray(g, dtype=np.complex128) for g in generators]
    if ambient_dim is None:
        if not gens:
            raise ValueError("ambient_dim is required when there are no generators")
        ambient_dim = gens[0].shape[0]
    n = int(ambient_dim)
    if n > GENERATE_MAX_DIM:
        raise CapExceeded(f"ambient dimension {n} exceeds {GENERATE_MAX_DIM}")
    for g in gens:
        if g.shape != (n, n):
            raise DimensionMismatch(f"generator of shape {g.shape} in M_{n}")
    star_set = gens + [g.conj().T for g in gens]

    vecs: list[np.ndarray] = []

    def add(x) -> bool:
        v = x.reshape(-1).copy()
        norm0 = np.linalg.norm(v)
        if norm0 == 0:
            return False
        for _ in range(2):
            for b in vecs:
                v -= (b.conj() @ v) * b
        norm = np.linalg.norm(v)
        if norm <= tol.tol_resid * norm0:
            return False
        if len(vecs) >= n * n:
            raise CapExceeded(f"span dimension would exceed {n * n}")
        vecs.append(v / norm)
        return True

    add(np.eye(n, dtype=np.complex128))
    frontier = list(range(len(vecs)))
    while frontier:
        new = []
        for i in frontier:
            bi = vecs[i].reshape(n, n)
            for s in star_set:
                if add(bi @ s):
                    new.append(len(vecs) - 1)
        frontier = new
    basis = np.array([v.reshape(n, n) for v in vecs])
    return AlgebraPresentation(n, basis, tuple(gens))


# -- block structure ---------------------------------------------------------

@dataclass(frozen=True, eq=False)
class WedderburnBlock:
    """One simple summand ``M_d (x) I_m`` of the algebra."""

    central_projection: np.ndarray
    subspaces: tuple  # orthonormal (n, d) bases of irreducible invariant subspaces
    irrep_dim: int
    multiplicity: int


def _commutant_basis(mats: Sequence[np.ndarray], n: int, tol: Tolerances) -> np.ndarray:
    eye = np.eye(n)
    if not mats:
        return np.eye(n * n, dtype=np.complex128).reshape(n * n, n, n)
    system = np.vstack([np.kron(eye, s.T) - np.kron(s, eye) for s in mats])
    null = null_space(system, rcond=tol.tol_resid)
    return null.T.reshape(-1, n, n)


def _eigenspaces(h: np.ndarray, tol: Tolerances) -> list[np.ndarray]:
    w, v = np.linalg.eigh(h)
    radius = tol.tol_eig * (1.0 + float(np.max(np.abs(w))))
    return [v[:, idx] for idx in cluster_indices(w, radius)]


def block_structure(a: AlgebraPresentation, tol: Tolerances = DEFAULT_TOL) -> list[WedderburnBlock]:
    """Wedderburn decomposition from central and commutant projections.

    Minimal central projections are the eigenprojections of a generic
    hermitian central element; irreducible subspaces are eigenspaces of a
    generic hermitian element of the commutant.
    """
    n = a.ambient_dim
    rng = np.random.default_rng(_PROBE_SEED)
    gens = a.generating_set()

    if gens:
        cols = np.array([(b @ s - s @ b).reshape(-1) for b in a.basis for s in gens])
        system = cols.reshape(a.dim, -1).T
        center_coeffs = null_space(system, rcond=tol.tol_resid).T
    else:
        center_coeffs = np.eye(a.dim, dtype=np.complex128)
    c = rng.standard_normal(len(center_coeffs)) @ center_coeffs
    z = a.element(c)
    central = [v @ v.conj().T for v in _eigenspaces((z + z.conj().T) / 2, tol)]

    comm = _commutant_basis(gens, n, tol)
    k = np.tensordot(rng.standard_normal(len(comm)), comm, axes=1)
    irreducibles = _eigenspaces((k + k.conj().T) / 2, tol)

    members: list[list[np.ndarray]] = [[] for _ in central]
    for f in irreducibles:
        weights = [np.linalg.norm(p @ f) for p in central]
        members[int(np.argmax(weights))].append(f)

    out = []
    for p, subs in zip(central, members):
        d = subs[0].shape[1]
        out.append(WedderburnBlock(p, tuple(subs), d, len(subs)))
    out.sort(key=lambda blk: (blk.irrep_dim, int(np.argmax(np.real(np.diag(blk.central_projection)) > 0.5))))
    return out


# -- states and GNS ----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class State:
    algebra: AlgebraPresentation
    density: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.density, dtype=np.complex128)
        object.__setattr__(self, "density", rho)
        n = self.algebra.ambient_dim
        if rho.shape != (n, n):
            raise InvalidState(f"density shape {rho.shape} does not match M_{n}")
        self.validate()

    def validate(self, tol: Tolerances = DEFAULT_TOL):
        rho = self.density
        if not np.all(np.isfinite(rho)):
            raise InvalidState("density has non-finite entries")
        if np.linalg.norm(rho - rho.conj().T) > tol.tol_resid:
            raise InvalidState("density is not hermitian")
        if np.min(np.linalg.eigvalsh((rho + rho.conj().T) / 2)) < -tol.tol_resid:
            raise InvalidState("density is not positive semidefinite")
        if abs(np.trace(rho) - 1) > tol.tol_resid:
            raise InvalidState(f"density trace {np.trace(rho).real:.6g} != 1")

    def __call__(self, x) -> complex:
        return complex(np.trace(self.density @ np.asarray(x)))

    @classmethod
    def vector(cls, algebra: AlgebraPresentation, v) -> "State":
        v = np.asarray(v, dtype=np.complex128)
        v = v / np.linalg.norm(v)
        return cls(algebra, np.outer(v, v.conj()))

    def to_json(self) -> dict:
        from .linop import matrix_to_json

        return {"density": matrix_to_json(self.density)}


def state_from_json(obj, algebra: AlgebraPresentation) -> State:
    from .linop import matrix_from_json

    try:
        return State(algebra, matrix_from_json(obj["density"]))
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed state JSON: {exc}") from exc


@dataclass(frozen=True, eq=False)
class GNSRep:
    source: State
    hilbert_dim: int
    rep: np.ndarray  # (d, r, r), image of each algebra basis element
    cyclic: np.ndarray

    def __call__(self, x) -> np.ndarray:
        c = self.source.algebra.coefficients(x)
        return np.tensordot(c, self.rep, axes=1)

    def residuals(self) -> dict[str, float]:
        alg = self.source.algebra
        r = self.hilbert_dim
        hom = star = 0.0
        for i, bi in enumerate(alg.basis):
            star = max(star, float(np.linalg.norm(self(bi.conj().T) - self.rep[i].conj().T)))
            for j, bj in enumerate(alg.basis):
                hom = max(hom, float(np.linalg.norm(self(bi @ bj) - self.rep[i] @ self.rep[j])))
        unital = float(np.linalg.norm(self(np.eye(alg.ambient_dim)) - np.eye(r)))
        state = max(
            abs(np.vdot(self.cyclic, self.rep[i] @ self.cyclic) - self.source(bi))
            for i, bi in enumerate(alg.basis)
        )
        orbit = np.array([m @ self.cyclic for m in self.rep]).T
        return {
            "homomorphism": hom,
            "star": star,
            "unital": unital,
            "state": float(state),
            "cyclic_rank_deficit": float(r - np.linalg.matrix_rank(orbit)),
        }


def gns(alpha: State, tol: Tolerances = DEFAULT_TOL) -> GNSRep:
    """GNS representation of ``alpha`` on the quotient of the algebra by its null ideal."""
    alpha.validate(tol)
    alg = alpha.algebra
    basis = alg.basis
    d = alg.dim
    flat = basis.reshape(d, -1)
    rho = alpha.density
    # gram[i, j] = alpha(B_i* B_j) = tr(rho B_i* B_j)
    gram = np.einsum("kl,ilm,jmk->ij", rho, basis.conj().transpose(0, 2, 1), basis, optimize=True)
    gram = (gram + gram.conj().T) / 2
    w, v = np.linalg.eigh(gram)
    if w[-1] <= 0:
        raise InvalidState("state Gram matrix vanishes")
    if w[0] < -tol.tol_resid * w[-1]:
        raise InvalidState("state Gram matrix is not positive")
    keep = w > tol.tol_resid * w[-1]
    lam, vr = w[keep], v[:, keep]
    to_h = np.sqrt(lam)[:, None] * vr.conj().T  # coefficient space -> Hilbert space
    from_h = vr / np.sqrt(lam)[None, :]
    rep = np.empty((d, len(lam), len(lam)), dtype=np.complex128)
    for k in range(d):
        prods = (basis[k] @ basis).reshape(d, -1)
        left_mult = flat.conj() @ prods.T  # [i, j] = coefficient of B_k B_j on B_i
        rep[k] = to_h @ left_mult @ from_h
    cyclic = to_h @ alg.coefficients(np.eye(alg.ambient_dim))
    return GNSRep(alpha, int(len(lam)), rep, cyclic)


def commutant_dim(mats, tol: Tolerances = DEFAULT_TOL) -> int:
    mats = [np.asarray(m) for m in mats]
    r = mats[0].shape[0]
    return len(_commutant_basis(mats, r, tol))


def is_irreducible(rep: GNSRep, tol: Tolerances = DEFAULT_TOL) -> bool:
    return commutant_dim(list(rep.rep), tol) == 1


def intertwiner(r1: GNSRep, r2: GNSRep, tol: Tolerances = DEFAULT_TOL, trials: int = 8):
    """Best-conditioned ``T`` with ``r1(x) T = T r2(x)``, or None.

    Random combinations of the intertwiner space are scored by the ratio of
    smallest to largest singular value; a score at or below ``tol_resid``
    counts as no invertible intertwiner.
    """
    if r1.source.algebra is not r2.source.algebra:
        a1, a2 = r1.source.algebra, r2.source.algebra
        if a1.basis.shape != a2.basis.shape or not np.allclose(a1.basis, a2.basis):
            raise ValueError("representations of different algebras")
    p, q = r1.hilbert_dim, r2.hilbert_dim
    if p != q:
        return None
    ep, eq = np.eye(p), np.eye(q)
    system = np.vstack([np.kron(m1, eq) - np.kron(ep, m2.T) for m1, m2 in zip(r1.rep, r2.rep)])
    null = null_space(system, rcond=tol.tol_resid)
    if null.shape[1] == 0:
        return None
    candidates = [null[:, k] for k in range(null.shape[1])]
    rng = np.random.default_rng(_PROBE_SEED)
    for _ in range(trials):
        c = rng.standard_normal(null.shape[1]) + 1j * rng.standard_normal(null.shape[1])
        candidates.append(null @ c)
    best, best_score = None, 0.0
    for vec in candidates:
        t = vec.reshape(p, q)
        s = np.linalg.svd(t, compute_uv=False)
        score = s[-1] / s[0] if s[0] > 0 else 0.0
        if score > best_score:
            best, best_score = t, score
    if best_score <= tol.tol_resid:
        return None
    return best


def are_equivalent(r1: GNSRep, r2: GNSRep, tol: Tolerances = DEFAULT_TOL) -> bool:
    return intertwiner(r1, r2, tol) is not None


def sample_pure_states(
    a: AlgebraPresentation, count: int, seed: int = 0, tol: Tolerances = DEFAULT_TOL
) -> list[State]:
    """Pure states drawn block by block.

    Commutative algebras return their characters exactly (at most ``count``).
    Otherwise state ``i`` is a vector state on an irreducible subspace of
    block ``i mod K``, with the vector drawn from ``seed``.
    """
    if count < 1:
        raise ValueError("count must be positive")
    struct = block_structure(a, tol)
    if all(b.irrep_dim == 1 for b in struct):
        states = [State.vector(a, b.subspaces[0][:, 0]) for b in struct[:count]]
    else:
        rng = np.random.default_rng(seed)
        states = []
        for i in range(count):
            f = struct[i % len(struct)].subspaces[0]
            w = rng.standard_normal(f.shape[1]) + 1j * rng.standard_normal(f.shape[1])
            states.append(State.vector(a, f @ w))
    for s in states:
        if not is_irreducible(gns(s, tol), tol):
            raise ImpureState("sampled state failed the irreducibility check")
    return states


def _require_in_algebra(x, a: AlgebraPresentation, tol: Tolerances):
    res = a.span_residual(x)
    if res > tol.tol_resid:
        raise NotInAlgebra(f"element lies {res:.3g} away from the algebra span")


def functional_representation(a_elem, states: Sequence[State], tol: Tolerances = DEFAULT_TOL) -> list[complex]:
    """Values ``alpha_i(a_elem)`` over the given states."""
    if states:
        _require_in_algebra(a_elem, states[0].algebra, tol)
    return [s(a_elem) for s in states]


def hat_is_multiplicative(
    a: AlgebraPresentation,
    states: Sequence[State],
    trials: int = 10,
    seed: int = 0,
    tol: Tolerances = DEFAULT_TOL,
) -> bool:
    """Whether ``alpha(xy) = alpha(x) alpha(y)`` holds for random x, y on every state."""
    if not states:
        raise ValueError("states must be nonempty")
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        x = a.random_element(rng)
        y = a.random_element(rng)
        scale = max(1.0, operator_norm(x) * operator_norm(y))
        for s in states:
            if abs(s(x @ y) - s(x) * s(y)) > tol.tol_resid * scale:
                return False
    return True


def _labels(prefix: str, count: int) -> list[str]:
    width = max(3, len(str(count)))
    return [f"{prefix}{i:0{width}d}" for i in range(count)]


def equivalence_classes(reps: Sequence[GNSRep], tol: Tolerances = DEFAULT_TOL) -> list[int]:
    """Class index per representation, verified against all pairwise tests."""
    n = len(reps)
    eq = [[i == j or are_equivalent(reps[i], reps[j], tol) for j in range(n)] for i in range(n)]
    cls = [-1] * n
    leaders = []
    for i in range(n):
        for k, lead in enumerate(leaders):
            if eq[lead][i]:
                cls[i] = k
                break
        else:
            cls[i] = len(leaders)
            leaders.append(i)
    for i in range(n):
        for j in range(n):
            if eq[i][j] != (cls[i] == cls[j]):
                raise EquivalenceInconsistent(
                    f"states {i} and {j}: pairwise test {eq[i][j]} contradicts class assignment"
                )
    return cls


def build_RA(a: AlgebraPresentation, states: Sequence[State], tol: Tolerances = DEFAULT_TOL) -> FiniteQuantumSpace:
    """Quantum space of the given pure states under GNS equivalence.

    Points are ``s000, s001, ...`` in input order; classes ``k000, ...``.
    """
    reps = [gns(s, tol) for s in states]
    for i, r in enumerate(reps):
        if not is_irreducible(r, tol):
            raise ImpureState(f"state {i} has a reducible GNS representation")
    cls = equivalence_classes(reps, tol)
    points = _labels("s", len(states))
    names = _labels("k", max(cls) + 1 if cls else 0)
    return FiniteQuantumSpace(points, {p: names[c] for p, c in zip(points, cls)})


def gns_coefficients(a_elem, a: AlgebraPresentation, states: Sequence[State], tol: Tolerances = DEFAULT_TOL):
    """Matrix coefficients ``<pi_i(x) U_ij xi_j, xi_i>`` for equivalent pairs.

    ``U_ij`` is the unitary intertwiner from the j-th to the i-th GNS space;
    its phase is arbitrary, so only moduli are meaningful off the diagonal.
    """
    _require_in_algebra(a_elem, a, tol)
    reps = [gns(s, tol) for s in states]
    for i, r in enumerate(reps):
        if not is_irreducible(r, tol):
            raise ImpureState(f"state {i} has a reducible GNS representation")
    cls = equivalence_classes(reps, tol)
    out = {}
    for i, ri in enumerate(reps):
        xi = ri(a_elem)
        for j, rj in enumerate(reps):
            if cls[i] != cls[j]:
                continue
            if i == j:
                u = np.eye(ri.hilbert_dim)
            else:
                u = intertwiner(ri, rj, tol)
                u = u / np.linalg.norm(u, 2)
            out[(i, j)] = complex(np.vdot(ri.cyclic, xi @ u @ rj.cyclic))
    return out


def support(a_elem, a: AlgebraPresentation, states: Sequence[State], tol: Tolerances = DEFAULT_TOL) -> set[tuple[int, int]]:
    """Index pairs of equivalent states where the GNS coefficient of ``a_elem`` is nonzero."""
    coeffs = gns_coefficients(a_elem, a, states, tol)
    cut = tol.tol_resid * max(1.0, operator_norm(a_elem))
    return {pair for pair, v in coeffs.items() if abs(v) > cut}
