"""Random generators and independent oracles used across the suite.

The oracles deliberately avoid the code paths they check: no Schur form, no
SVD rank cuts, no support-function numerical range.
"""
import numpy as np


def rng_for(seed):
    return np.random.default_rng(seed)


def random_complex(rng, n, m=None):
    m = n if m is None else m
    return rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))


def random_unitary(rng, n):
    q, r = np.linalg.qr(random_complex(rng, n))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_normal(rng, n, repeat=False):
    eigs = random_complex(rng, n, 1).ravel()
    if repeat and n >= 2:
        eigs[1] = eigs[0]
    u = random_unitary(rng, n)
    return u @ np.diag(eigs) @ u.conj().T


def random_idempotent(rng, n, rank):
    s = random_complex(rng, n) + 2 * np.eye(n)
    d = np.diag([1.0] * rank + [0.0] * (n - rank))
    return s @ d @ np.linalg.inv(s)


def power_iteration_norm(m, iters=5000):
    """sqrt of the top eigenvalue of m* m by plain power iteration."""
    g = m.conj().T @ m
    v = np.ones(g.shape[0], dtype=complex) / np.sqrt(g.shape[0])
    lam = 0.0
    for _ in range(iters):
        w = g @ v
        lam_new = np.linalg.norm(w)
        if lam_new == 0:
            return 0.0
        v = w / lam_new
        if abs(lam_new - lam) <= 1e-15 * lam_new:
            break
        lam = lam_new
    return float(np.sqrt(np.real(np.vdot(v, g @ v))))


def null_space_by_elimination(rows, tol=1e-12):
    """Orthogonal projector onto {x : rows @ x = 0} via Gaussian elimination."""
    a = np.array(rows, dtype=complex)
    m, n = a.shape
    pivots = []
    r = 0
    for c in range(n):
        if r == m:
            break
        p = r + int(np.argmax(np.abs(a[r:, c])))
        if abs(a[p, c]) <= tol:
            continue
        a[[r, p]] = a[[p, r]]
        a[r] /= a[r, c]
        for i in range(m):
            if i != r:
                a[i] -= a[i, c] * a[r]
        pivots.append(c)
        r += 1
    free = [c for c in range(n) if c not in pivots]
    vecs = []
    for f in free:
        x = np.zeros(n, dtype=complex)
        x[f] = 1
        for i, pc in enumerate(pivots):
            x[pc] = -a[i, f]
        vecs.append(x)
    if not vecs:
        return np.zeros((n, n), dtype=complex)
    v = np.array(vecs).T
    return v @ np.linalg.solve(v.conj().T @ v, v.conj().T)


def normal_equations_projector(cols):
    u = np.asarray(cols, dtype=complex)
    return u @ np.linalg.solve(u.conj().T @ u, u.conj().T)


def sampled_numerical_range(a, count, rng):
    """``<a v, v>`` for random unit vectors."""
    v = random_complex(rng, a.shape[0], count)
    v /= np.linalg.norm(v, axis=0)
    return np.einsum("ik,ij,jk->k", v.conj(), a, v)


def riesz_by_eigenvectors(a):
    """Rank-one spectral projections ``r l* / (l* r)`` for a diagonalizable matrix."""
    w, right = np.linalg.eig(a)
    left = np.linalg.inv(right).conj().T
    return w, [np.outer(right[:, k], left[:, k].conj()) for k in range(len(w))]
