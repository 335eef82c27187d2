import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import (
    normal_equations_projector,
    null_space_by_elimination,
    power_iteration_norm,
    random_complex,
    random_unitary,
    rng_for,
)
from ncg.linop import (
    Subspace,
    Tolerances,
    adjoint,
    as_matrix,
    kernel,
    null_space,
    matrix_from_csv,
    matrix_from_json,
    matrix_to_csv,
    matrix_to_json,
    operator_norm,
    range_closure,
    spectrum,
)

seeds = st.integers(0, 2**32 - 1)
dims = st.integers(1, 8)


def test_adjoint_examples():
    np.testing.assert_array_equal(adjoint(np.eye(2)), np.eye(2))
    np.testing.assert_array_equal(adjoint([[0, 1], [0, 0]]), [[0, 0], [1, 0]])
    np.testing.assert_array_equal(adjoint([[1j, 0], [0, 0]]), [[-1j, 0], [0, 0]])


def test_operator_norm_examples():
    assert operator_norm(np.eye(3)) == pytest.approx(1.0)
    assert operator_norm([[0, 2], [0, 0]]) == pytest.approx(2.0)


def test_operator_norm_matches_power_iteration():
    m = random_complex(rng_for(5), 5)
    assert abs(operator_norm(m) - power_iteration_norm(m)) <= 1e-10


def test_spectrum_examples():
    assert spectrum([[0, 1], [0, 0]]) == [(0, 2)]
    got = spectrum(np.diag([1, 2, 3]))
    assert [m for _, m in got] == [1, 1, 1]
    np.testing.assert_allclose([z for z, _ in got], [1, 2, 3], atol=1e-12)


def test_spectrum_companion_matches_polynomial_roots():
    companion = np.array([[0, 1], [1, 0]])  # z^2 - 1
    roots = np.sort_complex(np.roots([1, 0, -1]))
    got = spectrum(companion)
    assert [m for _, m in got] == [1, 1]
    np.testing.assert_allclose([z for z, _ in got], roots, atol=1e-12)


def test_kernel_and_range_examples():
    nil = [[0, 1], [0, 0]]
    np.testing.assert_allclose(kernel(nil).projector, np.diag([1, 0]), atol=1e-14)
    np.testing.assert_allclose(range_closure(nil).projector, np.diag([1, 0]), atol=1e-14)
    assert kernel(np.eye(2)).rank == 0
    assert range_closure(np.zeros((3, 3))).rank == 0
    assert kernel(np.zeros((3, 3))).rank == 3


def test_kernel_rank_two_matches_elimination():
    rng = rng_for(11)
    u, v = random_complex(rng, 4, 2), random_complex(rng, 4, 2)
    m = u @ v.conj().T
    ker = kernel(m)
    assert ker.rank == 2
    oracle = null_space_by_elimination(v.conj().T)
    np.testing.assert_allclose(ker.projector, oracle, atol=1e-10)


def test_range_rank_three_matches_normal_equations():
    rng = rng_for(12)
    u = random_complex(rng, 5, 3)
    m = u @ random_complex(rng, 3, 5)
    rc = range_closure(m)
    assert rc.rank == 3
    np.testing.assert_allclose(rc.projector, normal_equations_projector(u), atol=1e-9)


def test_as_matrix_rejects_bad_input():
    with pytest.raises(ValueError):
        as_matrix([[1, 2, 3]])
    with pytest.raises(ValueError):
        as_matrix([[np.nan]])
    with pytest.raises(ValueError):
        as_matrix(np.zeros((65, 65)))


def test_tolerances_validated():
    with pytest.raises(ValueError):
        Tolerances(tol_eig=0.0)
    with pytest.raises(ValueError):
        Tolerances(tol_resid=0.5)


def test_matrix_json_and_csv_round_trip():
    m = random_complex(rng_for(3), 3)
    np.testing.assert_array_equal(matrix_from_json(matrix_to_json(m)), m)
    np.testing.assert_array_equal(matrix_from_csv(matrix_to_csv(m)), m)
    with pytest.raises(ValueError):
        matrix_from_json({"dim": 2, "entries": [[0, 0]]})


def test_subspace_invariance_residual():
    s = Subspace(2, np.array([[1.0], [0.0]]))
    assert s.invariance_residual([[1, 5], [0, 2]]) == 0
    assert s.invariance_residual([[0, 0], [1, 0]]) == pytest.approx(1.0)


@given(seeds, dims)
def test_adjoint_is_involutive(seed, n):
    m = random_complex(rng_for(seed), n)
    np.testing.assert_array_equal(adjoint(adjoint(m)), m)


@settings(max_examples=100)
@given(seeds, dims)
def test_cstar_identity(seed, n):
    m = random_complex(rng_for(seed), n)
    norm = operator_norm(m)
    assert abs(operator_norm(adjoint(m) @ m) - norm**2) <= 1e-9 * max(1.0, norm**2)


@settings(max_examples=50, deadline=None)
@given(seeds, dims)
def test_spectrum_unitarily_invariant(seed, n):
    rng = rng_for(seed)
    m = random_complex(rng, n)
    u = random_unitary(rng, n)
    a, b = spectrum(m), spectrum(u @ m @ u.conj().T)
    assert sum(k for _, k in a) == n
    assert [k for _, k in a] == [k for _, k in b]
    for (za, _), (zb, _) in zip(a, b):
        assert abs(za - zb) <= 1e-6 * (1 + operator_norm(m))


@settings(max_examples=50, deadline=None)
@given(seeds, st.integers(2, 8), st.data())
def test_kernel_and_range_ranks_complement(seed, n, data):
    rank = data.draw(st.integers(0, n))
    rng = rng_for(seed)
    m = random_complex(rng, n, rank) @ random_complex(rng, rank, n) if rank else np.zeros((n, n))
    assert kernel(m).rank + range_closure(m).rank == n
    assert kernel(m).orthonormality_error() <= 1e-10


def test_null_space_of_tall_system_matches_elimination():
    rng = rng_for(21)
    rows = random_complex(rng, 3, 6)
    tall = random_complex(rng, 40, 3) @ rows
    basis = null_space(tall, 1e-10)
    assert basis.shape == (6, 3)
    np.testing.assert_allclose(basis @ basis.conj().T, null_space_by_elimination(rows), atol=1e-9)
