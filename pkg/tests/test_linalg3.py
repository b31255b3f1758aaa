import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from segre_ode.errors import SchemaError, Singular
from segre_ode.linalg3 import (centralizer_dim, centralizer_report, commutator_operator,
                               hol_dim_bound, is_scalar, matrix_from_json)


def jordan(lam, sizes):
    """Block-diagonal Jordan form with one eigenvalue per block."""
    n = sum(sizes)
    J = np.zeros((n, n), complex)
    i = 0
    for l, k in zip(lam, sizes):
        J[i:i + k, i:i + k] = l * np.eye(k) + np.eye(k, k=1)
        i += k
    return J


FIXTURES = [
    (np.eye(3), 9, 8, True),
    (2 * np.eye(3), 9, 8, True),
    (np.diag([1, 1, 2]), 5, 4, False),
    (np.diag([1, 2, 3]), 3, 2, False),
    (jordan([1], [3]), 3, 2, False),
    (jordan([1, 1], [2, 1]), 5, 4, False),
    (jordan([1, 2], [2, 1]), 3, 2, False),
    (np.diag([1, np.exp(2j), np.exp(2j)]), 5, 4, False),
]


@pytest.mark.parametrize("sigma,dim,bound,ident", FIXTURES)
def test_fixtures(sigma, dim, bound, ident):
    rep = centralizer_report(sigma)
    assert (rep.dim_gl, rep.bound, rep.is_identity) == (dim, bound, ident)
    assert centralizer_dim(sigma) == dim and hol_dim_bound(sigma) == bound
    assert not rep.near_boundary


def test_commutator_operator_convention():
    rng = np.random.default_rng(0)
    s = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    X = rng.normal(size=(3, 3))
    assert np.allclose(commutator_operator(s) @ X.reshape(-1), (X @ s - s @ X).reshape(-1))


def random_conjugator(rng):
    while True:
        g = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        if np.linalg.cond(g) < 50:
            return g


@pytest.mark.parametrize("sigma,dim,bound,ident", FIXTURES)
def test_conjugation_invariance(sigma, dim, bound, ident):
    rng = np.random.default_rng(dim * 31 + bound)
    for _ in range(100):
        g = random_conjugator(rng)
        conj = g @ sigma @ np.linalg.inv(g)
        assert centralizer_dim(conj) == dim
        assert is_scalar(conj) == ident


def test_random_nonscalar_bounds():
    rng = np.random.default_rng(1)
    for k in range(1000):
        kind = k % 4
        if kind == 0:  # generic
            s = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        else:  # engineered repeated eigenvalues and Jordan blocks, conjugated
            lam = rng.normal(size=2) + 1j * rng.normal(size=2)
            base = {1: np.diag([lam[0], lam[0], lam[1]]), 2: jordan(lam, [2, 1]),
                    3: jordan(lam[:1], [3])}[kind]
            g = random_conjugator(rng)
            s = g @ base @ np.linalg.inv(g)
        if abs(np.linalg.det(s)) < 1e-3 or is_scalar(s):
            continue
        d = centralizer_dim(s)
        assert 3 <= d <= 5
        assert hol_dim_bound(s) <= 4


@settings(max_examples=50, deadline=None)
@given(st.lists(st.complex_numbers(min_magnitude=0.5, max_magnitude=3, allow_nan=False),
                min_size=3, max_size=3))
def test_lower_bound_on_jordan_fixtures(lams):
    # the polynomial algebra of sigma always commutes with it
    for sizes, lam in (([3], lams[:1]), ([2, 1], lams[:2]), ([1, 1, 1], lams)):
        assert centralizer_dim(jordan(lam, sizes)) >= 2
    assert centralizer_dim(jordan(lams[:1], [3])) >= 3


@pytest.mark.parametrize("sigma", [np.zeros((3, 3)), np.diag([1, 1, 0]),
                                   np.diag([1, 1, 1e-12])])
def test_singular(sigma):
    with pytest.raises(Singular):
        centralizer_dim(sigma)


def test_scaling_does_not_change_result():
    s = jordan([1, 2], [2, 1])
    assert centralizer_dim(1e-6 * s) == centralizer_dim(1e6 * s) == 3


def test_near_boundary_flag():
    s = np.diag([1, 1 + 3e-9, 2])
    assert centralizer_report(s).near_boundary


def test_matrix_from_json():
    m = matrix_from_json({"matrix": [[1, 0, 0], [[0, 1], 1, 0], [0, 0, [2, -1]]]})
    assert m[1, 0] == 1j and m[2, 2] == 2 - 1j
    with pytest.raises(SchemaError):
        matrix_from_json([[1, 0], [0, 1]])
