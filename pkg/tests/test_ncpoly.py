"""Formal *-algebra laws, evaluation, and the block linearizations."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spectra.ncpoly import (GeneralPencil, NCPolynomial, Pencil, evaluate,
                            linearize_quadratic, pencil_evaluate,
                            selfadjoint_embed, star)

X1 = NCPolynomial.variable(1, 2)
X2 = NCPolynomial.variable(2, 2)

SINGULAR_TOL = 1e-9  # smallest-singular-value proxy for invertibility


def _coeffs():
    return st.complex_numbers(min_magnitude=0.0, max_magnitude=3.0,
                              allow_nan=False, allow_infinity=False)


def _polys(max_terms=4, max_len=3, num_vars=2):
    words = st.lists(st.integers(1, num_vars), max_size=max_len).map(tuple)
    return st.dictionaries(words, _coeffs(), max_size=max_terms).map(
        lambda d: NCPolynomial(d, num_vars))


def _rand_hermitian(rng, k):
    A = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))
    return (A + A.conj().T) / 2


# -- star ------------------------------------------------------------------

def test_star_reverses_words():
    assert star(X1 * X2) == X2 * X1


def test_star_conjugates_scalars():
    c = 2.0 - 3.0j
    p = NCPolynomial({(): c}, 1)
    assert star(p).terms[()] == np.conj(c)


def test_star_palindrome_word():
    p = NCPolynomial({(1, 2, 1): 2 + 1j}, 2)
    assert star(p) == NCPolynomial({(1, 2, 1): 2 - 1j}, 2)


@given(_polys())
@settings(max_examples=60, deadline=None)
def test_star_involution(p):
    assert star(star(p)) == p


@given(_polys(), _polys())
@settings(max_examples=60, deadline=None)
def test_star_antihomomorphism(p, q):
    assert star(p * q) == star(q) * star(p)


# -- evaluation ------------------------------------------------------------

def test_evaluate_identity_root():
    p = NCPolynomial({(1, 1): 1.0, (): -1.0}, 1)
    out = evaluate(p, [np.eye(3)])
    assert np.abs(out).max() < 1e-14


def test_evaluate_hand_product():
    p = NCPolynomial({(1, 2): 1.0}, 2)
    m1 = np.array([[0.0, 1.0], [1.0, 0.0]])
    m2 = np.array([[1.0, 0.0], [0.0, -1.0]])
    assert np.allclose(evaluate(p, [m1, m2]), [[0.0, -1.0], [1.0, 0.0]])


def test_evaluate_dimension_mismatch():
    p = X1 + X2
    with pytest.raises(ValueError):
        evaluate(p, [np.eye(2)])
    with pytest.raises(ValueError):
        evaluate(p, [np.eye(2), np.eye(3)])


@given(_polys(max_terms=3, max_len=2), _polys(max_terms=3, max_len=2))
@settings(max_examples=40, deadline=None)
def test_evaluate_is_multiplicative(p, q):
    rng = np.random.default_rng(11)
    mats = [rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
            for _ in range(2)]
    left = evaluate(p * q, mats)
    right = evaluate(p, mats) @ evaluate(q, mats)
    assert np.abs(left - right).max() < 1e-9


def test_star_evaluate_compatibility():
    rng = np.random.default_rng(2)
    mats = [_rand_hermitian(rng, 4) for _ in range(2)]
    p = NCPolynomial({(1, 2): 1 + 2j, (2,): -1.0, (): 0.5j}, 2)
    assert np.abs(evaluate(star(p), mats) - evaluate(p, mats).conj().T).max() < 1e-12


def test_free_sum_norm_matches_variance_two_semicircle():
    from spectra.sampling import SeedSpec, sample_sgrm
    n = 1000
    vals = []
    for t in range(3):
        mats = [sample_sgrm(n, 1.0 / n, SeedSpec(7, t, i)).entries for i in range(2)]
        w = np.linalg.eigvalsh(evaluate(X1 + X2, mats))
        vals.append(max(-w[0], w[-1]))
    assert abs(np.mean(vals) - 2 * np.sqrt(2)) <= 0.15


# -- pencils ----------------------------------------------------------------

def test_pencil_requires_hermitian():
    with pytest.raises(ValueError):
        Pencil([np.array([[0.0, 1.0], [0.0, 0.0]])])


def test_pencil_evaluate_r0():
    a0 = np.diag([1.0, -2.0])
    P = Pencil([a0])
    assert np.allclose(P.evaluate([]), np.kron(a0, np.eye(1)))


def test_pencil_evaluate_identity_coefficient():
    P = Pencil([np.zeros((1, 1)), np.eye(1)])
    X = _rand_hermitian(np.random.default_rng(0), 4)
    assert np.allclose(P.evaluate([X]), X)


def test_pencil_evaluate_kronecker():
    a1 = np.array([[0.0, 1.0], [1.0, 0.0]])
    P = Pencil([np.zeros((2, 2)), a1])
    X = _rand_hermitian(np.random.default_rng(1), 2)
    assert np.allclose(P.evaluate([X]), np.kron(a1, X))


# -- Step I embedding -------------------------------------------------------

def test_embed_identity_block_eigenvalues():
    P = selfadjoint_embed([np.eye(1)])
    w = np.linalg.eigvalsh(P.a[0])
    assert np.allclose(sorted(w), [-1.0, 1.0])


def test_embed_spectrum_symmetric():
    rng = np.random.default_rng(4)
    b = [rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
         for _ in range(3)]
    P = selfadjoint_embed(b)
    xs = [_rand_hermitian(rng, 3) for _ in range(2)]
    w = np.sort(np.linalg.eigvalsh(P.evaluate(xs)))
    assert np.abs(w + w[::-1]).max() < 1e-10


def test_embed_invertibility_equivalence_random():
    rng = np.random.default_rng(7)
    for _ in range(20):
        b = [rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
             for _ in range(3)]
        xs = [_rand_hermitian(rng, 3) for _ in range(2)]
        L = GeneralPencil(b).evaluate(xs)
        E = selfadjoint_embed(b).evaluate(xs)
        # determinant oracle on both sides
        lhs = abs(np.linalg.det(L)) > 1e-9
        rhs = abs(np.linalg.det(E)) > 1e-9
        assert lhs == rhs


def test_embed_singular_case():
    # rank-deficient combination stays singular after embedding
    b0 = np.array([[1.0, 0.0], [0.0, 0.0]])
    P = selfadjoint_embed([b0])
    E = P.evaluate([])
    assert np.linalg.svd(E, compute_uv=False)[-1] < SINGULAR_TOL


# -- Step II linearization ---------------------------------------------------

def test_linearize_pure_square_pattern():
    # a0 = a1 = 0, quadratic coefficient 1: pencil evaluates to [[0, -x], [x, 1]]
    L = linearize_quadratic([np.zeros((1, 1)), np.zeros((1, 1)), np.eye(1)])
    x = np.array([[1.7]])
    assert np.allclose(L.evaluate([x]), [[0.0, -1.7], [1.7, 1.0]])
    # invertible iff x != 0
    assert abs(np.linalg.det(L.evaluate([np.array([[0.0]])]))) < 1e-12
    assert abs(np.linalg.det(L.evaluate([np.array([[2.0]])]))) > 1e-9


def test_linearize_all_zero_is_singular():
    L = linearize_quadratic([np.zeros((2, 2))] * 4)
    xs = [_rand_hermitian(np.random.default_rng(3), 2) for _ in range(2)]
    S = L.evaluate(xs)
    assert np.linalg.svd(S, compute_uv=False)[-1] < SINGULAR_TOL


def _quadratic_value(a, xs):
    m = a[0].shape[0]
    n = xs[0].shape[0]
    Q = np.kron(a[0], np.eye(n))
    for ai, x in zip(a[1:-1], xs):
        Q += np.kron(ai, x)
    Q += np.kron(a[-1], sum(x @ x for x in xs))
    return Q


def _shifted_linearization(a, lam):
    # the lambda-shift of the quadratic acts on its inner a0 block only
    m = a[0].shape[0]
    return linearize_quadratic([a[0] - lam * np.eye(m)] + list(a[1:]))


def test_linearize_zero_sets_coincide():
    # the singular lambda of the quadratic are exactly the spectrum of Q;
    # check the pencil is singular exactly there and regular elsewhere
    rng = np.random.default_rng(12)
    m, r, k = 2, 2, 3
    a = [rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
         for _ in range(r + 2)]
    xs = [_rand_hermitian(rng, k) for _ in range(r)]
    Q = _quadratic_value(a, xs)
    eigs = np.linalg.eigvals(Q)
    for lam in eigs[:4]:
        S = _shifted_linearization(a, lam).evaluate(xs)
        smin = np.linalg.svd(S, compute_uv=False)[-1]
        assert smin < 1e-7
    for lam in eigs[:4] + 0.5:  # generic shifts away from the spectrum
        S = _shifted_linearization(a, lam).evaluate(xs)
        Qs = Q - lam * np.eye(Q.shape[0])
        s_pencil = np.linalg.svd(S, compute_uv=False)[-1] > SINGULAR_TOL
        s_quad = np.linalg.svd(Qs, compute_uv=False)[-1] > SINGULAR_TOL
        assert s_pencil == s_quad


def test_schur_complement_identity():
    # [[x, y], [z, 1]] invertible iff x - y z invertible, via determinants
    rng = np.random.default_rng(21)
    for k in (1, 2, 3):
        for _ in range(10):
            x = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))
            y = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))
            z = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))
            R = np.block([[x, y], [z, np.eye(k)]])
            det_big = np.linalg.det(R)
            det_small = np.linalg.det(x - y @ z)
            assert np.isclose(det_big, det_small, rtol=1e-8, atol=1e-10)


# -- misc ops ----------------------------------------------------------------

def test_degree_and_selfadjoint():
    one = NCPolynomial.one(2)
    assert one.degree() == 0
    assert (X1 * X2 * X1).degree() == 3
    assert (X1 * X2 + X2 * X1).is_selfadjoint()
    assert not (X1 * X2).is_selfadjoint()
    assert ((0 + 1j) * X1).is_selfadjoint() is False


def test_scalar_arithmetic():
    p = 2 * X1 - 1
    assert p.terms == {(1,): 2.0 + 0j, (): -1.0 + 0j}
    assert (p - p) == NCPolynomial.zero(2)
    assert (X1 ** 3).terms == {(1, 1, 1): 1.0 + 0j}


def test_zero_coefficients_pruned():
    p = NCPolynomial({(1,): 0.0, (): 2.0}, 1)
    assert (1,) not in p.terms
    q = X1 + (-1) * X1
    assert q.terms == {}
