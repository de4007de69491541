from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from snlab.core import (
    EXACT, HEURISTIC, INF, Budget, Estimate, Exponent, Operator, SNumberError, Space, Subspace,
    _power_ascent, adjoint, column_norms, conjugate_exponent, dist_to_subspace, dist_with_witness,
    operator_norm, quotient_operator_norm, restricted_operator_norm, sign_vectors, vector_norm,
)

GRID = [1, Fraction(4, 3), Fraction(3, 2), 2, 3, 4, "inf"]
rng0 = np.random.default_rng(0)


def brute_norm(A, p, q, samples=20000, seed=0):
    """Lower bound on ||A||_{p->q} from random points and (when cheap) cube vertices."""
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((A.shape[1], samples))
    if A.shape[1] <= 10:
        X = np.hstack([X, sign_vectors(A.shape[1]), np.eye(A.shape[1])])
    return float(np.max(column_norms(A @ X, q) / column_norms(X, p)))


# -- exponents -------------------------------------------------------------

@pytest.mark.parametrize("p", GRID)
def test_conjugate_is_an_exact_involution(p):
    e = Exponent.of(p)
    assert conjugate_exponent(conjugate_exponent(e)) == e


def test_conjugate_examples():
    assert conjugate_exponent(2) == Exponent.of(2)
    assert conjugate_exponent(1) == INF
    assert conjugate_exponent(INF) == Exponent.of(1)
    assert conjugate_exponent(4) == Exponent.of(Fraction(4, 3))


@pytest.mark.parametrize("p", GRID[:-1])
def test_conjugate_satisfies_reciprocal_identity(p):
    e = Exponent.of(p)
    c = conjugate_exponent(e)
    if e.ratio == 1:
        assert c.is_inf
    else:
        assert 1 / e.ratio + 1 / c.ratio == 1


@pytest.mark.parametrize("bad", [0.5, 0, -1, "abc"])
def test_exponent_rejects_values_below_one(bad):
    with pytest.raises(SNumberError):
        Exponent.of(bad)


def test_space_dual_and_validation():
    assert Space(3, 4).dual() == Space(3, Fraction(4, 3))
    assert Space(2, 1).dual() == Space(2, "inf")
    with pytest.raises(SNumberError):
        Space(0, 2)


# -- vector norms -------------------------------------------------------------

def test_vector_norm_examples():
    assert vector_norm([3, 4], 2) == pytest.approx(5.0, abs=1e-15)
    assert vector_norm([1, -1, 1], "inf") == 1.0
    for p in GRID:
        assert vector_norm(np.zeros(4), p) == 0.0


@pytest.mark.parametrize("p", GRID)
def test_vector_norm_triangle_and_homogeneity(p):
    rng = np.random.default_rng(1)
    X, Y = rng.standard_normal((2, 1000, 5)) * rng.exponential(1, (2, 1000, 1))
    lam = rng.standard_normal(1000)
    for x, y, a in zip(X, Y, lam):
        nx, ny = vector_norm(x, p), vector_norm(y, p)
        assert vector_norm(x + y, p) <= nx + ny + 1e-12 * (1 + nx + ny)
        assert abs(vector_norm(a * x, p) - abs(a) * nx) <= 1e-12 * (1 + abs(a) * nx)


@settings(max_examples=60, deadline=None)
@given(arrays(np.float64, 6, elements=st.floats(-1e3, 1e3)), st.sampled_from(GRID))
def test_vector_norm_monotone_in_exponent_property(x, p):
    # ||x||_p >= ||x||_inf for every p
    assert vector_norm(x, p) >= vector_norm(x, "inf") * (1 - 1e-12)


# -- operators -------------------------------------------------------------------

def test_operator_shape_validation():
    with pytest.raises(SNumberError):
        Operator(np.zeros((2, 3)), Space(2, 2), Space(2, 2))
    with pytest.raises(SNumberError):
        Operator(np.array([[np.nan]]), Space(1), Space(1))


def test_adjoint_is_involution_and_swaps_duals():
    T = Operator.from_matrix(rng0.standard_normal((2, 3)), 3, "inf")
    A = adjoint(T)
    assert A.shape == (3, 2)
    assert A.domain == Space(2, 1) and A.codomain == Space(3, Fraction(3, 2))
    B = adjoint(A)
    assert np.array_equal(B.matrix, T.matrix)
    assert B.domain == T.domain and B.codomain == T.codomain


def test_operator_norm_examples():
    e = operator_norm(Operator.from_matrix(np.eye(3)))
    assert e.value == pytest.approx(1.0, abs=1e-15) and e.direction == EXACT
    T = Operator.from_matrix([[1, -0.5], [0, 0.5]], 1, "inf")
    brute = max(np.max(np.abs(T.matrix @ (s * np.eye(2)[:, j]))) for j in range(2) for s in (1, -1))
    e = operator_norm(T)
    assert e.value == brute == 1.0 and e.direction == EXACT
    e = operator_norm(Operator.from_matrix(np.diag([3.0, 1.0])))
    assert e.value == pytest.approx(3.0, abs=1e-12) and e.direction == EXACT


def test_operator_norm_exact_paths_agree():
    rng = np.random.default_rng(2)
    for _ in range(100):
        A = rng.standard_normal(tuple(rng.integers(1, 6, size=2)))
        # p = 1 and q = inf: column formula and row formula both apply
        col = np.max(np.abs(A))
        row = np.max(column_norms(A.T, 1) * 0 + np.max(np.abs(A), axis=1))
        assert abs(operator_norm(Operator.from_matrix(A, 1, "inf")).value - col) <= 1e-12
        assert abs(col - row) <= 1e-12
        # p = inf, q = 1 through vertex enumeration matches the adjoint (q' = inf row formula)
        T = Operator.from_matrix(A, "inf", 1)
        assert abs(operator_norm(T).value - operator_norm(adjoint(T)).value) <= 1e-12
        # p = 2, q = inf: row 2-norms vs SVD-free dual evaluation
        T = Operator.from_matrix(A, 2, "inf")
        assert abs(operator_norm(T).value - np.max(np.linalg.norm(A, axis=1))) <= 1e-12


def test_heuristic_norm_is_a_lower_bound():
    rng = np.random.default_rng(3)
    for _ in range(20):
        A = rng.standard_normal((3, 4))
        # heuristic ascent on a case where a closed form exists
        for p, q in [(1, 3), (3, "inf"), (2, 2)]:
            T = Operator.from_matrix(A, p, q)
            x, _ = _power_ascent(A, T.p, T.q, Budget(16, 200))
            val = vector_norm(A @ x, q) / vector_norm(x, p)
            assert val <= operator_norm(T).value * (1 + 1e-12)
        T = Operator.from_matrix(A, 3, 4)
        est = operator_norm(T, Budget(16, 200))
        assert est.direction == HEURISTIC
        # it is a max over evaluations: no sampled point beats it (up to ascent slack)
        assert brute_norm(A, 3, 4, 5000) <= est.value * (1 + 1e-9)


def test_estimate_invariants():
    with pytest.raises(SNumberError):
        Estimate(-1.0)
    with pytest.raises(SNumberError):
        Estimate(1.0, "maybe")
    assert Estimate(-1e-14).value == 0.0


def test_norm_certificate_reproduces_value():
    rng = np.random.default_rng(4)
    for p, q in [(1, 2), (2, "inf"), (2, 2), ("inf", 3), (3, 1), (3, 4)]:
        T = Operator.from_matrix(rng.standard_normal((3, 3)), p, q)
        e = operator_norm(T, Budget(8, 100))
        x = e.certificate
        assert abs(vector_norm(T.matrix @ x, q) / vector_norm(x, p) - e.value) <= 1e-9


# -- subspaces and distances -----------------------------------------------------

def test_subspace_validation():
    S = Space(3)
    with pytest.raises(SNumberError):
        Subspace(S, np.array([[1, 2], [2, 4], [3, 6]]))
    with pytest.raises(SNumberError):
        Subspace(S, np.ones((2, 1)))
    assert Subspace.zero(S).k == 0
    assert Subspace.full(S).annihilator().k == 0
    G = Subspace(S, np.array([[1.0], [0], [0]]))
    assert G.annihilator().k == 2 and G.annihilator().ambient == S.dual()


def test_dist_examples():
    S = Space(2)
    G = Subspace(S, np.array([[1.0], [0.0]]))
    assert dist_to_subspace([1, 0], G, 2) == pytest.approx(0.0, abs=1e-15)
    assert dist_to_subspace([0, 1], G, 2) == pytest.approx(1.0, abs=1e-15)
    H = Subspace(S, np.array([[1.0], [-1.0]]))
    # 1-d line search over c in (1, 1) - c (1, -1)
    cs = np.linspace(-3, 3, 600001)
    oracle = np.min(np.maximum(np.abs(1 - cs), np.abs(1 + cs)))
    assert dist_to_subspace([1, 1], H, "inf") == pytest.approx(oracle, abs=1e-8)
    assert dist_to_subspace([2, -1], Subspace.zero(S), 3) == pytest.approx(vector_norm([2, -1], 3))


def test_dist_rejects_wrong_ambient():
    with pytest.raises(SNumberError):
        dist_to_subspace([1, 2, 3], Subspace.zero(Space(2)), 2)


def test_dist_q2_closed_form_matches_convex_solver():
    rng = np.random.default_rng(5)
    for _ in range(500):
        d = int(rng.integers(2, 6))
        k = int(rng.integers(1, d))
        B, y = rng.standard_normal((d, k)), rng.standard_normal(d)
        Q, _ = np.linalg.qr(B)
        closed = np.linalg.norm(y - Q @ (Q.T @ y))
        # generic l_q solver at q = 2 (smooth path)
        from snlab.core import _dist_smooth
        convex = _dist_smooth(y, B, Exponent.of(2))[0]
        assert abs(dist_to_subspace(y, Subspace(Space(d), B), 2) - closed) <= 1e-9
        assert abs(convex - closed) <= 1e-9


@pytest.mark.parametrize("q", [1, "inf", 3])
def test_dist_dual_witness(q):
    rng = np.random.default_rng(6)
    for _ in range(30):
        B, y = rng.standard_normal((4, 2)), rng.standard_normal(4)
        val, coef, g = dist_with_witness(y, B, q)
        assert abs(vector_norm(y - B @ coef, q) - val) <= 1e-9
        if q != 3:
            assert vector_norm(g, Exponent.of(q).conjugate()) <= 1 + 1e-8
            assert np.max(np.abs(B.T @ g)) <= 1e-8
            assert abs(g @ y - val) <= 1e-8


# -- quotient and restricted norms ------------------------------------------------

def test_quotient_examples():
    T = Operator.from_matrix(rng0.standard_normal((3, 3)), 3, 4)
    assert quotient_operator_norm(T, Subspace.zero(T.codomain), Budget(8, 100)).value == \
        operator_norm(T, Budget(8, 100)).value
    D = Operator.from_matrix(np.diag([3.0, 1.0]))
    G = Subspace(D.codomain, np.array([[1.0], [0.0]]))
    assert quotient_operator_norm(D, G).value == pytest.approx(1.0, abs=1e-12)
    T = Operator.from_matrix(rng0.standard_normal((2, 2)), 1, 2)
    assert quotient_operator_norm(T, Subspace.full(T.codomain)).value == 0.0


def test_quotient_rejects_mismatch():
    T = Operator.from_matrix(np.eye(2))
    with pytest.raises(SNumberError):
        quotient_operator_norm(T, Subspace.zero(Space(3)))
    with pytest.raises(SNumberError):
        restricted_operator_norm(T, Subspace.zero(Space(2, 1)))


def test_restricted_examples():
    D = Operator.from_matrix(np.diag([3.0, 1.0]))
    assert restricted_operator_norm(D, Subspace.full(D.domain)).value == pytest.approx(3.0)
    assert restricted_operator_norm(D, Subspace.zero(D.domain)).value == 0.0
    M = Subspace(D.domain, np.array([[0.0], [1.0]]))
    assert restricted_operator_norm(D, M).value == pytest.approx(
        max(np.linalg.norm(D.matrix @ s) for s in ([0, 1], [0, -1])), abs=1e-12)


EXPS = [1, 2, 3, "inf"]


@pytest.mark.parametrize("p", EXPS)
@pytest.mark.parametrize("q", EXPS)
def test_quotient_and_restriction_never_exceed_norm(p, q):
    rng = np.random.default_rng(7)
    b = Budget(8, 100)
    for _ in range(5):
        T = Operator.from_matrix(rng.standard_normal((3, 3)), p, q)
        nrm = operator_norm(T, b)
        G = Subspace(T.codomain, rng.standard_normal((3, 1)))
        M = Subspace(T.domain, rng.standard_normal((3, 2)))
        slack = 1e-9 if nrm.direction == EXACT else 1e-3
        assert quotient_operator_norm(T, G, b).value <= nrm.value * (1 + slack) + 1e-12
        assert restricted_operator_norm(T, M, b).value <= nrm.value * (1 + slack) + 1e-12


@pytest.mark.parametrize("p,q", [(1, 2), (2, "inf"), ("inf", 1), (1, "inf"), (2, 2)])
def test_quotient_exact_paths_match_sampling(p, q):
    rng = np.random.default_rng(8)
    for _ in range(5):
        A = rng.standard_normal((3, 3))
        T = Operator.from_matrix(A, p, q)
        G = Subspace(T.codomain, rng.standard_normal((3, 1)))
        est = quotient_operator_norm(T, G)
        X = np.hstack([rng.standard_normal((3, 300)), sign_vectors(3), np.eye(3)])
        sampled = max(dist_to_subspace(A @ x, G, q) / vector_norm(x, p) for x in X.T)
        assert sampled <= est.value * (1 + 1e-7) + 1e-9
        assert est.value <= sampled * 1.25 + 1e-9
        x = est.certificate
        assert abs(dist_to_subspace(A @ x, G, q) / vector_norm(x, p) - est.value) <= 1e-7
