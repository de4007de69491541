import itertools

import numpy as np
import pytest

from snlab.core import (
    Budget, Operator, SNumberError, Space, Subspace, dist_to_subspace, operator_norm,
    quotient_operator_norm,
)
from snlab.schemes import (
    Scheme, SchemeLevel, check_scheme_axioms, epsilon_subspace, gen_kolmogorov_op, gen_kolmogorov_set,
    q_compactness_profile, scheme_approx_number, scheme_duality_gap,
)
from snlab.snumbers import approx_number, kolmogorov_number, svd_oracle
from snlab.zoo import OperatorSpec, make_diagonal, make_random, make_truncation_family

FAST = Budget(8, 150, seed=0)


def broken_scheme(space):
    """Level 0 is the whole space: violates {0} = Q_0."""
    def level(n):
        full = Subspace.full(space)
        return SchemeLevel(n, membership=lambda A: True, sample=lambda rng: full,
                           distance=lambda y, q: 0.0)
    return Scheme.custom(space, level, description="broken")


# -- axioms ------------------------------------------------------------------------------

@pytest.mark.parametrize("p", [2, 1, "inf"])
def test_builtin_schemes_satisfy_axioms(p):
    space = Space(4, p)
    for Q in (Scheme.subspace(space), Scheme.coordinate(space)):
        rep = check_scheme_axioms(Q, 3, 200, seed=1)
        assert rep.ok, rep.counterexamples[:2]


def test_dictionary_scheme_satisfies_axioms():
    atoms = np.array([[1, 1, 0, 0], [1, -1, 0, 0], [0, 0, 1, 1], [0, 0, 1, -1], [1, 1, 1, 1]], float).T
    assert check_scheme_axioms(Scheme.dictionary(Space(4), atoms), 3, 100).ok


def test_broken_scheme_fails_first_axiom():
    rep = check_scheme_axioms(broken_scheme(Space(3)), 2, 30)
    assert not rep.passed["GA1"]
    assert any(c["axiom"] == "GA1" and "level 0" in c["reason"] for c in rep.counterexamples)


def test_axiom_check_requires_a_level():
    with pytest.raises(SNumberError):
        check_scheme_axioms(Scheme.subspace(Space(2)), 0)


def test_scheme_config_validation():
    with pytest.raises(SNumberError):
        Scheme.from_config({"kind": "rademacher"}, Space(2))
    with pytest.raises(SNumberError):
        Scheme.from_config({"kind": "dictionary"}, Space(2))
    Q = Scheme.from_config({"kind": "dictionary", "atoms": [[1, 0], [1, 1]]}, Space(2))
    assert Q.atoms.shape == (2, 2)


def test_coordinate_level_membership():
    space = Space(3)
    lvl = Scheme.coordinate(space).level(1)
    assert lvl.membership(Subspace(space, np.eye(3)[:, [2]]))
    assert not lvl.membership(Subspace(space, np.array([[1.0], [1.0], [0.0]])))
    assert not lvl.membership(Subspace(space, np.eye(3)[:, :2]))


# -- generalized Kolmogorov numbers of sets -----------------------------------------------

def test_set_examples():
    space = Space(2)
    coord = Scheme.coordinate(space)
    # both coordinate choices leave the other basis vector at distance 1
    brute = min(max(dist_to_subspace(d, Subspace(space, np.eye(2)[:, [i]]), 2) for d in np.eye(2))
                for i in range(2))
    assert gen_kolmogorov_set(np.eye(2), coord, 1).value == pytest.approx(brute) == 1.0
    D = np.array([[1.0, 0.0], [2.0, 0.0]]).T
    assert gen_kolmogorov_set(D, coord, 1).value == 0.0
    assert gen_kolmogorov_set(D, Scheme.subspace(space), 1).value <= 1e-12
    assert gen_kolmogorov_set(np.array([[3.0, 4.0]]).T, coord, 0).value == 5.0
    assert gen_kolmogorov_set(np.zeros((2, 0)), coord, 1).value == 0.0


def test_set_number_for_l_inf_coordinates():
    D = np.array([[3.0, -1.0, 2.0], [0.5, 0.5, -4.0]]).T
    Q = Scheme.coordinate(Space(3, "inf"))
    # removing the best coordinate per level: brute force over supports
    for n in range(3):
        brute = min(max(np.max(np.abs(np.delete(d, list(S)))) if len(S) < 3 else 0.0 for d in D.T)
                    for S in itertools.combinations(range(3), n))
        assert gen_kolmogorov_set(D, Q, n).value == pytest.approx(brute, abs=1e-9)


# -- generalized Kolmogorov numbers of operators -------------------------------------------

def test_operator_examples():
    T = make_diagonal([3, 1], 2)
    assert gen_kolmogorov_op(T, Scheme.subspace(T.codomain), 1).value == pytest.approx(1.0, abs=1e-12)
    R = make_random(3, 3, 1, 3, seed=2)
    for kind in ("subspace", "coordinate"):
        assert gen_kolmogorov_op(R, kind, 0, FAST).value == pytest.approx(operator_norm(R, FAST).value)
        Z = Operator.from_matrix(np.zeros((3, 3)), 1, 3)
        assert all(gen_kolmogorov_op(Z, kind, n, FAST).value == 0.0 for n in range(3))


def test_space_mismatch():
    T = make_random(2, 2, seed=0)
    with pytest.raises(SNumberError):
        gen_kolmogorov_op(T, broken_scheme(Space(3)), 1)


def test_subspace_scheme_matches_classical_euclidean():
    rng = np.random.default_rng(3)
    for _ in range(30):
        m, n = rng.integers(1, 6, size=2)
        T = Operator.from_matrix(rng.standard_normal((m, n)))
        sv = svd_oracle(T) + [0.0] * 6
        for k in range(min(m, n) + 1):
            est = gen_kolmogorov_op(T, "subspace", k)
            assert abs(est.value - sv[k]) <= 1e-9
            assert abs(est.value - kolmogorov_number(T, k).value) <= 1e-9


@pytest.mark.parametrize("pq", [(1, "inf"), (1, 3), (2, "inf")])
def test_subspace_scheme_matches_classical_heuristic(pq):
    rng = np.random.default_rng(4)
    b = Budget(16, 200, seed=1)
    for _ in range(2 if pq[0] == 2 else 3):
        T = Operator.from_matrix(rng.standard_normal((3, 3)), *pq)
        for k in range(1, 3):
            a = gen_kolmogorov_op(T, "subspace", k, b).value
            c = kolmogorov_number(T, k, b).value
            assert abs(a - c) <= 5e-3 * max(a, c) + 1e-9


@pytest.mark.parametrize("pq", [(2, 2), (1, "inf"), ("inf", 1)])
def test_coarser_scheme_dominates(pq):
    """Coordinate levels are subspace levels, so the subspace number is never larger."""
    rng = np.random.default_rng(5)
    b = Budget(4, 100, seed=0)
    for _ in range(2):
        T = Operator.from_matrix(rng.standard_normal((3, 3)), *pq)
        for k in range(4):
            sub = gen_kolmogorov_op(T, "subspace", k, b).value
            coord = gen_kolmogorov_op(T, "coordinate", k, b).value
            assert sub <= coord * (1 + 5e-3) + 1e-9


@pytest.mark.parametrize("kind", ["subspace", "coordinate"])
def test_chain_is_non_increasing(kind):
    T = make_random(4, 4, 1, "inf", seed=6)
    vals = [gen_kolmogorov_op(T, kind, k, FAST).value for k in range(5)]
    assert vals[0] == pytest.approx(operator_norm(T).value, abs=1e-9)
    assert all(b <= a + 1e-9 for a, b in zip(vals, vals[1:]))
    assert vals[-1] == 0.0


# -- scheme approximation numbers --------------------------------------------------------------

def test_scheme_approx_examples():
    T = make_diagonal([3, 2, 1], 3)
    # enumerate all three single-row retentions
    brute = min(np.linalg.norm(T.matrix * (np.arange(3) != i)[:, None], 2) for i in range(3))
    assert scheme_approx_number(T, "coordinate", 1).value == pytest.approx(brute, abs=1e-12) == 2.0
    R = make_random(3, 4, seed=7)
    sv = svd_oracle(R) + [0.0]
    for k in range(4):
        assert abs(scheme_approx_number(R, "subspace", k).value - sv[k]) <= 1e-9
    Z = Operator.from_matrix(np.zeros((2, 2)))
    assert scheme_approx_number(Z, "coordinate", 1).value == 0.0
    with pytest.raises(SNumberError):
        scheme_approx_number(T, "coordinate", -1)


def test_coordinate_certificate_is_row_supported():
    T = make_random(4, 3, 1, 2, seed=8)
    est = scheme_approx_number(T, "coordinate", 2, FAST)
    B = est.certificate
    assert np.count_nonzero(np.any(B != 0, axis=1)) <= 2
    assert operator_norm(T.with_matrix(T.matrix - B)).value == pytest.approx(est.value, abs=1e-12)


def test_dictionary_scheme_approx_upper_bounds_classical():
    atoms = np.array([[1.0, 1.0, 0.0], [0.0, 1.0, 1.0], [1.0, 0.0, -1.0]]).T
    T = make_random(3, 3, 2, 2, seed=9)
    Q = Scheme.dictionary(T.codomain, atoms)
    for k in range(1, 3):
        assert scheme_approx_number(T, Q, k, FAST).value >= approx_number(T, k).value - 1e-9


# -- scheme duality -------------------------------------------------------------------------

def test_scheme_duality_examples():
    rep = scheme_duality_gap(make_random(3, 4, seed=10), "subspace", 3)
    assert max(rep.gaps) <= 1e-9 and rep.passed
    rep = scheme_duality_gap(Operator.from_matrix(np.zeros((3, 3)), 1, 2), "coordinate", 2, FAST)
    assert rep.gaps == [0.0, 0.0, 0.0]


@pytest.mark.parametrize("p", [2, 1, 3, "inf"])
def test_coordinate_duality_on_diagonals_is_exact(p):
    rng = np.random.default_rng(11)
    for _ in range(5):
        N = int(rng.integers(1, 7))
        T = make_diagonal(rng.standard_normal(N), N, p)
        rep = scheme_duality_gap(T, "coordinate", 3, FAST)
        assert max(rep.gaps) == 0.0


def test_custom_scheme_without_dual_rejected():
    T = make_random(3, 3, seed=12)
    with pytest.raises(SNumberError):
        scheme_duality_gap(T, broken_scheme(T.codomain), 1)


def test_declared_dictionary_dual_is_used():
    atoms = np.eye(3)
    Q = Scheme.dictionary(Space(3), atoms, dual_atoms=np.eye(3))
    T = make_diagonal([3.0, -2.0, 1.0], 3)
    rep = scheme_duality_gap(T, Q, 2, FAST)
    assert rep.passed and max(rep.gaps) <= 1e-9


# -- profiles ---------------------------------------------------------------------------------

def _family(spec, N_range):
    return make_truncation_family(OperatorSpec.from_dict(spec), N_range)


def test_harmonic_diagonal_profile_decays():
    fam = _family({"kind": "diagonal", "weights": {"form": "harmonic"}, "p": 2}, range(4, 9))
    rep = q_compactness_profile(fam, "subspace", 3, budget=FAST)
    assert rep.verdict == "decaying" and rep.chain_ok
    assert rep.limits == pytest.approx([1, 1 / 2, 1 / 3, 1 / 4], abs=1e-9)
    assert rep.classical_limits == pytest.approx(rep.limits, abs=1e-9)


def test_identity_profile_is_flat():
    fam = _family({"kind": "diagonal", "weights": {"form": "constant"}, "p": 2}, range(2, 9))
    rep = q_compactness_profile(fam, "subspace", 3, budget=FAST)
    assert rep.verdict == "non-decaying"
    assert rep.limits == pytest.approx([1, 1, 1, 1], abs=1e-3)
    adj = q_compactness_profile(fam.adjoint_family(), "subspace", 3, budget=FAST)
    assert adj.limits == pytest.approx(rep.limits, abs=1e-3) and adj.gamma == pytest.approx(rep.gamma)


def test_shift_section_second_number_is_one():
    fam = _family({"kind": "backward_shift", "weights": {"form": "constant"}, "p": 2}, range(3, 9))
    for N in fam.N_range:
        assert gen_kolmogorov_op(fam(N), "subspace", 1).value == pytest.approx(1.0, abs=1e-12)
    rep = q_compactness_profile(fam, "subspace", 2, budget=FAST)
    assert rep.verdict == "non-decaying"


def test_profile_records_inconclusive_when_tail_moves():
    fam = _family({"kind": "diagonal", "weights": {"form": "constant"}, "p": 2}, [1, 2, 3])
    rep = q_compactness_profile(fam, "subspace", 2, budget=FAST)
    assert rep.limits[2] is None and rep.verdict == "inconclusive"


# -- epsilon subspaces -------------------------------------------------------------------------

def test_epsilon_subspace_certificate():
    rng = np.random.default_rng(13)
    for t in range(5):
        T = make_diagonal(np.sort(rng.uniform(0, 1, 5))[::-1], 5)
        eps = float(rng.uniform(0.05, 0.9))
        found = epsilon_subspace(T, eps, 5)
        sv = np.diag(T.matrix)
        expected = int(np.argmax(np.append(sv, 0) < eps))
        n, G, value = found
        assert n == expected and G.k <= n and value < eps
        assert quotient_operator_norm(T, G).value == pytest.approx(value)
    assert epsilon_subspace(make_diagonal([1, 1], 2), 0.5, 1) is None
