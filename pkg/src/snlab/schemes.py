"""Generalized approximation schemes.

A scheme is a nested family {0} = Q_0 c Q_1 c ... of collections of sets.
Here every set is a linear subspace (a :class:`Subspace`), and a level is
described by what can be asked of it: membership, sampling, distance from a
vector to the union of its sets and, when finite, the list of its maximal
sets.  Built-in kinds:

* ``subspace``   all subspaces of dimension <= n;
* ``coordinate`` spans of at most n standard basis vectors;
* ``dictionary`` spans of at most n atoms from a fixed list of vectors;
* ``custom``     any user function n -> SchemeLevel.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import minimize

from . import core
from ._search import MinimaxFit
from .core import (
    EXACT, HEURISTIC, UPPER, Budget, Estimate, Operator, SNumberError, Space, Subspace,
    column_norms, derive_seed, dist_with_witness, extreme_points, operator_norm,
    quotient_operator_norm, vector_norm,
)
from .snumbers import (
    DualityReport, _norm_pieces, _orth_basis, _probe_vectors, _subspace_search,
    approx_number, kolmogorov_number,
)
from .zoo import TruncationFamily

__all__ = [
    "Scheme", "SchemeLevel", "AxiomReport", "ProfileReport", "TruncationFamily",
    "check_scheme_axioms", "gen_kolmogorov_set", "gen_kolmogorov_op",
    "q_compactness_profile", "scheme_approx_number", "scheme_duality_gap",
    "epsilon_subspace",
]

SCALARS = (-2.0, -1.0, 0.5, 3.0)
ENUM_CAP = 5000
STABLE_TOL = 1e-3
DECAY_RATIO = 0.5


# --------------------------------------------------------------------------
# levels and schemes
# --------------------------------------------------------------------------


@dataclass
class SchemeLevel:
    """The n-th level of a scheme.

    ``candidates`` returns the maximal sets of the level when there are
    finitely many of them, else None.
    """

    n: int
    membership: Callable[[Subspace], bool]
    sample: Callable[[np.random.Generator], Subspace]
    distance: Callable[[np.ndarray, object], float]
    candidates: Callable[[], list] | None = None


def _is_zero(A: Subspace) -> bool:
    return A.k == 0


def _random_subspace(space: Space, k: int, rng) -> Subspace:
    if k == 0:
        return Subspace.zero(space)
    return Subspace(space, np.linalg.qr(rng.standard_normal((space.dim, k)))[0])


def _coordinate_support(A: Subspace, tol: float = 1e-9):
    """Support S if A = span{e_i : i in S}, else None."""
    d = np.diag(A.projector())
    if A.k == 0:
        return ()
    P = A.projector()
    S = tuple(int(i) for i in np.flatnonzero(d > 0.5))
    E = np.zeros_like(P)
    E[S, S] = 1.0
    return S if len(S) == A.k and np.max(np.abs(P - E)) <= tol else None


def _coordinate_span(space: Space, S) -> Subspace:
    return Subspace(space, np.eye(space.dim)[:, list(S)])


def _trailing_norm(y, n: int, q) -> float:
    """Norm of y with its n largest entries (in modulus) removed."""
    a = np.sort(np.abs(np.asarray(y, dtype=float)))
    return vector_norm(a[: max(a.size - n, 0)], q)


def _subsets(K: int, n: int):
    k = min(n, K)
    if math.comb(K, k) > ENUM_CAP:
        raise SNumberError(f"level enumeration too large: C({K}, {k}) sets")
    return itertools.combinations(range(K), k)


class Scheme:
    """A generalized approximation scheme on ``space``."""

    def __init__(self, space: Space, kind: str, level_fn=None, atoms=None, dual=None,
                 description: str = ""):
        if kind not in ("subspace", "coordinate", "dictionary", "custom"):
            raise SNumberError(f"unknown scheme kind {kind!r}")
        self.space = space
        self.kind = kind
        self._level_fn = level_fn
        self.atoms = None if atoms is None else np.asarray(atoms, dtype=float).reshape(space.dim, -1)
        self._dual = dual
        self.description = description or kind
        if kind == "custom" and level_fn is None:
            raise SNumberError("custom schemes need a level function")
        if kind == "dictionary" and self.atoms is None:
            raise SNumberError("dictionary schemes need atoms")

    # -- constructors ------------------------------------------------------
    @classmethod
    def subspace(cls, space: Space) -> "Scheme":
        return cls(space, "subspace")

    @classmethod
    def coordinate(cls, space: Space) -> "Scheme":
        return cls(space, "coordinate")

    @classmethod
    def dictionary(cls, space: Space, atoms, dual_atoms=None, description: str = "") -> "Scheme":
        """Spans of at most n atoms; ``dual_atoms`` declares the dual scheme."""
        return cls(space, "dictionary", atoms=atoms, dual=dual_atoms, description=description)

    @classmethod
    def custom(cls, space: Space, level_fn, dual=None, description: str = "") -> "Scheme":
        return cls(space, "custom", level_fn=level_fn, dual=dual, description=description)

    @classmethod
    def from_config(cls, spec: dict, space: Space) -> "Scheme":
        kind = spec.get("kind", "subspace")
        if kind in ("subspace", "coordinate"):
            return cls(space, kind)
        if kind in ("custom", "dictionary"):
            atoms = spec.get("atoms")
            if atoms is None:
                raise SNumberError("custom scheme config needs 'atoms' (one list per atom)")
            A = np.asarray(atoms, dtype=float).T
            dual = spec.get("dual")
            dual_atoms = None if dual is None else np.asarray(dual, dtype=float).T
            return cls.dictionary(space, A, dual_atoms, spec.get("description", ""))
        raise SNumberError(f"unknown scheme kind {kind!r}")

    # -- set algebra on members --------------------------------------------
    def scale(self, A: Subspace, lam: float) -> Subspace:
        return Subspace.zero(A.ambient) if lam == 0 else A

    def add(self, A: Subspace, B: Subspace) -> Subspace:
        return Subspace.span(A.ambient, np.hstack([A.basis, B.basis]))

    # -- levels --------------------------------------------------------------
    def level(self, n: int) -> SchemeLevel:
        n = int(n)
        if n < 0:
            raise SNumberError("scheme level must be nonnegative")
        if self.kind == "custom":
            return self._level_fn(n)
        return getattr(self, f"_{self.kind}_level")(n)

    def _subspace_level(self, n):
        space = self.space

        def sample(rng):
            return _random_subspace(space, int(rng.integers(0, min(n, space.dim) + 1)), rng)

        return SchemeLevel(
            n,
            membership=lambda A: A.k <= n,
            sample=sample,
            distance=lambda y, q: 0.0 if n >= 1 else vector_norm(y, q),
        )

    def _coordinate_level(self, n):
        space = self.space

        def sample(rng):
            k = int(rng.integers(0, min(n, space.dim) + 1))
            return _coordinate_span(space, sorted(rng.choice(space.dim, size=k, replace=False)))

        def member(A):
            S = _coordinate_support(A)
            return S is not None and len(S) <= n

        return SchemeLevel(
            n,
            membership=member,
            sample=sample,
            distance=lambda y, q: _trailing_norm(y, n, q),
            candidates=lambda: [_coordinate_span(space, S) for S in _subsets(space.dim, n)],
        )

    def _dictionary_level(self, n):
        space, atoms = self.space, self.atoms
        K = atoms.shape[1]

        def cands():
            return [Subspace.span(space, atoms[:, list(S)]) for S in _subsets(K, n)]

        def sample(rng):
            k = int(rng.integers(0, min(n, K) + 1))
            return Subspace.span(space, atoms[:, sorted(rng.choice(K, size=k, replace=False))])

        def member(A):
            if A.k == 0:
                return True
            if A.k > n:
                return False
            for S in _subsets(K, n):
                span = Subspace.span(space, atoms[:, list(S)])
                if all(span.contains(A.basis[:, j]) for j in range(A.k)):
                    return True
            return False

        def distance(y, q):
            return min(dist_with_witness(y, G.basis, q)[0] for G in cands())

        return SchemeLevel(n, member, sample, distance, cands)

    # -- transport and duals -------------------------------------------------
    def on(self, space: Space) -> "Scheme":
        """The same rule on another space (built-in kinds only)."""
        if self.kind in ("subspace", "coordinate"):
            return Scheme(space, self.kind)
        if space == self.space:
            return self
        if self.kind == "dictionary" and space.dim == self.space.dim:
            return Scheme(space, "dictionary", atoms=self.atoms, dual=self._dual,
                          description=self.description)
        raise SNumberError(f"{self.kind} scheme is tied to {self.space}")

    def dual_on(self, space: Space) -> "Scheme":
        """The dual scheme on ``space`` (the dual of an operator's domain)."""
        if self.kind in ("subspace", "coordinate"):
            return Scheme(space, self.kind)
        if self._dual is None:
            raise SNumberError(f"{self.description}: no dual scheme declared")
        if isinstance(self._dual, Scheme):
            dual = self._dual
        else:
            dual = Scheme.dictionary(space, self._dual, self.atoms, f"dual of {self.description}")
        if dual.space.dim != space.dim:
            raise SNumberError("declared dual scheme lives on a space of the wrong dimension")
        return dual if dual.space == space else Scheme.dictionary(
            space, dual.atoms, self.atoms, dual.description)

    def __repr__(self):
        return f"Scheme({self.description} on {self.space})"


def _resolve(Q, space: Space) -> Scheme:
    if isinstance(Q, Scheme):
        return Q if Q.space == space else Q.on(space)
    if isinstance(Q, str):
        return Scheme(space, Q)
    if callable(Q):
        return Q(space)
    raise SNumberError(f"cannot build a scheme from {Q!r}")


# --------------------------------------------------------------------------
# axioms
# --------------------------------------------------------------------------


@dataclass
class AxiomReport:
    passed: dict
    counterexamples: list = field(default_factory=list)
    samples: int = 0

    @property
    def ok(self) -> bool:
        return all(self.passed.values())


def _describe(A: Subspace) -> str:
    return f"subspace of dim {A.k}: " + np.array2string(A.basis, precision=4, separator=",")


def check_scheme_axioms(Q: Scheme, n_max: int = 3, samples: int = 200, seed: int = 0) -> AxiomReport:
    """Sampling check of {0} = Q_0 c Q_1 c ..., lam Q_n c Q_n and Q_n + Q_m c Q_{n+m}."""
    if n_max < 1:
        raise SNumberError("n_max must be at least 1")
    rng = np.random.default_rng(seed)
    levels = [Q.level(n) for n in range(n_max + 1)]
    bad = {"GA1": [], "GA2": [], "GA3": []}
    # GA1: level 0 holds only {0}; levels are nested
    for i in range(samples):
        n = i % (n_max + 1)
        A = levels[n].sample(rng)
        if n == 0 and not _is_zero(A):
            bad["GA1"].append({"axiom": "GA1", "n": 0, "set": _describe(A),
                               "reason": "level 0 contains a nonzero set"})
        if n < n_max and not levels[n + 1].membership(A):
            bad["GA1"].append({"axiom": "GA1", "n": n, "set": _describe(A),
                               "reason": f"member of level {n} missing from level {n + 1}"})
    # GA2: closed under the scalar grid
    for i in range(samples):
        n = i % (n_max + 1)
        A = levels[n].sample(rng)
        lam = SCALARS[i % len(SCALARS)]
        if not levels[n].membership(Q.scale(A, lam)):
            bad["GA2"].append({"axiom": "GA2", "n": n, "scalar": lam, "set": _describe(A),
                               "reason": "scaled set left the level"})
    # GA3: sums land in the sum level
    pairs = [(a, b) for a in range(n_max + 1) for b in range(n_max + 1) if a + b <= n_max]
    for i in range(samples):
        a, b = pairs[i % len(pairs)]
        A, B = levels[a].sample(rng), levels[b].sample(rng)
        if not levels[a + b].membership(Q.add(A, B)):
            bad["GA3"].append({"axiom": "GA3", "n": a, "m": b, "set": _describe(A),
                               "other": _describe(B), "reason": "sum left level n+m"})
    passed = {k: not v for k, v in bad.items()}
    return AxiomReport(passed, [c for v in bad.values() for c in v], samples)


# --------------------------------------------------------------------------
# generalized Kolmogorov numbers
# --------------------------------------------------------------------------


def _max_dist(D, G: Subspace, q) -> float:
    return max(dist_with_witness(D[:, j], G.basis, q)[0] for j in range(D.shape[1]))


def _exact_q(q) -> bool:
    q = core.Exponent.of(q)
    return q.is_inf or q.ratio in (1, 2)


def _best_candidate(cands, evaluate):
    best = None
    for G in cands:
        val, direction = evaluate(G)
        if best is None or val < best[0]:
            best = (val, direction, G)
    return best


def gen_kolmogorov_set(D, Q: Scheme, n: int, q=None, budget: Budget | None = None) -> Estimate:
    """inf over sets A of level n of max_d dist_q(d, A)."""
    budget = budget or core.DEFAULT_BUDGET
    q = Q.space.exponent if q is None else core.Exponent.of(q)
    D = np.asarray(D, dtype=float).reshape(Q.space.dim, -1)
    zero = Subspace.zero(Q.space)
    if D.shape[1] == 0:
        return Estimate(0.0, EXACT, zero, 0, budget.seed)
    if n == 0:
        return Estimate(float(np.max(column_norms(D, q))), EXACT, zero, 0, budget.seed)
    exact = EXACT if _exact_q(q) else UPPER
    level = Q.level(n)
    if level.candidates is not None:
        val, _, G = _best_candidate(level.candidates(), lambda G: (_max_dist(D, G, q), exact))
        return Estimate(val, exact, G, 0, budget.seed)
    if Q.kind == "subspace":
        if n >= core.numerical_rank(D, 1e-12):
            return Estimate(0.0, EXACT, Subspace.span(Q.space, D), 0, budget.seed)

        def evaluate(W):
            G = Subspace(Q.space, _orth_basis(W))
            return Estimate(_max_dist(D, G, q), UPPER, G, 0, budget.seed), None

        seed = derive_seed(budget.seed, "scheme-set", n)
        est = _subspace_search(D, n, q, evaluate, None, budget, seed, 1)
        # coordinate subspaces belong to every subspace level
        coord = Scheme.coordinate(Q.space).level(n).candidates()
        val, _, G = _best_candidate(coord, lambda G: (_max_dist(D, G, q), UPPER))
        if val < est.value:
            est = Estimate(val, UPPER, G, est.restarts_used, budget.seed)
        return est
    return _sampled_level(level, lambda G: _max_dist(D, G, q), budget)


def _sampled_level(level: SchemeLevel, objective, budget: Budget) -> Estimate:
    rng = np.random.default_rng(derive_seed(budget.seed, "level-sample", level.n))
    best = None
    for _ in range(max(1, budget.restarts)):
        G = level.sample(rng)
        val = objective(G)
        if best is None or val < best[0]:
            best = (val, G)
    return Estimate(best[0], UPPER, best[1], budget.restarts, budget.seed,
                    ["infimum over sampled level members"])


def _quotient(T: Operator, G: Subspace, budget: Budget):
    est = quotient_operator_norm(T, G, budget)
    return est.value, est.direction


def gen_kolmogorov_op(T: Operator, Q: Scheme, n: int, budget: Budget | None = None) -> Estimate:
    """delta_n(T(B); Q): the generalized Kolmogorov number of the image of the unit ball."""
    budget = budget or core.DEFAULT_BUDGET
    Q = _resolve(Q, T.codomain)
    if Q.space != T.codomain:
        raise SNumberError(f"scheme lives on {Q.space}, codomain is {T.codomain}")
    A = T.matrix
    if n == 0 or not np.any(A):
        est = operator_norm(T, budget)
        return Estimate(est.value if np.any(A) else 0.0, est.direction, Subspace.zero(T.codomain),
                        est.restarts_used, budget.seed)
    level = Q.level(n)
    if level.candidates is not None:
        val, direction, G = _best_candidate(level.candidates(), lambda G: _quotient(T, G, budget))
        return Estimate(val, direction, G, 0, budget.seed)
    if Q.kind == "subspace":
        if n >= core.numerical_rank(A, 1e-12):
            return Estimate(0.0, EXACT, Subspace.span(T.codomain, A), 0, budget.seed)
        if T.p == 2 and T.q == 2:
            # T(B) is an ellipsoid with semi-axes sqrt(eig(T T^T))
            w, U = np.linalg.eigh(A @ A.T)
            order = np.argsort(w)[::-1]
            val = math.sqrt(max(float(w[order[n]]), 0.0)) if n < w.size else 0.0
            return Estimate(val, EXACT, Subspace(T.codomain, U[:, order[:n]]), 0, budget.seed)
        ext = extreme_points(T.domain)
        D = A @ (ext if ext is not None else _probe_vectors(T.domain, derive_seed(budget.seed, "gk")))
        est = gen_kolmogorov_set(D, Q, n, T.q, budget)
        val, direction = _quotient(T, est.certificate, budget)
        if ext is None:
            direction = HEURISTIC
        else:
            direction = UPPER if direction == EXACT else HEURISTIC
        # the subspace scheme is the classical one: keep whichever search did better
        classical = kolmogorov_number(T, n, budget)
        if classical.value < val:
            return classical
        return Estimate(val, direction, est.certificate, est.restarts_used, budget.seed)
    return _sampled_level(level, lambda G: _quotient(T, G, budget)[0], budget)


# --------------------------------------------------------------------------
# scheme-relative approximation numbers
# --------------------------------------------------------------------------


class _RangeFit(MinimaxFit):
    """max_k ||Y[:, k] - G L^T z_k||_r over L with the range basis G held fixed."""

    def __init__(self, Y, G, Z, r):
        super().__init__(Y, G.shape[1], r, Z=Z)
        self.G = np.asarray(G, dtype=float)

    def fit(self, L0, iters: int = 200):
        nw = self.nw
        E = self.residual(self.G, L0)
        t0 = float(np.max(column_norms(E, self.r))) * 1.001 + 1e-12
        x0 = self._pack(self.G, L0, t0, np.abs(E) * 1.001 + 1e-12 if self.use_aux else None)[nw:]
        head = self.G.ravel()

        def cons(x):
            vals, jac = self._constraints(np.concatenate([head, x]))
            return vals, jac[:, nw:]

        grad = np.zeros(x0.size)
        grad[self.nc] = 1.0
        res = minimize(lambda x: (x[self.nc], grad), x0, jac=True, method="SLSQP",
                       constraints=[{"type": "ineq", "fun": lambda x: cons(x)[0],
                                     "jac": lambda x: cons(x)[1]}],
                       options={"maxiter": iters, "ftol": 1e-13})
        L = res.x[: self.nc].reshape(self.e, self.n) if np.all(np.isfinite(res.x)) else L0
        return L if self.objective(self.G, L) <= self.objective(self.G, L0) else L0


def _range_fit(T: Operator, G: Subspace, budget: Budget):
    """inf over C of ||T - G C||; returns (Estimate, B)."""
    A = T.matrix
    if G.k == 0:
        est = operator_norm(T, budget)
        return est, np.zeros_like(A)
    if T.p.ratio == 1:
        # column by column: the l_1 norm is attained at a basis vector
        C = np.column_stack([dist_with_witness(A[:, j], G.basis, T.q)[1] for j in range(A.shape[1])])
    elif T.q.ratio == 2:
        C = np.linalg.lstsq(G.basis, A, rcond=None)[0]
    else:
        pieces = _norm_pieces(T)
        Z = pieces[1] if pieces is not None and pieces[0] == "right" else np.hstack(
            [np.eye(T.domain.dim), _probe_vectors(T.domain, derive_seed(budget.seed, "range"))])
        Z = Z / column_norms(Z, T.p)
        L0 = np.linalg.lstsq(G.basis, A, rcond=None)[0].T
        fit = _RangeFit(A @ Z, G.basis, Z, T.q)
        C = fit.fit(L0, budget.iters).T
    B = G.basis @ C
    return operator_norm(T.with_matrix(A - B), budget), B


def scheme_approx_number(T: Operator, Q: Scheme, n: int, budget: Budget | None = None) -> Estimate:
    """inf ||T - B|| over B whose range lies in a set of level n; certificate is B."""
    if int(n) != n or n < 0:
        raise SNumberError(f"index n must be a nonnegative integer, got {n}")
    budget = budget or core.DEFAULT_BUDGET
    Q = _resolve(Q, T.codomain)
    if Q.space != T.codomain:
        raise SNumberError(f"scheme lives on {Q.space}, codomain is {T.codomain}")
    A = T.matrix
    if n == 0 or not np.any(A):
        est = operator_norm(T, budget)
        return Estimate(est.value if np.any(A) else 0.0, est.direction, np.zeros_like(A),
                        est.restarts_used, budget.seed)
    if Q.kind == "subspace":
        return approx_number(T, n, budget)
    if Q.kind == "coordinate":
        best = None
        for S in _subsets(T.codomain.dim, n):
            B = np.zeros_like(A)
            B[list(S)] = A[list(S)]
            est = operator_norm(T.with_matrix(A - B), budget)
            if best is None or est.value < best[0].value:
                best = (est, B)
        est, B = best
        return Estimate(est.value, est.direction, B, est.restarts_used, budget.seed)
    level = Q.level(n)
    if level.candidates is not None:
        cands = level.candidates()
        direction = UPPER
    else:
        rng = np.random.default_rng(derive_seed(budget.seed, "scheme-approx", n))
        cands = [level.sample(rng) for _ in range(max(1, budget.restarts))]
        direction = UPPER
    best = None
    for G in cands:
        est, B = _range_fit(T, G, budget)
        if best is None or est.value < best[0].value:
            best = (est, B)
    est, B = best
    if est.direction == HEURISTIC:
        direction = HEURISTIC
    elif T.p.ratio == 1 or T.q.ratio == 2:
        direction = est.direction if level.candidates is not None else UPPER
    return Estimate(est.value, direction, B, est.restarts_used, budget.seed)


def scheme_duality_gap(T: Operator, Q: Scheme, n_max: int, budget: Budget | None = None,
                       tolerance: float | None = None) -> DualityReport:
    """alpha_n(T, Q) against alpha_n(T*, Q*) for n = 0..n_max."""
    from .snumbers import EXACT_TOL, HEURISTIC_TOL, adjoint

    budget = budget or core.DEFAULT_BUDGET
    Q = _resolve(Q, T.codomain)
    adj = adjoint(T)
    Qd = Q.dual_on(adj.codomain)
    left = [scheme_approx_number(T, Q, n, budget) for n in range(n_max + 1)]
    right = [scheme_approx_number(adj, Qd, n, budget) for n in range(n_max + 1)]
    exact = all(e.direction == EXACT for e in left + right)
    if tolerance is None:
        tolerance = EXACT_TOL if exact else HEURISTIC_TOL
    gaps, verdicts = [], []
    for a, b in zip(left, right):
        gap = abs(a.value - b.value)
        if not exact:
            scale = max(a.value, b.value)
            gap = gap / scale if scale > 0 else 0.0
        gaps.append(gap)
        verdicts.append(gap <= tolerance)
    return DualityReport("scheme-approximation-duality", range(n_max + 1), gaps, tolerance,
                         verdicts, [e.value for e in left], [e.value for e in right], not exact)


# --------------------------------------------------------------------------
# profiles over truncation families
# --------------------------------------------------------------------------


@dataclass
class ProfileReport:
    N_values: list
    n_values: list
    values: np.ndarray  # values[n, i] = delta_n(T_{N_i}; Q)
    limits: list  # per n: stabilized tail value or None
    verdict: str
    classical_values: np.ndarray | None = None
    classical_limits: list | None = None
    classical_verdict: str | None = None
    gamma: float | None = None
    chain_ok: bool = True
    directions: list = field(default_factory=list)


def _limits(values: np.ndarray, tail: int, tol: float) -> list:
    out = []
    for row in values:
        t = row[-tail:]
        out.append(float(t[-1]) if t.size >= tail and np.ptp(t) <= tol else None)
    return out


def _verdict(limits: list, tol: float = STABLE_TOL) -> str:
    if not limits or any(v is None for v in limits):
        return "inconclusive"
    if limits[-1] <= tol:
        return "decaying"
    if len(limits) < 2:
        return "inconclusive"
    monotone = all(b <= a + tol for a, b in zip(limits, limits[1:]))
    if monotone and limits[-1] <= DECAY_RATIO * limits[0] and limits[-1] < limits[-2] - tol:
        return "decaying"
    if limits[-1] >= limits[-2] - tol:
        return "non-decaying"
    return "inconclusive"


def q_compactness_profile(family, Q, n_max: int, N_max: int | None = None,
                          budget: Budget | None = None, classical: bool = True,
                          tail: int = 3, tol: float = STABLE_TOL) -> ProfileReport:
    """Table of delta_n(T_N; Q) with per-n limits over N and a decay verdict.

    ``Q`` is a scheme kind ('subspace', 'coordinate'), a Scheme (transported
    to each section), or a callable space -> Scheme.  The limit for n is the
    last value once the last ``tail`` sections agree within ``tol``.
    """
    budget = budget or core.DEFAULT_BUDGET
    gen = getattr(family, "generator", family)
    N_values = [N for N in getattr(family, "N_range", []) if N_max is None or N <= N_max]
    if not N_values:
        N_values = list(range(1, (N_max or 1) + 1))
    ns = list(range(n_max + 1))
    vals = np.zeros((len(ns), len(N_values)))
    cvals = np.zeros_like(vals) if classical else None
    chain_ok, dirs = True, []
    for i, N in enumerate(N_values):
        T = gen(N)
        scheme = _resolve(Q, T.codomain)
        col = []
        for n in ns:
            est = gen_kolmogorov_op(T, scheme, n, budget)
            col.append(est.value)
            dirs.append(est.direction)
            if classical:
                cvals[n, i] = kolmogorov_number(T, n, budget).value
        vals[:, i] = col
        norm = operator_norm(T, budget).value
        if abs(col[0] - norm) > 1e-9 * max(1.0, norm) or np.any(np.diff(col) > tol):
            chain_ok = False
    limits = _limits(vals, tail, tol)
    report = ProfileReport(N_values, ns, vals, limits, _verdict(limits, tol), chain_ok=chain_ok,
                           directions=dirs)
    if classical:
        report.classical_values = cvals
        report.classical_limits = _limits(cvals, tail, tol)
        report.classical_verdict = _verdict(report.classical_limits, tol)
    if limits and limits[-1] is not None:
        report.gamma = limits[-1]
    return report


def epsilon_subspace(T: Operator, eps: float, n_max: int, budget: Budget | None = None):
    """Smallest n <= n_max with a subspace G, dim G <= n, and ||Q_G T|| < eps.

    Returns (n, G, value) with value re-evaluated independently at G, or
    None when no such n is found.
    """
    budget = budget or core.DEFAULT_BUDGET
    for n in range(n_max + 1):
        est = kolmogorov_number(T, n, budget)
        if est.value < eps:
            G = est.certificate
            check = quotient_operator_norm(T, G, budget).value
            if check < eps:
                return n, G, check
    return None
