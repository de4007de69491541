"""Finite-dimensional l_p spaces, operators between them, and norm primitives.

Everything else in the package reduces to the functions here: vector norms,
p->q operator norms, distances to subspaces and the norms of quotient and
restricted operators.  Each norm-type quantity is returned as an
:class:`Estimate` that records whether the number came from a closed form
(``exact``) or from a search (``heuristic`` lower bound for a supremum,
``upper`` bound for an infimum).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np
from scipy.optimize import linprog, minimize

EXACT = "exact"
UPPER = "upper"
HEURISTIC = "heuristic"
DIRECTIONS = (EXACT, UPPER, HEURISTIC)

# Largest dimension for which extreme points of a cube are enumerated.
VERTEX_CAP = 16
RANK_TOL = 1e-10
DIST_TOL = 1e-8

_LP_OPTIONS = {
    "primal_feasibility_tolerance": 1e-10,
    "dual_feasibility_tolerance": 1e-10,
}


class SNumberError(ValueError):
    """Raised for invalid inputs to the numeric engines."""


# --------------------------------------------------------------------------
# exponents and spaces
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Exponent:
    """An exponent in [1, inf], stored as a Fraction or ``None`` for infinity."""

    ratio: Fraction | None

    def __post_init__(self):
        if self.ratio is not None and self.ratio < 1:
            raise SNumberError(f"exponent must be >= 1, got {self.ratio}")

    @classmethod
    def of(cls, value: Any) -> "Exponent":
        if isinstance(value, Exponent):
            return value
        if isinstance(value, str):
            text = value.strip().lower()
            if text in ("inf", "infinity", "oo", "∞"):
                return cls(None)
            try:
                return cls(Fraction(text))
            except ValueError:
                raise SNumberError(f"cannot parse exponent {value!r}") from None
        if isinstance(value, Fraction):
            return cls(value)
        if isinstance(value, (int, np.integer)):
            return cls(Fraction(int(value)))
        value = float(value)
        if math.isinf(value) and value > 0:
            return cls(None)
        if math.isnan(value):
            raise SNumberError("exponent cannot be NaN")
        return cls(Fraction(value).limit_denominator(10**6))

    @property
    def is_inf(self) -> bool:
        return self.ratio is None

    def conjugate(self) -> "Exponent":
        return conjugate_exponent(self)

    def __float__(self) -> float:
        return math.inf if self.ratio is None else float(self.ratio)

    def __eq__(self, other):
        if isinstance(other, Exponent):
            return self.ratio == other.ratio
        try:
            return self == Exponent.of(other)
        except (SNumberError, ValueError, TypeError):
            return NotImplemented

    def __hash__(self):
        return hash(self.ratio)

    def __str__(self):
        return "inf" if self.ratio is None else str(self.ratio)

    __repr__ = __str__


ONE = Exponent(Fraction(1))
TWO = Exponent(Fraction(2))
INF = Exponent(None)


def conjugate_exponent(p) -> Exponent:
    """Return p' with 1/p + 1/p' = 1, computed exactly."""
    p = Exponent.of(p)
    if p.is_inf:
        return ONE
    if p.ratio == 1:
        return INF
    return Exponent(p.ratio / (p.ratio - 1))


@dataclass(frozen=True)
class Space:
    """The space R^dim with the l_p norm."""

    dim: int
    exponent: Exponent

    def __init__(self, dim: int, exponent=TWO):
        if int(dim) != dim or dim < 1:
            raise SNumberError(f"space dimension must be a positive integer, got {dim}")
        object.__setattr__(self, "dim", int(dim))
        object.__setattr__(self, "exponent", Exponent.of(exponent))

    def dual(self) -> "Space":
        return Space(self.dim, self.exponent.conjugate())

    def norm(self, x) -> float:
        return vector_norm(x, self.exponent)

    def __str__(self):
        return f"l_{self.exponent}^{self.dim}"


@dataclass(frozen=True, eq=False)
class Operator:
    """A matrix acting from ``domain`` to ``codomain``."""

    matrix: np.ndarray
    domain: Space
    codomain: Space

    def __post_init__(self):
        mat = np.array(self.matrix, dtype=float)
        if mat.ndim != 2:
            raise SNumberError("operator matrix must be two-dimensional")
        if mat.shape != (self.codomain.dim, self.domain.dim):
            raise SNumberError(
                f"matrix shape {mat.shape} does not match "
                f"(codomain.dim, domain.dim) = ({self.codomain.dim}, {self.domain.dim})"
            )
        if not np.all(np.isfinite(mat)):
            raise SNumberError("operator matrix has non-finite entries")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    @classmethod
    def from_matrix(cls, matrix, p=2, q=None) -> "Operator":
        mat = np.atleast_2d(np.asarray(matrix, dtype=float))
        q = p if q is None else q
        return cls(mat, Space(mat.shape[1], p), Space(mat.shape[0], q))

    @property
    def p(self) -> Exponent:
        return self.domain.exponent

    @property
    def q(self) -> Exponent:
        return self.codomain.exponent

    @property
    def shape(self):
        return self.matrix.shape

    def with_matrix(self, matrix) -> "Operator":
        return Operator(matrix, self.domain, self.codomain)

    def __call__(self, x):
        return self.matrix @ np.asarray(x, dtype=float)

    def __repr__(self):
        return f"Operator({self.domain} -> {self.codomain}, shape={self.shape})"


def adjoint(T: Operator) -> Operator:
    """The transpose, acting between the dual spaces."""
    return Operator(T.matrix.T, T.codomain.dual(), T.domain.dual())


@dataclass(frozen=True, eq=False)
class Subspace:
    """span of the columns of ``basis`` inside ``ambient``."""

    ambient: Space
    basis: np.ndarray

    def __post_init__(self):
        b = np.array(self.basis, dtype=float)
        if b.size == 0:
            b = np.zeros((self.ambient.dim, 0))
        if b.ndim == 1:
            b = b[:, None]
        if b.shape[0] != self.ambient.dim:
            raise SNumberError(
                f"basis has {b.shape[0]} rows, ambient dimension is {self.ambient.dim}"
            )
        if b.shape[1] > self.ambient.dim:
            raise SNumberError("more basis vectors than the ambient dimension")
        if b.shape[1] and numerical_rank(b, RANK_TOL) < b.shape[1]:
            raise SNumberError("subspace basis is rank deficient")
        b.setflags(write=False)
        object.__setattr__(self, "basis", b)

    @property
    def k(self) -> int:
        return self.basis.shape[1]

    @classmethod
    def zero(cls, space: Space) -> "Subspace":
        return cls(space, np.zeros((space.dim, 0)))

    @classmethod
    def full(cls, space: Space) -> "Subspace":
        return cls(space, np.eye(space.dim))

    @classmethod
    def span(cls, space: Space, vectors, tol: float = 1e-9) -> "Subspace":
        """Subspace spanned by the columns of ``vectors``; dependent columns are dropped."""
        v = np.asarray(vectors, dtype=float).reshape(space.dim, -1)
        if v.shape[1] == 0 or not np.any(v):
            return cls.zero(space)
        u, s, _ = np.linalg.svd(v, full_matrices=False)
        r = int(np.sum(s > tol * max(s[0], 1.0)))
        return cls(space, u[:, :r])

    def orthonormal(self) -> np.ndarray:
        if self.k == 0:
            return self.basis
        q, _ = np.linalg.qr(self.basis)
        return q

    def annihilator(self) -> "Subspace":
        """The subspace of the dual space vanishing on this one."""
        dual = self.ambient.dual()
        if self.k == 0:
            return Subspace.full(dual)
        u, s, _ = np.linalg.svd(self.basis, full_matrices=True)
        return Subspace(dual, u[:, self.k:])

    def projector(self) -> np.ndarray:
        """Orthogonal (Euclidean) projector onto the subspace."""
        q = self.orthonormal()
        return q @ q.T

    def contains(self, x, tol: float = 1e-9) -> bool:
        x = np.asarray(x, dtype=float)
        scale = max(1.0, float(np.max(np.abs(x), initial=0.0)))
        return bool(np.max(np.abs(x - self.projector() @ x), initial=0.0) <= tol * scale)


def numerical_rank(mat, tol: float = 1e-8) -> int:
    mat = np.atleast_2d(np.asarray(mat, dtype=float))
    if mat.size == 0:
        return 0
    s = np.linalg.svd(mat, compute_uv=False)
    if s[0] == 0:
        return 0
    return int(np.sum(s > tol * max(s[0], 1.0)))


# --------------------------------------------------------------------------
# estimates and budgets
# --------------------------------------------------------------------------


@dataclass
class Estimate:
    """A computed number together with how far it can be trusted.

    ``certificate`` is whatever realizes the value: a maximizing unit vector for
    norms, the approximant for approximation numbers, a Subspace for
    Kolmogorov/Gelfand numbers.
    """

    value: float
    direction: str = EXACT
    certificate: Any = None
    restarts_used: int = 0
    seed: int = 0
    notes: list = field(default_factory=list)

    def __post_init__(self):
        if self.direction not in DIRECTIONS:
            raise SNumberError(f"unknown direction {self.direction!r}")
        self.value = float(self.value)
        if not math.isfinite(self.value):
            raise FloatingPointError(f"estimate is not finite ({self.value}); input scale overflows")
        if self.value < 0:
            if self.value > -1e-12:
                self.value = 0.0
            else:
                raise SNumberError(f"estimate must be nonnegative, got {self.value}")

    def __float__(self):
        return self.value


@dataclass(frozen=True)
class Budget:
    restarts: int = 64
    iters: int = 500
    seed: int = 0

    def with_seed(self, seed: int) -> "Budget":
        return Budget(self.restarts, self.iters, int(seed))


DEFAULT_BUDGET = Budget()


def derive_seed(seed: int, *tags) -> int:
    """Deterministic child seed from a master seed and a tag path."""
    words = [int(seed) & 0xFFFFFFFF]
    for tag in tags:
        if isinstance(tag, str):
            words.extend(tag.encode())
        else:
            words.append(int(tag) & 0xFFFFFFFF)
    ss = np.random.SeedSequence(words)
    return int(ss.generate_state(1)[0])


# --------------------------------------------------------------------------
# vector norms and dual maps
# --------------------------------------------------------------------------


def vector_norm(x, p) -> float:
    """(sum |x_i|^p)^(1/p), or max |x_i| for p = inf."""
    x = np.asarray(x, dtype=float).ravel()
    if x.size == 0:
        return 0.0
    p = Exponent.of(p)
    if p.is_inf:
        return float(np.max(np.abs(x)))
    if p.ratio == 1:
        return float(np.sum(np.abs(x)))
    if p.ratio == 2:
        return float(np.linalg.norm(x))
    scale = np.max(np.abs(x))
    if scale == 0:
        return 0.0
    return float(scale * np.sum((np.abs(x) / scale) ** float(p)) ** (1.0 / float(p)))


def column_norms(X, p) -> np.ndarray:
    """vector_norm applied to every column of X."""
    X = np.asarray(X, dtype=float)
    p = Exponent.of(p)
    a = np.abs(X)
    if p.is_inf:
        return a.max(axis=0)
    if p.ratio == 1:
        return a.sum(axis=0)
    if p.ratio == 2:
        return np.sqrt((a * a).sum(axis=0))
    scale = a.max(axis=0)
    safe = np.where(scale > 0, scale, 1.0)
    return scale * ((a / safe) ** float(p)).sum(axis=0) ** (1.0 / float(p))


def dual_vectors(Y, q) -> np.ndarray:
    """Column-wise norming functionals: ||g||_{q'} = 1 and <g, y> = ||y||_q.

    Zero columns map to zero columns.
    """
    Y = np.asarray(Y, dtype=float)
    vec = Y.ndim == 1
    Y = Y.reshape(Y.shape[0], -1)
    q = Exponent.of(q)
    G = np.zeros_like(Y)
    norms = column_norms(Y, q)
    live = norms > 0
    if q.is_inf:
        idx = np.argmax(np.abs(Y), axis=0)
        cols = np.arange(Y.shape[1])
        G[idx, cols] = np.sign(Y[idx, cols])
    elif q.ratio == 1:
        G = np.sign(Y)
    else:
        safe = np.where(live, norms, 1.0)
        G = np.sign(Y) * (np.abs(Y) / safe) ** (float(q) - 1.0)
    G[:, ~live] = 0.0
    return G[:, 0] if vec else G


def sign_vectors(n: int) -> np.ndarray:
    """All sign vectors in {-1, 1}^n with first entry +1, as columns (n x 2^(n-1))."""
    if n == 0:
        return np.zeros((0, 1))
    rest = np.array(list(itertools.product((1.0, -1.0), repeat=n - 1)), dtype=float)
    rest = rest.reshape(2 ** (n - 1), n - 1)
    return np.hstack([np.ones((rest.shape[0], 1)), rest]).T


def extreme_points(space: Space) -> np.ndarray | None:
    """Extreme points of the unit ball modulo sign, or None when the ball is not a
    polytope of enumerable size."""
    p = space.exponent
    if p.ratio == 1:
        return np.eye(space.dim)
    if p.is_inf and space.dim <= VERTEX_CAP:
        return sign_vectors(space.dim)
    return None


# --------------------------------------------------------------------------
# operator norm
# --------------------------------------------------------------------------


def _certified(T: Operator, x, direction, budget, restarts=0, notes=None) -> Estimate:
    x = np.asarray(x, dtype=float)
    val = vector_norm(T.matrix @ x, T.q) / vector_norm(x, T.p)
    return Estimate(val, direction, x, restarts, budget.seed, list(notes or []))


def operator_norm(T: Operator, budget: Budget | None = None) -> Estimate:
    """sup over the unit ball of the domain of ||Tx||.

    Closed forms: l_1 domain (column norms), l_inf codomain (row norms),
    Euclidean (largest singular value), scaled partial permutations with
    q >= p (largest entry), l_inf domain or l_1 codomain of small
    dimension (vertex enumeration).  Otherwise a multi-restart nonlinear power
    iteration, whose value is a lower bound.
    """
    if not isinstance(T, Operator):
        raise SNumberError("operator_norm expects an Operator")
    budget = budget or DEFAULT_BUDGET
    A = T.matrix
    m, n = A.shape
    p, q = T.p, T.q
    if not np.any(A):
        x = np.zeros(n)
        x[0] = 1.0
        return Estimate(0.0, EXACT, x, 0, budget.seed)
    if p.ratio == 1:
        j = int(np.argmax(column_norms(A, q)))
        return _certified(T, np.eye(n)[:, j], EXACT, budget)
    if q.is_inf:
        pc = p.conjugate()
        rn = column_norms(A.T, pc)
        i = int(np.argmax(rn))
        return _certified(T, dual_vectors(A[i], pc), EXACT, budget)
    if p.ratio == 2 and q.ratio == 2:
        _, _, vt = np.linalg.svd(A)
        return _certified(T, vt[0], EXACT, budget)
    if _is_monomial(A) and (q.is_inf or (not p.is_inf and q.ratio >= p.ratio)):
        # one nonzero per row and column: ||Ax||_q <= max|a| ||x||_q <= max|a| ||x||_p
        j = int(np.argmax(np.max(np.abs(A), axis=0)))
        return _certified(T, np.eye(n)[:, j], EXACT, budget)
    if p.is_inf and n <= VERTEX_CAP:
        S = sign_vectors(n)
        j = int(np.argmax(column_norms(A @ S, q)))
        return _certified(T, S[:, j], EXACT, budget)
    if q.ratio == 1 and m <= VERTEX_CAP:
        S = sign_vectors(m)
        pc = p.conjugate()
        W = A.T @ S
        j = int(np.argmax(column_norms(W, pc)))
        return _certified(T, dual_vectors(W[:, j], pc), EXACT, budget)
    x, restarts = _power_ascent(A, p, q, budget)
    return _certified(T, x, HEURISTIC, budget, restarts)


def _is_monomial(A) -> bool:
    nz = A != 0
    return bool(np.all(nz.sum(axis=0) <= 1) and np.all(nz.sum(axis=1) <= 1))


def _power_ascent(A, p: Exponent, q: Exponent, budget: Budget):
    """Batched nonlinear power iteration for sup ||Ax||_q / ||x||_p.

    Every step is an ascent step for the ratio (the objective is a convex
    seminorm), so the best evaluated point is a certified lower bound.
    """
    m, n = A.shape
    rng = np.random.default_rng(derive_seed(budget.seed, "power", m, n))
    R = max(1, budget.restarts)
    X = rng.standard_normal((n, R))
    X[:, 0] = np.linalg.svd(A)[2][0]
    pc = p.conjugate()
    X = X / column_norms(X, p)
    best = column_norms(A @ X, q)
    for _ in range(budget.iters):
        G = dual_vectors(A @ X, q)
        Xn = dual_vectors(A.T @ G, pc)
        dead = ~np.any(Xn, axis=0)
        Xn[:, dead] = X[:, dead]
        vals = column_norms(A @ Xn, q) / column_norms(Xn, p)
        if np.all(vals <= best * (1 + 1e-14) + 1e-300):
            X = Xn
            best = np.maximum(best, vals)
            break
        X, best = Xn, np.maximum(best, vals)
    j = int(np.argmax(column_norms(A @ X, q) / column_norms(X, p)))
    return X[:, j], R


# --------------------------------------------------------------------------
# distance to a subspace
# --------------------------------------------------------------------------


def _dist_lp(y, B, q: Exponent):
    """Exact l_1 / l_inf distance from y to span(B) through the dual LP.

    Returns (value, coefficients, dual witness g) with ||g||_{q'} <= 1,
    B^T g = 0 and <g, y> = value.
    """
    m, k = B.shape
    if q.is_inf:
        # min t  s.t.  -t <= y - Bc <= t
        c_obj = np.r_[np.zeros(k), 1.0]
        ones = np.ones((m, 1))
        A_ub = np.block([[-B, -ones], [B, -ones]])
        b_ub = np.r_[-y, y]
        res = linprog(c_obj, A_ub=A_ub, b_ub=b_ub, bounds=[(None, None)] * k + [(0, None)],
                      method="highs", options=_LP_OPTIONS)
        if res.status != 0:
            raise FloatingPointError(f"distance LP failed: {res.message}")
        coef = res.x[:k]
        lam = -res.ineqlin.marginals
        g = lam[:m] - lam[m:]
    else:
        # min sum s  s.t.  -s <= y - Bc <= s
        c_obj = np.r_[np.zeros(k), np.ones(m)]
        eye = np.eye(m)
        A_ub = np.block([[-B, -eye], [B, -eye]])
        b_ub = np.r_[-y, y]
        res = linprog(c_obj, A_ub=A_ub, b_ub=b_ub, bounds=[(None, None)] * k + [(0, None)] * m,
                      method="highs", options=_LP_OPTIONS)
        if res.status != 0:
            raise FloatingPointError(f"distance LP failed: {res.message}")
        coef = res.x[:k]
        lam = -res.ineqlin.marginals
        g = lam[:m] - lam[m:]
    resid = y - B @ coef
    return vector_norm(resid, q), coef, g


def _dist_smooth(y, B, q: Exponent):
    qf = float(q)
    scale = max(vector_norm(y, q), 1e-300)
    yn = y / scale
    c0 = np.linalg.lstsq(B, yn, rcond=None)[0]

    def f(c):
        r = yn - B @ c
        a = np.abs(r)
        val = np.sum(a ** qf)
        grad = -B.T @ (qf * np.sign(r) * a ** (qf - 1))
        return val, grad

    res = minimize(f, c0, jac=True, method="BFGS", options={"gtol": 1e-12, "maxiter": 10_000})
    coef = res.x * scale
    resid = y - B @ coef
    return vector_norm(resid, q), coef, dual_vectors(resid, q)


def dist_with_witness(y, basis, q):
    """Distance from y to span(basis) in l_q with coefficients and a dual witness."""
    y = np.asarray(y, dtype=float).ravel()
    B = np.asarray(basis, dtype=float).reshape(y.size, -1)
    q = Exponent.of(q)
    if B.shape[1] == 0 or not np.any(y):
        return vector_norm(y, q), np.zeros(B.shape[1]), dual_vectors(y, q)
    if q.ratio == 2:
        coef = np.linalg.lstsq(B, y, rcond=None)[0]
        resid = y - B @ coef
        # project the residual once more to remove roundoff along span(B)
        qb, _ = np.linalg.qr(B)
        resid = resid - qb @ (qb.T @ resid)
        return vector_norm(resid, q), coef, dual_vectors(resid, q)
    if q.is_inf or q.ratio == 1:
        return _dist_lp(y, B, q)
    return _dist_smooth(y, B, q)


def dist_to_subspace(y, G: Subspace, q) -> float:
    """inf over g in G of ||y - g||_q."""
    y = np.asarray(y, dtype=float).ravel()
    if y.size != G.ambient.dim:
        raise SNumberError("vector is not in the ambient space of the subspace")
    return dist_with_witness(y, G.basis, q)[0]


# --------------------------------------------------------------------------
# quotient and restricted norms
# --------------------------------------------------------------------------


def slice_vertices(constraints: np.ndarray, max_count: int = 200_000) -> np.ndarray | None:
    """Vertices (modulo sign) of {x : C^T x = 0, ||x||_1 <= 1}.

    A vertex is the unique (up to scale) kernel vector supported on a set of
    at most codim + 1 coordinates.  Returns None when the enumeration would
    exceed ``max_count`` supports.
    """
    C = np.asarray(constraints, dtype=float)
    N, c = C.shape
    if c == 0:
        return np.eye(N)
    top = min(N, c + 1)
    total = sum(math.comb(N, s) for s in range(1, top + 1))
    if total > max_count:
        return None
    out = []
    for s in range(1, top + 1):
        for S in itertools.combinations(range(N), s):
            sub = C[list(S), :].T  # c x s
            if s == 1:
                if np.max(np.abs(sub)) <= 1e-12:
                    v = np.ones(1)
                else:
                    continue
            else:
                _, sv, vt = np.linalg.svd(sub, full_matrices=True)
                rank = int(np.sum(sv > 1e-11 * max(1.0, sv[0] if sv.size else 1.0)))
                if s - rank != 1:
                    continue
                v = vt[-1]
            x = np.zeros(N)
            x[list(S)] = v
            out.append(x / np.sum(np.abs(x)))
    if not out:
        return np.zeros((N, 0))
    return np.array(out).T


def quotient_operator_norm(T: Operator, G: Subspace, budget: Budget | None = None) -> Estimate:
    """sup over the domain unit ball of dist(Tx, G): the norm of Q_G T."""
    if G.ambient != T.codomain:
        raise SNumberError("subspace does not live in the codomain of the operator")
    budget = budget or DEFAULT_BUDGET
    A = T.matrix
    n = A.shape[1]
    p, q = T.p, T.q
    if G.k == 0:
        return operator_norm(T, budget)
    if G.k == G.ambient.dim or not np.any(A):
        return Estimate(0.0, EXACT, np.eye(n)[:, 0], 0, budget.seed)
    ext = extreme_points(T.domain)
    if ext is not None:
        return _quotient_over_points(T, G, ext, EXACT, budget)
    if q.ratio == 2:
        # dist_2(Tx, G) = ||(I - P) T x||_2
        P = np.eye(G.ambient.dim) - G.projector()
        est = operator_norm(Operator(P @ A, T.domain, T.codomain), budget)
        return _quotient_over_points(T, G, est.certificate[:, None], est.direction, budget,
                                     est.restarts_used)
    if q.is_inf:
        # dual side: sup over the l_1 slice G^perp of ||T^T y||_{p'}
        V = slice_vertices(G.orthonormal())
        if V is not None and V.shape[1]:
            W = A.T @ V
            j = int(np.argmax(column_norms(W, p.conjugate())))
            x = dual_vectors(W[:, j], p.conjugate())
            return _quotient_over_points(T, G, x[:, None], EXACT, budget)
    return _quotient_ascent(T, G, budget)


def _quotient_over_points(T, G, X, direction, budget, restarts=0) -> Estimate:
    best, arg = -1.0, None
    for j in range(X.shape[1]):
        x = X[:, j]
        d = dist_with_witness(T.matrix @ x, G.basis, T.q)[0] / vector_norm(x, T.p)
        if d > best:
            best, arg = d, x
    return Estimate(best, direction, arg, restarts, budget.seed)


def _quotient_ascent(T, G, budget: Budget) -> Estimate:
    """Power-type ascent for sup dist(Tx, G) using dual witnesses of the distance."""
    A = T.matrix
    n = A.shape[1]
    p, q = T.p, T.q
    pc = p.conjugate()
    rng = np.random.default_rng(derive_seed(budget.seed, "quotient", *A.shape, G.k))
    R = max(1, min(budget.restarts, 16))
    iters = min(budget.iters, 100)
    P = np.eye(G.ambient.dim) - G.projector()
    starts = rng.standard_normal((n, R))
    starts[:, 0] = np.linalg.svd(P @ A)[2][0]
    best, arg = -1.0, None
    for r in range(R):
        x = starts[:, r] / vector_norm(starts[:, r], p)
        val, _, g = dist_with_witness(A @ x, G.basis, q)
        for _ in range(iters):
            w = A.T @ g
            if not np.any(w):
                break
            xn = dual_vectors(w, pc)
            vn, _, gn = dist_with_witness(A @ xn, G.basis, q)
            vn /= vector_norm(xn, p)
            if vn <= val * (1 + 1e-12):
                break
            x, val, g = xn, vn, gn
        if val > best:
            best, arg = val, x
    return Estimate(best, HEURISTIC, arg, R, budget.seed)


def restricted_operator_norm(T: Operator, M: Subspace, budget: Budget | None = None) -> Estimate:
    """sup{||Tx||_q : x in M, ||x||_p <= 1}.

    The certificate is a maximizing x in M.
    """
    if M.ambient != T.domain:
        raise SNumberError("subspace does not live in the domain of the operator")
    budget = budget or DEFAULT_BUDGET
    A = T.matrix
    p, q = T.p, T.q
    if M.k == 0:
        return Estimate(0.0, EXACT, np.zeros(A.shape[1]), 0, budget.seed)
    if M.k == M.ambient.dim:
        return operator_norm(T, budget)
    if p.ratio == 2 and q.ratio == 2:
        Qb = M.orthonormal()
        _, _, vt = np.linalg.svd(A @ Qb)
        return _certified(T, Qb @ vt[0], EXACT, budget)
    if p.ratio == 1:
        ann = M.annihilator()
        V = slice_vertices(ann.basis)
        if V is not None and V.shape[1]:
            j = int(np.argmax(column_norms(A @ V, q)))
            return _certified(T, V[:, j], EXACT, budget)
    # duality: ||T|_M|| = ||Q_{M^perp} T^T||
    dual_est = quotient_operator_norm(adjoint(T), M.annihilator(), budget)
    z = dual_est.certificate
    _, _, x = dist_with_witness(A.T @ z, M.annihilator().basis, p.conjugate())
    if not np.any(x):
        return Estimate(dual_est.value, dual_est.direction, None, dual_est.restarts_used,
                        budget.seed, ["witness unavailable"])
    est = _certified(T, x, dual_est.direction, budget, dual_est.restarts_used)
    if est.direction == HEURISTIC:
        est.value = max(est.value, 0.0)
    else:
        # an exact dual value; the primal witness agrees up to solver tolerance
        est.notes.append(f"dual value {dual_est.value:.17g}")
    return est
