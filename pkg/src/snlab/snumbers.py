"""Approximation, Kolmogorov and Gelfand numbers and their duality checks.

Indexing is 0-based throughout: ``approx_number(T, n)`` is the distance from
T to operators of rank at most n, so every kind starts at the operator norm
and the Euclidean value is the (n+1)-th singular value.
"""

from __future__ import annotations

import enum
import hashlib
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import core
from ._search import MinimaxFit, free_starts, multistart, tied_starts
from .core import (
    EXACT, HEURISTIC, UPPER, Budget, Estimate, Operator, SNumberError, Subspace,
    adjoint, derive_seed, dual_vectors, extreme_points, numerical_rank, operator_norm,
    quotient_operator_norm, restricted_operator_norm, vector_norm,
)

log = logging.getLogger(__name__)

__all__ = [
    "SNumberKind", "SNumberSequence", "DualityReport", "adjoint", "approx_number",
    "kolmogorov_number", "gelfand_number", "svd_oracle", "nuclear_norm_euclidean",
    "snumber_sequence", "duality_gap", "type_lp_diagnostic", "gelfand_epsilon_holds",
    "compute_number",
]

EXACT_TOL = 1e-9
HEURISTIC_TOL = 5e-3
CUTTING_ROUNDS = 12


class SNumberKind(str, enum.Enum):
    APPROXIMATION = "approximation"
    KOLMOGOROV = "kolmogorov"
    GELFAND = "gelfand"

    @classmethod
    def parse(cls, tag) -> "SNumberKind":
        if isinstance(tag, cls):
            return tag
        aliases = {"alpha": cls.APPROXIMATION, "a": cls.APPROXIMATION,
                   "delta": cls.KOLMOGOROV, "d": cls.KOLMOGOROV,
                   "c": cls.GELFAND, "gelfand": cls.GELFAND}
        key = str(tag).strip().lower()
        if key in aliases:
            return aliases[key]
        try:
            return cls(key)
        except ValueError:
            raise SNumberError(f"unknown s-number kind {tag!r}") from None


@dataclass
class SNumberSequence:
    kind: SNumberKind
    operator_id: str
    entries: list
    raw_values: list = field(default_factory=list)

    @property
    def values(self) -> list[float]:
        return [e.value for e in self.entries]


@dataclass
class DualityReport:
    theorem_tag: str
    n_range: range
    gaps: list
    tolerance: float
    verdicts: list
    left: list = field(default_factory=list)
    right: list = field(default_factory=list)
    relative: bool = False
    cross: "DualityReport | None" = None

    @property
    def passed(self) -> bool:
        ok = all(self.verdicts)
        if self.cross is not None:
            ok = ok and self.cross.passed
        return ok


def operator_id(T: Operator) -> str:
    h = hashlib.sha256()
    h.update(str((T.domain, T.codomain)).encode())
    h.update(np.ascontiguousarray(T.matrix).tobytes())
    return h.hexdigest()[:16]


# --------------------------------------------------------------------------
# oracles
# --------------------------------------------------------------------------


def svd_oracle(T) -> list[float]:
    """Singular values, largest first, from a symmetric eigen-decomposition.

    Uses the eigenvalues of [[0, T], [T^T, 0]], which are +/- the singular
    values; unlike T^T T this keeps small singular values accurate to
    machine precision relative to ||T||.
    """
    A = T.matrix if isinstance(T, Operator) else np.atleast_2d(np.asarray(T, dtype=float))
    m, n = A.shape
    aug = np.zeros((m + n, m + n))
    aug[:m, m:] = A
    aug[m:, :m] = A.T
    ev = np.linalg.eigvalsh(aug)[::-1][: min(m, n)]
    return [max(float(v), 0.0) for v in ev]


def nuclear_norm_euclidean(T: Operator) -> float:
    """Trace norm (sum of singular values) of an operator between l_2 spaces."""
    if not (T.p == 2 and T.q == 2):
        raise SNumberError("nuclear norm is only supported between Euclidean spaces")
    return float(np.sum(np.linalg.svd(T.matrix, compute_uv=False)))


# --------------------------------------------------------------------------
# search helpers
# --------------------------------------------------------------------------


def _norm_pieces(T: Operator):
    """A finite family of test vectors that computes ||M||_{p->q} exactly.

    'right' pieces z give ||M|| = max ||M z||_q, 'left' pieces give
    ||M|| = max ||M^T z||_{p'}.
    """
    options = []
    right = extreme_points(T.domain)
    if right is not None:
        options.append(("right", right, T.q))
    left = extreme_points(T.codomain.dual())
    if left is not None:
        options.append(("left", left, T.p.conjugate()))
    if not options:
        return None
    return min(options, key=lambda o: o[1].shape[1])


def _unit(x, p):
    nrm = vector_norm(x, p)
    return x / nrm if nrm > 0 else x


def _split_restarts(budget: Budget, rounds: int) -> int:
    return budget.restarts if rounds == 1 else max(4, budget.restarts // 4)


def _approx_search(T: Operator, n: int, budget: Budget) -> Estimate:
    scale = float(np.max(np.abs(T.matrix)))
    A0 = T.matrix / scale
    seed = derive_seed(budget.seed, "approx", n)
    pieces = _norm_pieces(T)
    if pieces is not None:
        side, Z, r = pieces
        rounds = 1
    else:
        side, r = "right", T.q
        rng = np.random.default_rng(seed)
        extra = rng.standard_normal((T.domain.dim, T.domain.dim))
        Z = np.hstack([np.eye(T.domain.dim), extra / core.column_norms(extra, T.p)])
        rounds = CUTTING_ROUNDS
    M = A0 if side == "right" else A0.T
    best, used, warm = None, 0, None
    restarts = _split_restarts(budget, rounds)
    for rnd in range(rounds):
        problem = MinimaxFit(M @ Z, n, r, Z=Z)
        base = tied_starts(M, n)
        starts = base if warm is None else (lambda i, rng, w=warm: w if i == 0 else base(i, rng))
        fits = multistart(problem, starts, restarts, derive_seed(seed, rnd), budget.iters, keep=3)
        used += restarts
        for fit in fits:
            A = fit.W @ fit.coef.T
            A = (A if side == "right" else A.T) * scale
            resid = operator_norm(T.with_matrix(T.matrix - A), budget)
            if best is None or resid.value < best[0].value:
                best = (resid, A, fit)
        if rounds == 1:
            break
        warm = (best[2].W, best[2].coef)
        # stop once the finite test family already sees the full norm
        if best[2].value * scale >= best[0].value * (1 - 1e-7):
            break
        Z = np.hstack([Z, _unit(best[0].certificate, T.p)[:, None]])
    resid, A, _ = best
    direction = UPPER if resid.direction == EXACT else HEURISTIC
    return Estimate(resid.value, direction, A, used, budget.seed)


def _subspace_search(targets, n, r, evaluate, next_target, budget, seed, rounds):
    """Minimize max_k dist_r(y_k, span W) over W, evaluating candidates with
    ``evaluate(W) -> (Estimate, witness)``; when ``next_target`` is given, targets grow
    by cutting planes from the evaluation witnesses."""
    Y = np.asarray(targets, dtype=float)
    scale = max(float(np.max(np.abs(Y))), 1e-300)
    best, used, warm = None, 0, None
    restarts = _split_restarts(budget, rounds)
    for rnd in range(rounds):
        Yn = Y / scale
        problem = MinimaxFit(Yn, n, r)
        base = free_starts(Yn, n)
        if warm is not None:
            def starts(i, rng, w=warm, base=base, Yn=Yn):
                if i == 0:
                    return w, np.linalg.lstsq(w, Yn, rcond=None)[0]
                return base(i, rng)
        else:
            starts = base
        fits = multistart(problem, starts, restarts, derive_seed(seed, rnd), budget.iters, keep=3)
        used += restarts
        new = []
        for fit in fits:
            est, witness = evaluate(fit.W)
            if best is None or est.value < best[0].value:
                best = (est, fit)
            # a candidate whose targets miss the true sup yields a cutting plane
            if next_target is not None and fit.value * scale < est.value * (1 - 1e-7):
                y = next_target(witness)
                if y is not None:
                    new.append(y)
        if rounds == 1 or not new:
            break
        warm = best[1].W
        Y = np.hstack([Y] + [y[:, None] for y in new])
    est = best[0]
    est.restarts_used = used
    return est


def _orth_basis(W) -> np.ndarray:
    u, s, _ = np.linalg.svd(np.atleast_2d(W), full_matrices=False)
    if s.size == 0 or s[0] == 0:
        return u[:, :0]
    return u[:, s > 1e-9 * s[0]]


# --------------------------------------------------------------------------
# the three s-numbers
# --------------------------------------------------------------------------


def _check_n(n):
    if int(n) != n or n < 0:
        raise SNumberError(f"index n must be a nonnegative integer, got {n}")
    return int(n)


def _rank(T: Operator) -> int:
    return numerical_rank(T.matrix, 1e-12)


def approx_number(T: Operator, n: int, budget: Budget | None = None) -> Estimate:
    """inf ||T - A|| over A of rank <= n; the certificate is the best A found."""
    n = _check_n(n)
    budget = budget or core.DEFAULT_BUDGET
    A = T.matrix
    if n == 0 or not np.any(A):
        est = operator_norm(T, budget)
        return Estimate(est.value, est.direction, np.zeros_like(A), est.restarts_used, budget.seed)
    if n >= _rank(T):
        return Estimate(0.0, EXACT, A.copy(), 0, budget.seed)
    if T.p == 2 and T.q == 2:
        u, s, vt = np.linalg.svd(A)
        approx = (u[:, :n] * s[:n]) @ vt[:n]
        return Estimate(float(s[n]), EXACT, approx, 0, budget.seed)
    return _approx_search(T, n, budget)


def kolmogorov_number(T: Operator, n: int, budget: Budget | None = None) -> Estimate:
    """inf ||Q_G T|| over subspaces G of the codomain with dim G <= n."""
    n = _check_n(n)
    budget = budget or core.DEFAULT_BUDGET
    A = T.matrix
    m = T.codomain.dim
    if n == 0 or not np.any(A):
        est = operator_norm(T, budget)
        return Estimate(est.value, est.direction, Subspace.zero(T.codomain),
                        est.restarts_used, budget.seed)
    if n >= m or n >= _rank(T):
        return Estimate(0.0, EXACT, Subspace.span(T.codomain, A), 0, budget.seed)
    if T.p == 2 and T.q == 2:
        u, s, _ = np.linalg.svd(A)
        return Estimate(float(s[n]), EXACT, Subspace(T.codomain, u[:, :n]), 0, budget.seed)

    def evaluate(W):
        G = Subspace(T.codomain, _orth_basis(W))
        est = quotient_operator_norm(T, G, budget)
        direction = UPPER if est.direction == EXACT else HEURISTIC
        return Estimate(est.value, direction, G, 0, budget.seed), est.certificate

    def next_target(x):
        return None if x is None else A @ _unit(x, T.p)

    ext = extreme_points(T.domain)
    seed = derive_seed(budget.seed, "kolmogorov", n)
    if ext is not None:
        est = _subspace_search(A @ ext, n, T.q, evaluate, None, budget, seed, 1)
    else:
        est = _subspace_search(A @ _probe_vectors(T.domain, seed), n, T.q, evaluate,
                               next_target, budget, seed, CUTTING_ROUNDS)
    return est


def gelfand_number(T: Operator, n: int, budget: Budget | None = None) -> Estimate:
    """inf ||T restricted to M|| over subspaces M of the domain with codim M <= n.

    The search runs over the n functionals whose joint kernel is M; the
    certificate is M itself.
    """
    n = _check_n(n)
    budget = budget or core.DEFAULT_BUDGET
    A = T.matrix
    N = T.domain.dim
    if n == 0 or not np.any(A):
        est = operator_norm(T, budget)
        return Estimate(est.value, est.direction, Subspace.full(T.domain),
                        est.restarts_used, budget.seed)
    if n >= N or n >= _rank(T):
        kernel = Subspace.span(T.domain.dual(), A.T).annihilator()
        return Estimate(0.0, EXACT, kernel, 0, budget.seed)
    if T.p == 2 and T.q == 2:
        _, s, vt = np.linalg.svd(A)
        return Estimate(float(s[n]), EXACT, Subspace(T.domain, vt[n:].T), 0, budget.seed)

    dual_domain = T.domain.dual()
    pc = T.p.conjugate()

    def evaluate(F):
        M = Subspace(dual_domain, _orth_basis(F)).annihilator()
        est = restricted_operator_norm(T, M, budget)
        direction = UPPER if est.direction == EXACT else HEURISTIC
        return Estimate(est.value, direction, M, 0, budget.seed), est.certificate

    def next_target(x):
        if x is None:
            return None
        return A.T @ dual_vectors(A @ _unit(x, T.p), T.q)

    ext = extreme_points(T.codomain.dual())
    seed = derive_seed(budget.seed, "gelfand", n)
    if ext is not None:
        est = _subspace_search(A.T @ ext, n, pc, evaluate, None, budget, seed, 1)
    else:
        est = _subspace_search(A.T @ _probe_vectors(T.codomain.dual(), seed), n, pc, evaluate,
                               next_target, budget, seed, CUTTING_ROUNDS)
    return est


def _probe_vectors(space, seed) -> np.ndarray:
    rng = np.random.default_rng(seed)
    extra = rng.standard_normal((space.dim, 3 * space.dim))
    extra /= core.column_norms(extra, space.exponent)
    return np.hstack([np.eye(space.dim), extra])


_ENGINES = {
    SNumberKind.APPROXIMATION: approx_number,
    SNumberKind.KOLMOGOROV: kolmogorov_number,
    SNumberKind.GELFAND: gelfand_number,
}


def compute_number(T: Operator, kind, n: int, budget: Budget | None = None) -> Estimate:
    return _ENGINES[SNumberKind.parse(kind)](T, n, budget)


def gelfand_epsilon_holds(T: Operator, functionals, eps: float, samples: int = 2000,
                          seed: int = 0, extra_points=None) -> bool:
    """Check ||Tx|| <= max_i |<x, a_i>| + eps ||x|| on sampled x.

    ``functionals`` are the columns a_i; ``extra_points`` are added to the
    random sample (useful for adversarial points such as kernel vectors).
    """
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((T.domain.dim, samples))
    if extra_points is not None:
        X = np.hstack([X, np.asarray(extra_points, dtype=float).reshape(T.domain.dim, -1)])
    F = np.asarray(functionals, dtype=float).reshape(T.domain.dim, -1)
    lhs = core.column_norms(T.matrix @ X, T.q)
    pairing = np.max(np.abs(F.T @ X), axis=0) if F.shape[1] else np.zeros(X.shape[1])
    rhs = pairing + eps * core.column_norms(X, T.p)
    return bool(np.all(lhs <= rhs * (1 + 1e-12) + 1e-12))


# --------------------------------------------------------------------------
# sequences and duality
# --------------------------------------------------------------------------


def snumber_sequence(T: Operator, kind, n_max: int, budget: Budget | None = None) -> SNumberSequence:
    """Entries n = 0..n_max with prefix-min repair of monotonicity."""
    kind = SNumberKind.parse(kind)
    n_max = _check_n(n_max)
    budget = budget or core.DEFAULT_BUDGET
    entries, raw = [], []
    for n in range(n_max + 1):
        est = compute_number(T, kind, n, budget)
        raw.append(est.value)
        if entries and est.value > entries[-1].value:
            prev = entries[-1]
            msg = f"monotonicity repair: raw value {est.value!r} replaced by {prev.value!r}"
            log.info("%s n=%d: %s", kind.value, n, msg)
            est.notes.append(msg)
            est.value = prev.value
            est.certificate = prev.certificate
            est.direction = HEURISTIC if HEURISTIC in (est.direction, prev.direction) else UPPER
        entries.append(est)
    return SNumberSequence(kind, operator_id(T), entries, raw)


def _all_exact(seqs) -> bool:
    return all(e.direction == EXACT for s in seqs for e in s.entries)


def _compare(tag, left: SNumberSequence, right: SNumberSequence, tolerance, relative):
    gaps, verdicts = [], []
    for a, b in zip(left.values, right.values):
        gap = abs(a - b)
        if relative:
            scale = max(abs(a), abs(b))
            gap = gap / scale if scale > 0 else 0.0
        gaps.append(gap)
        verdicts.append(gap <= tolerance)
    return DualityReport(tag, range(len(gaps)), gaps, tolerance, verdicts,
                         left.values, right.values, relative)


_DUALITY_TAGS = {
    SNumberKind.APPROXIMATION: "approximation-duality",
    SNumberKind.KOLMOGOROV: "kolmogorov-duality",
    SNumberKind.GELFAND: "gelfand-duality",
}


def duality_gap(T: Operator, kind, n_max: int, budget: Budget | None = None,
                tolerance: float | None = None, relative: bool | None = None,
                cross: bool | None = None) -> DualityReport:
    """Compare the s-numbers of T with those of its adjoint.

    With ``cross`` (default for Kolmogorov and Gelfand kinds) the report also
    compares the Kolmogorov numbers of T* with the Gelfand numbers of T.
    Tolerance defaults to 1e-9 absolute when every entry is exact and to
    5e-3 relative otherwise.
    """
    kind = SNumberKind.parse(kind)
    budget = budget or core.DEFAULT_BUDGET
    adj = adjoint(T)
    s_t = snumber_sequence(T, kind, n_max, budget)
    s_a = snumber_sequence(adj, kind, n_max, budget.with_seed(derive_seed(budget.seed, "adjoint")))
    seqs = [s_t, s_a]
    cross_pair = None
    if cross is None:
        cross = kind != SNumberKind.APPROXIMATION
    if cross:
        d_adj = s_a if kind == SNumberKind.KOLMOGOROV else snumber_sequence(adj, "kolmogorov", n_max, budget)
        c_t = s_t if kind == SNumberKind.GELFAND else snumber_sequence(T, "gelfand", n_max, budget)
        cross_pair = (d_adj, c_t)
        seqs += [d_adj, c_t]
    exact = _all_exact(seqs)
    if relative is None:
        relative = not exact
    if tolerance is None:
        tolerance = EXACT_TOL if exact else HEURISTIC_TOL
    report = _compare(_DUALITY_TAGS[kind], s_t, s_a, tolerance, relative)
    if cross_pair is not None:
        report.cross = _compare("kolmogorov-gelfand-cross", *cross_pair, tolerance, relative)
    return report


# --------------------------------------------------------------------------
# type l^p diagnostic
# --------------------------------------------------------------------------


@dataclass
class DecayReport:
    exponent: float
    dims: list
    partial_sums: list
    sequences: list
    power_decay: float
    geometric_ratio: float
    stabilizing: bool


def type_lp_diagnostic(family, p: float, N_max: int | None = None,
                       budget: Budget | None = None, N_values=None) -> DecayReport:
    """Partial sums sum_{n<N} a_n(T_N)^p over a truncation family.

    ``family`` is a TruncationFamily (or any callable N -> Operator).  A
    stabilizing sequence of partial sums is evidence, not proof, that the
    underlying operator is of type l^p.
    """
    if not p > 0:
        raise SNumberError("p must be positive")
    generator = getattr(family, "generator", family)
    if N_values is None:
        rng = getattr(family, "N_range", None)
        N_values = [N for N in (rng or range(1, (N_max or 1) + 1)) if N_max is None or N <= N_max]
    budget = budget or core.DEFAULT_BUDGET
    sums, seqs = [], []
    for N in N_values:
        T = generator(N)
        values = snumber_sequence(T, SNumberKind.APPROXIMATION, T.domain.dim - 1, budget).values
        seqs.append(values)
        sums.append(float(sum(v ** p for v in values)))
    last = np.asarray(seqs[-1]) if seqs else np.zeros(0)
    pos = last[last > 1e-14]
    power, ratio = math.nan, math.nan
    if pos.size >= 2:
        idx = np.arange(1, pos.size + 1)
        power = float(-np.polyfit(np.log(idx), np.log(pos), 1)[0])
        ratio = float(np.exp(np.polyfit(idx, np.log(pos), 1)[0]))
    stabilizing = False
    if len(sums) >= 3:
        tail = np.asarray(sums[-3:])
        stabilizing = bool(np.max(tail) - np.min(tail) <= 1e-2 * max(1.0, abs(tail[-1])))
    return DecayReport(float(p), list(N_values), sums, seqs, power, ratio, stabilizing)
