"""Symmetrized approximation numbers through finite nets.

The codomain is embedded into l_inf^M by evaluating M functionals from its
dual ball, and the domain is reached from l_1^M through M vectors of its unit
ball.  The composite J T Q : l_1^M -> l_inf^M has an exact norm (largest
absolute entry), so only the rank-n infimum is searched.  Nets are finite
stand-ins for the full balls; their norming resolution eta is measured and
fed into every tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.optimize import linprog
from scipy.stats import norm as _gauss
from scipy.stats import qmc

from . import core
from .core import (
    EXACT, INF, UPPER, Budget, Estimate, Operator, SNumberError, Space, adjoint,
    column_norms, derive_seed, operator_norm,
)
from .snumbers import DualityReport, approx_number

__all__ = [
    "FunctionalNet", "VectorNet", "build_functional_net", "build_vector_net",
    "norming_resolution", "embed_J", "lift_Q", "symmetrized_approx_number",
    "tau_duality_gap", "TauEstimate", "linf_lowrank",
]

TAU_SLACK = 5e-3
_REFERENCE_SIZE = 8192


@dataclass(frozen=True, eq=False)
class FunctionalNet:
    """M functionals (columns) of the dual unit ball of ``space``.

    ``eta`` is measured against a dense sample of the unit sphere of
    ``space``, so it bounds how far the net is from norming every vector;
    ``basis_eta`` only looks at the basis vectors and is 0 by construction.
    """

    space: Space
    functionals: np.ndarray
    eta: float
    seed: int = 0

    @property
    def M(self) -> int:
        return self.functionals.shape[1]

    @property
    def basis_eta(self) -> float:
        """1 - min_i max_k |<e_i, f_k>|: resolution on the basis vectors only."""
        return float(max(0.0, 1.0 - np.min(np.max(np.abs(self.functionals), axis=1))))


@dataclass(frozen=True, eq=False)
class VectorNet:
    """M vectors (columns) of the unit ball of ``space``."""

    space: Space
    vectors: np.ndarray
    eta: float
    seed: int = 0

    @property
    def M(self) -> int:
        return self.vectors.shape[1]

    @property
    def basis_eta(self) -> float:
        """1 - min_i max_k |<e_i, v_k>|: resolution on the dual basis only."""
        return float(max(0.0, 1.0 - np.min(np.max(np.abs(self.vectors), axis=1))))


def _sphere_points(dim: int, count: int, exponent, seed: int) -> np.ndarray:
    """Quasi-uniform directions (scrambled Sobol through the Gaussian map)
    normalized to the unit sphere of l_exponent."""
    if count <= 0:
        return np.zeros((dim, 0))
    if dim == 1:
        return np.ones((1, count))
    sampler = qmc.Sobol(d=dim, scramble=True, seed=np.random.default_rng(seed))
    m = int(np.ceil(np.log2(max(count, 2))))
    u = sampler.random_base2(m)[:count]
    X = _gauss.ppf(np.clip(u, 1e-12, 1 - 1e-12)).T
    return X / column_norms(X, exponent)


@lru_cache(maxsize=64)
def _reference_sphere(dim: int, exponent) -> np.ndarray:
    """Dense deterministic sample of the unit sphere used to measure eta."""
    if dim == 1:
        return np.ones((1, 1))
    if dim == 2:
        t = np.linspace(0.0, np.pi, _REFERENCE_SIZE // 2, endpoint=False)
        X = np.vstack([np.cos(t), np.sin(t)])
    else:
        X = _sphere_points(dim, _REFERENCE_SIZE, exponent, 12345)
        extra = [np.eye(dim)]
        if dim <= 10:
            extra.append(core.sign_vectors(dim))
        X = np.hstack([X] + extra)
    return X / column_norms(X, exponent)


def norming_resolution(points, exponent) -> float:
    """eta = 1 - min over reference unit x (in l_exponent) of max_k |<x, points_k>|."""
    P = np.asarray(points, dtype=float)
    ref = _reference_sphere(P.shape[0], core.Exponent.of(exponent))
    corr = np.max(np.abs(P.T @ ref), axis=0)
    return float(max(0.0, 1.0 - np.min(corr)))


def _net_points(dim: int, M: int, exponent, seed: int) -> np.ndarray:
    if int(M) != M or M < 2 * dim:
        raise SNumberError(f"net size M={M} must be an integer >= 2*dim = {2 * dim}")
    eye = np.eye(dim)
    rest = M - 2 * dim
    half = _sphere_points(dim, rest // 2, exponent, seed)
    cols = [eye, -eye, half, -half]
    if rest % 2:
        cols.append(_sphere_points(dim, 1, exponent, derive_seed(seed, "odd")))
    return np.hstack(cols)


def build_functional_net(space: Space, M: int, seed: int = 0) -> FunctionalNet:
    """+-dual basis plus symmetric quasi-uniform points of the dual unit sphere."""
    dual = space.exponent.conjugate()
    F = _net_points(space.dim, M, dual, seed)
    return FunctionalNet(space, F, norming_resolution(F, space.exponent), seed)


def build_vector_net(space: Space, M: int, seed: int = 0) -> VectorNet:
    """+-basis plus symmetric quasi-uniform points of the unit sphere."""
    V = _net_points(space.dim, M, space.exponent, seed)
    return VectorNet(space, V, norming_resolution(V, space.exponent.conjugate()), seed)


def embed_J(T: Operator, net: FunctionalNet) -> Operator:
    """J T : domain -> l_inf^M with rows <T x, f_k>."""
    if net.space != T.codomain:
        raise SNumberError(f"functional net lives on {net.space}, codomain is {T.codomain}")
    return Operator(net.functionals.T @ T.matrix, T.domain, Space(net.M, INF))


def lift_Q(T: Operator, net: VectorNet) -> Operator:
    """T Q : l_1^M -> codomain with columns T v_k."""
    if net.space != T.domain:
        raise SNumberError(f"vector net lives on {net.space}, domain is {T.domain}")
    return Operator(T.matrix @ net.vectors, Space(net.M, 1), T.codomain)


# --------------------------------------------------------------------------
# rank-n approximation in the entrywise max norm
# --------------------------------------------------------------------------


def _cheb_1d(K, w, iters: int = 100) -> np.ndarray:
    """argmin_c max_i |K[i, j] - w_i c| for every column j, by subgradient bisection."""
    wmax = float(np.max(np.abs(w)))
    if wmax == 0:
        return np.zeros(K.shape[1])
    bound = 2.0 * np.max(np.abs(K), axis=0) / wmax + 1e-300
    lo, hi = -bound, bound.copy()
    cols = np.arange(K.shape[1])
    for _ in range(iters):
        c = 0.5 * (lo + hi)
        R = K - np.outer(w, c)
        i = np.argmax(np.abs(R), axis=0)
        slope = -w[i] * np.sign(R[i, cols])
        up = slope > 0
        hi = np.where(up, c, hi)
        lo = np.where(up, lo, c)
    return 0.5 * (lo + hi)


def _cheb_fit(K, W) -> np.ndarray:
    """Columnwise Chebyshev fit: C minimizing max |K - W C| column by column."""
    n = W.shape[1]
    if n == 1:
        return _cheb_1d(K, W[:, 0])[None, :]
    m = W.shape[0]
    C = np.linalg.lstsq(W, K, rcond=None)[0]
    A_ub = np.block([[-W, -np.ones((m, 1))], [W, -np.ones((m, 1))]])
    cost = np.zeros(n + 1)
    cost[-1] = 1.0
    for j in range(K.shape[1]):
        res = linprog(cost, A_ub=A_ub, b_ub=np.concatenate([-K[:, j], K[:, j]]),
                      bounds=[(None, None)] * (n + 1), method="highs")
        if res.status == 0:
            C[:, j] = res.x[:n]
    return C


def linf_lowrank(K, n: int, starts, sweeps: int = 50):
    """Alternating Chebyshev fits for min over rank-n A of max |K - A|.

    ``starts`` is a list of (W, C) pairs; returns (value, A) for the best end
    point.  Each half-sweep solves its subproblems exactly, so the objective
    never increases along a run.
    """
    best = (float(np.max(np.abs(K))), np.zeros_like(K))
    for W, C in starts:
        A = W @ C
        val = float(np.max(np.abs(K - A)))
        for _ in range(sweeps):
            C = _cheb_fit(K, W)
            W = _cheb_fit(K.T, C.T).T
            new = float(np.max(np.abs(K - W @ C)))
            if new >= val * (1 - 1e-10):
                if new < val:
                    val, A = new, W @ C
                break
            val, A = new, W @ C
        if val < best[0]:
            best = (val, A)
    return best


@dataclass
class TauEstimate(Estimate):
    """Estimate of a symmetrized number; certificate is the rank-n matrix A on
    the composite, which is stored together with the two nets."""

    composite: Operator | None = None
    functional_net: FunctionalNet | None = None
    vector_net: VectorNet | None = None
    eta: tuple = field(default=(0.0, 0.0))


def _starts(K, n, factor_candidates, rng, extra):
    u, s, vt = np.linalg.svd(K)
    out = [(u[:, :n] * s[:n], vt[:n])]
    out += factor_candidates
    for _ in range(extra):
        W = rng.standard_normal((K.shape[0], n))
        out.append((W, np.linalg.lstsq(W, K, rcond=None)[0]))
    return out


def symmetrized_approx_number(T: Operator, n: int, M: int, budget: Budget | None = None,
                              seed: int = 0) -> TauEstimate:
    """a_n(J T Q) for nets of size M on the codomain dual ball and the domain ball."""
    if int(n) != n or n < 0:
        raise SNumberError(f"index n must be a nonnegative integer, got {n}")
    n = int(n)
    budget = budget or core.DEFAULT_BUDGET
    fnet = build_functional_net(T.codomain, M, derive_seed(seed, "functionals"))
    vnet = build_vector_net(T.domain, M, derive_seed(seed, "vectors"))
    F, V = fnet.functionals, vnet.vectors
    K = F.T @ T.matrix @ V
    comp = Operator(K, Space(M, 1), Space(M, INF))
    extras = dict(composite=comp, functional_net=fnet, vector_net=vnet, eta=(fnet.eta, vnet.eta),
                  seed=seed, notes=[f"eta functional {fnet.eta:.6g}, eta vector {vnet.eta:.6g}"])
    if n == 0 or not np.any(K):
        return TauEstimate(float(np.max(np.abs(K))), EXACT, np.zeros_like(K), **extras)
    if n >= core.numerical_rank(K, 1e-12):
        return TauEstimate(0.0, EXACT, K.copy(), **extras)
    # any rank-n approximant of T composes to a candidate for the composite
    cands = []
    est = approx_number(T, n, budget)
    if est.certificate is not None:
        A_T = np.asarray(est.certificate)
        u, s, vt = np.linalg.svd(A_T)
        cands.append(((F.T @ u[:, :n]) * s[:n], vt[:n] @ V))
    rng = np.random.default_rng(derive_seed(seed, "tau-starts", n))
    starts = _starts(K, n, cands, rng, min(budget.restarts, 8))
    value, A = linf_lowrank(K, n, starts, sweeps=min(budget.iters, 50))
    return TauEstimate(value, UPPER, A, restarts_used=len(starts), **extras)


def tau_duality_gap(T: Operator, n: int, M: int, budget: Budget | None = None,
                    seed: int = 0, tolerance: float | None = None) -> DualityReport:
    """Compare tau-hat_n(T) with tau-hat_n(T*) built on independent nets.

    Default tolerance is 2 eta ||T|| + 5e-3 with eta the worst measured net
    resolution of the four nets involved.
    """
    budget = budget or core.DEFAULT_BUDGET
    a = symmetrized_approx_number(T, n, M, budget, derive_seed(seed, "operator"))
    b = symmetrized_approx_number(adjoint(T), n, M, budget, derive_seed(seed, "adjoint"))
    eta = max(a.eta + b.eta)
    if tolerance is None:
        tolerance = 2 * eta * operator_norm(T, budget).value + TAU_SLACK
    gap = abs(a.value - b.value)
    return DualityReport("tau-duality", range(n, n + 1), [gap], float(tolerance),
                         [gap <= tolerance], [a.value], [b.value])
