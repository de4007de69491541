"""Local search for minimax subspace fits.

Every infimum in the package (approximation, Kolmogorov, Gelfand numbers and
their scheme variants) can be written as

    minimize  max_k || y_k - W c_k ||_r

over an n-column matrix W and coefficients c_k, where either each c_k is free
or c_k = L^T z_k is tied to a second factor L.  The problem is solved in
epigraph form with SLSQP from many starting points.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import minimize

from .core import Exponent, column_norms, dual_vectors


@dataclass
class FitResult:
    value: float
    W: np.ndarray
    coef: np.ndarray  # C (n x K) for free fits, L (e x n) for tied fits


class MinimaxFit:
    """max_k ||Y[:, k] - W c_k||_r with free or tied coefficients."""

    def __init__(self, Y, n: int, r, Z=None):
        self.Y = np.asarray(Y, dtype=float)
        self.d, self.K = self.Y.shape
        self.n = int(n)
        self.r = Exponent.of(r)
        self.Z = None if Z is None else np.asarray(Z, dtype=float)
        self.tied = self.Z is not None
        self.e = self.Z.shape[0] if self.tied else 0
        self.nw = self.d * self.n
        self.nc = self.e * self.n if self.tied else self.n * self.K
        self.use_aux = self.r.ratio == 1
        self.nvar = self.nw + self.nc + 1 + (self.d * self.K if self.use_aux else 0)

    # -- parameter packing -------------------------------------------------
    def coefficients(self, W, coef):
        return coef.T @ self.Z if self.tied else coef

    def residual(self, W, coef):
        return self.Y - W @ self.coefficients(W, coef)

    def objective(self, W, coef) -> float:
        return float(np.max(column_norms(self.residual(W, coef), self.r)))

    def _unpack(self, x):
        W = x[: self.nw].reshape(self.d, self.n)
        c = x[self.nw: self.nw + self.nc]
        coef = c.reshape(self.e, self.n) if self.tied else c.reshape(self.n, self.K)
        t = x[self.nw + self.nc]
        aux = x[self.nw + self.nc + 1:].reshape(self.d, self.K) if self.use_aux else None
        return W, coef, t, aux

    def _pack(self, W, coef, t, aux=None):
        parts = [W.ravel(), coef.ravel(), [t]]
        if self.use_aux:
            parts.append(aux.ravel())
        return np.concatenate(parts)

    def _jac_E(self, W, C, coef):
        """d vec(E) / d (W, coef), rows indexed by (i, k)."""
        d, K, n = self.d, self.K, self.n
        if not hasattr(self, "_idx"):
            i, k, l = np.meshgrid(np.arange(d), np.arange(K), np.arange(n), indexing="ij")
            self._idx = ((i * K + k).ravel(), (i * n + l).ravel(), (l * K + k).ravel(),
                         i.ravel(), k.ravel(), l.ravel())
        rows, wcols, ccols, ii, kk, ll = self._idx
        J = np.zeros((d * K, self.nw + self.nc))
        J[rows, wcols] = -C[ll, kk]
        if self.tied:
            J[:, self.nw:] = -np.einsum("il,ak->ikal", W, self.Z).reshape(d * K, self.e * n)
        else:
            J[rows, self.nw + ccols] = -W[ii, ll]
        return J

    def _constraints(self, x):
        W, coef, t, aux = self._unpack(x)
        C = self.coefficients(W, coef)
        E = self.Y - W @ C
        JE = self._jac_E(W, C, coef)
        nv = self.nw + self.nc
        d, K = self.d, self.K
        r = self.r
        if r.is_inf:
            e = E.ravel()
            vals = np.concatenate([t - e, t + e])
            jac = np.zeros((2 * d * K, self.nvar))
            jac[: d * K, :nv] = -JE
            jac[d * K:, :nv] = JE
            jac[:, nv] = 1.0
            return vals, jac
        if self.use_aux:
            e, a = E.ravel(), aux.ravel()
            vals = np.concatenate([a - e, a + e, t - aux.sum(axis=0)])
            jac = np.zeros((2 * d * K + K, self.nvar))
            ia = nv + 1 + np.arange(d * K)
            jac[: d * K, :nv] = -JE
            jac[np.arange(d * K), ia] = 1.0
            jac[d * K: 2 * d * K, :nv] = JE
            jac[d * K + np.arange(d * K), ia] = 1.0
            jac[2 * d * K:, nv] = 1.0
            # aux index (i, k) -> column nv + 1 + i*K + k
            rows = 2 * d * K + np.tile(np.arange(K), d)
            jac[rows, ia] = -1.0
            return vals, jac
        JE3 = JE.reshape(d, K, nv)
        if r.ratio == 2:
            vals = t * t - np.sum(E * E, axis=0)
            jac = np.zeros((K, self.nvar))
            jac[:, :nv] = -2.0 * np.einsum("ik,ikv->kv", E, JE3)
            jac[:, nv] = 2.0 * t
            return vals, jac
        G = dual_vectors(E, r)
        vals = t - column_norms(E, r)
        jac = np.zeros((K, self.nvar))
        jac[:, :nv] = -np.einsum("ik,ikv->kv", G, JE3)
        jac[:, nv] = 1.0
        return vals, jac

    def polish(self, W, coef, iters: int = 200) -> FitResult:
        """Run SLSQP from (W, coef); returns the better of start and end."""
        E = self.residual(W, coef)
        t0 = float(np.max(column_norms(E, self.r))) * 1.001 + 1e-12
        x0 = self._pack(W, coef, t0, np.abs(E) * 1.001 + 1e-12 if self.use_aux else None)
        cache = {}

        def cons(x):
            key = x.tobytes()
            if key not in cache:
                cache.clear()
                cache[key] = self._constraints(x)
            return cache[key]

        obj_grad = np.zeros(self.nvar)
        obj_grad[self.nw + self.nc] = 1.0
        res = minimize(
            lambda x: (x[self.nw + self.nc], obj_grad),
            x0,
            jac=True,
            method="SLSQP",
            constraints=[{"type": "ineq", "fun": lambda x: cons(x)[0],
                          "jac": lambda x: cons(x)[1]}],
            options={"maxiter": iters, "ftol": 1e-13},
        )
        W1, coef1, _, _ = self._unpack(res.x)
        start = FitResult(self.objective(W, coef), W, coef)
        if not np.all(np.isfinite(res.x)):
            return start
        end = FitResult(self.objective(W1, coef1), W1.copy(), coef1.copy())
        return end if end.value <= start.value else start


def multistart(problem: MinimaxFit, starts: Callable[[int, np.random.Generator], tuple],
               restarts: int, seed: int, iters: int = 200, keep: int = 4) -> list[FitResult]:
    """Polish ``restarts`` starting points; return the ``keep`` best fits."""
    rng = np.random.default_rng(seed)
    results = []
    for r in range(max(1, restarts)):
        W0, c0 = starts(r, rng)
        results.append(problem.polish(W0, c0, iters))
    results.sort(key=lambda f: f.value)
    return results[:keep]


def free_starts(Y, n):
    """Starting points for free-coefficient fits: dominant singular subspace first,
    then random subspaces and random subsets of the targets."""
    d, K = Y.shape
    u = np.linalg.svd(Y, full_matrices=False)[0]
    scale = max(float(np.max(np.abs(Y))), 1e-300)

    def make(r, rng):
        if r == 0:
            W = u[:, :n] if u.shape[1] >= n else np.hstack([u, rng.standard_normal((d, n - u.shape[1]))])
        elif r % 3 == 1 and K >= n:
            cols = rng.choice(K, size=n, replace=False)
            W = Y[:, cols] / scale + 1e-3 * rng.standard_normal((d, n))
        else:
            W = rng.standard_normal((d, n))
        W = np.linalg.qr(W)[0] if d >= n else W
        C = np.linalg.lstsq(W, Y, rcond=None)[0]
        return W, C

    return make


def tied_starts(M, n):
    """Starting points for M ~ W L^T: truncated SVD first, then random factors."""
    u, s, vt = np.linalg.svd(M)
    d, e = M.shape
    k = min(n, s.size)

    def make(r, rng):
        if r == 0:
            W = np.zeros((d, n))
            L = np.zeros((e, n))
            W[:, :k] = u[:, :k] * s[:k]
            L[:, :k] = vt[:k].T
            return W, L
        W = rng.standard_normal((d, n))
        if r % 2:
            L = (np.linalg.pinv(W) @ M).T
        else:
            L = rng.standard_normal((e, n)) * (s[0] / np.sqrt(max(d, 1)))
        return W, L

    return make
