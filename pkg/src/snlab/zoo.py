"""Canonical operators: diagonals, weighted backward shifts, the l_1 -> l_inf
injection, seeded Gaussian matrices, and truncation families built from them.

Weight sequences are either explicit lists or closed forms given as a dict,
e.g. ``{"form": "harmonic"}`` for 1, 1/2, 1/3, ... or
``{"form": "geometric", "ratio": 0.5}`` for 1, 1/2, 1/4, ...
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .core import INF, Exponent, Operator, SNumberError, Space

__all__ = [
    "OperatorSpec", "TruncationFamily", "weight_sequence", "make_diagonal",
    "make_backward_shift", "make_injection_l1_linf", "make_random",
    "make_truncation_family", "half_certificate",
]

KINDS = ("diagonal", "backward_shift", "injection_l1_linf", "random_gaussian", "explicit")


def weight_sequence(weights, N: int) -> np.ndarray:
    """First N weights of an explicit list or closed-form description."""
    N = int(N)
    if isinstance(weights, dict):
        form = weights.get("form")
        k = np.arange(N, dtype=float)
        if form == "harmonic":
            w = 1.0 / (k + 1.0)
        elif form == "geometric":
            w = float(weights.get("ratio", 0.5)) ** k
        elif form == "power":
            w = (k + 1.0) ** (-float(weights.get("exponent", 1.0)))
        elif form == "constant":
            w = np.full(N, float(weights.get("value", 1.0)))
        else:
            raise SNumberError(f"unknown weight form {form!r}")
        return w * float(weights.get("scale", 1.0))
    w = np.asarray(weights, dtype=float).ravel()
    if w.size < N:
        raise SNumberError(f"weight list has {w.size} entries, need at least {N}")
    if not np.all(np.isfinite(w)):
        raise SNumberError("weights must be finite")
    return w[:N].copy()


def make_diagonal(weights, N: int, p=2) -> Operator:
    """diag(weights[:N]) on l_p^N."""
    w = weight_sequence(weights, N)
    space = Space(N, p)
    return Operator(np.diag(w), space, space)


def make_backward_shift(weights, N: int, p=INF) -> Operator:
    """(B_w x)_i = w_i x_{i+1} on l_p^N; the default p = inf models c_0."""
    w = weight_sequence(weights, N)
    mat = np.zeros((N, N))
    idx = np.arange(N - 1)
    mat[idx, idx + 1] = w[: N - 1]
    space = Space(N, p)
    return Operator(mat, space, space)


def make_injection_l1_linf(N: int) -> Operator:
    """The identity matrix from l_1^N to l_inf^N."""
    return Operator(np.eye(int(N)), Space(N, 1), Space(N, INF))


def half_certificate(N: int) -> np.ndarray:
    """Rank-one matrix with all entries 1/2; I - A has entries +-1/2."""
    return np.full((int(N), int(N)), 0.5)


def make_random(m: int, n: int, p=2, q=2, seed: int = 0, scale: float = 1.0) -> Operator:
    """Gaussian m x n matrix (codomain dim m, domain dim n), deterministic in seed."""
    rng = np.random.default_rng(int(seed))
    mat = rng.standard_normal((int(m), int(n))) * float(scale)
    return Operator(mat, Space(n, p), Space(m, q))


@dataclass
class TruncationFamily:
    generator: Callable[[int], Operator]
    description: str
    N_range: list = field(default_factory=list)

    def __call__(self, N: int) -> Operator:
        return self.generator(N)

    def adjoint_family(self) -> "TruncationFamily":
        from .core import adjoint

        return TruncationFamily(lambda N: adjoint(self.generator(N)),
                                f"adjoint of {self.description}", list(self.N_range))


@dataclass
class OperatorSpec:
    """JSON-facing description of an operator: ``{"kind": ..., **params}``."""

    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SNumberError(f"unknown operator kind {self.kind!r}; expected one of {KINDS}")
        self.validate()

    @classmethod
    def from_dict(cls, data: dict) -> "OperatorSpec":
        if not isinstance(data, dict) or "kind" not in data:
            raise SNumberError("operator spec must be an object with a 'kind' field")
        params = {k: v for k, v in data.items() if k != "kind"}
        return cls(data["kind"], params)

    def to_dict(self) -> dict:
        return {"kind": self.kind, **self.params}

    def _dim(self, key, default=None) -> int:
        val = self.params.get(key, default)
        if val is None or int(val) != val or int(val) < 1:
            raise SNumberError(f"{self.kind}: '{key}' must be a positive integer, got {val!r}")
        return int(val)

    def validate(self):
        P = self.params
        for key in ("p", "q"):
            if key in P:
                Exponent.of(P[key])
        if self.kind in ("diagonal", "backward_shift"):
            if "weights" not in P:
                raise SNumberError(f"{self.kind}: 'weights' is required")
            if "N" in P:
                w = weight_sequence(P["weights"], self._dim("N"))
                if P.get("sorted") and np.any(np.diff(np.abs(w)) > 0):
                    raise SNumberError("diagonal weights declared sorted are not non-increasing")
        elif self.kind == "injection_l1_linf":
            if "N" in P:
                self._dim("N")
        elif self.kind == "random_gaussian":
            self._dim("m")
            self._dim("n")
        elif self.kind == "explicit":
            mat = np.asarray(P.get("matrix"), dtype=float)
            if mat.ndim != 2 or mat.size == 0:
                raise SNumberError("explicit: 'matrix' must be a non-empty 2-d array")

    @property
    def supports_truncation(self) -> bool:
        return self.kind != "explicit"

    def build(self, N: int | None = None) -> Operator:
        """Construct the operator; N overrides the declared dimension."""
        P = self.params
        if self.kind == "explicit":
            if N is not None:
                raise SNumberError("explicit operators have a fixed size")
            mat = np.asarray(P["matrix"], dtype=float)
            return Operator.from_matrix(mat, P.get("p", 2), P.get("q", P.get("p", 2)))
        if N is None:
            N = self._dim("N") if self.kind != "random_gaussian" else None
        if self.kind == "diagonal":
            return make_diagonal(P["weights"], N, P.get("p", 2))
        if self.kind == "backward_shift":
            return make_backward_shift(P["weights"], N, P.get("p", "inf"))
        if self.kind == "injection_l1_linf":
            return make_injection_l1_linf(N)
        # random_gaussian
        m, n = self._dim("m"), self._dim("n")
        T = make_random(m, n, P.get("p", 2), P.get("q", P.get("p", 2)),
                        P.get("seed", 0), P.get("scale", 1.0))
        if N is None:
            return T
        if N > min(m, n):
            raise SNumberError(f"random_gaussian section N={N} exceeds generated size {m}x{n}")
        return Operator(T.matrix[:N, :N], Space(N, T.p), Space(N, T.q))


def make_truncation_family(spec: OperatorSpec, N_range) -> TruncationFamily:
    """Finite sections N -> T_N; each section is the leading block of the next."""
    if isinstance(spec, dict):
        spec = OperatorSpec.from_dict(spec)
    if not spec.supports_truncation:
        raise SNumberError("explicit operators have a fixed size and cannot be truncated")
    N_range = [int(N) for N in N_range]
    if not N_range or min(N_range) < 1:
        raise SNumberError("N_range must contain positive integers")
    return TruncationFamily(lambda N: spec.build(N), f"{spec.kind} sections", N_range)
