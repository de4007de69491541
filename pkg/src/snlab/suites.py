"""Verification suites: each runs a corpus of cases and returns per-case
verdicts plus an aggregate.  Shared by the command line and the tests."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import core
from .core import Budget, Operator, SNumberError, Space, adjoint, derive_seed, operator_norm
from .schemes import (
    Scheme, check_scheme_axioms, q_compactness_profile, scheme_duality_gap,
)
from .snumbers import (
    EXACT_TOL, approx_number, duality_gap, gelfand_number, kolmogorov_number,
    nuclear_norm_euclidean, snumber_sequence, svd_oracle,
)
from .symmetrized import tau_duality_gap
from .zoo import OperatorSpec, make_diagonal, make_random, make_truncation_family

__all__ = ["SuiteResult", "SUITES", "run_suite", "property_suite"]


@dataclass
class SuiteResult:
    suite: str
    cases: list = field(default_factory=list)
    dualities: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.cases)

    def add(self, name: str, passed: bool, **info):
        self.cases.append({"case": name, "passed": bool(passed), **info})


def _duality_dict(report, case: str) -> dict:
    out = {"theorem": report.theorem_tag, "case": case, "n": list(report.n_range),
           "gaps": list(report.gaps),
           "verdicts": list(report.verdicts), "tolerance": report.tolerance,
           "relative": report.relative}
    if report.cross is not None:
        out["cross"] = _duality_dict(report.cross, case)
    return out


def _exponent(value):
    return "inf" if value in (None, "inf", float("inf")) else value


def _random_corpus(cfg: dict, seed: int, default_p=2, default_q=2):
    trials = int(cfg.get("trials", 20))
    dmax = int(cfg.get("dims", 4))
    p, q = _exponent(cfg.get("p", default_p)), _exponent(cfg.get("q", default_q))
    rng = np.random.default_rng(derive_seed(seed, "corpus"))
    for t in range(trials):
        m, n = (int(v) for v in rng.integers(1, dmax + 1, size=2))
        yield t, make_random(m, n, p, q, derive_seed(seed, "trial", t))


# --------------------------------------------------------------------------
# approximation-number axioms
# --------------------------------------------------------------------------


def property_suite(trials: int = 500, seed: int = 0, dims: int = 6, tol: float = EXACT_TOL) -> SuiteResult:
    """Norm, monotonicity, additivity, homogeneity and Lipschitz properties of
    approximation numbers on random Euclidean pairs, plus the hierarchy,
    cross-duality and trace-norm duality checks."""
    res = SuiteResult("properties")
    rng = np.random.default_rng(derive_seed(seed, "properties"))
    worst = {k: 0.0 for k in ("norm", "monotone", "additive", "homogeneous", "lipschitz",
                              "hierarchy", "cross", "nuclear", "rank")}
    for t in range(trials):
        m, n = (int(v) for v in rng.integers(1, dims + 1, size=2))
        S = Operator.from_matrix(rng.standard_normal((m, n)))
        T = Operator.from_matrix(rng.standard_normal((m, n)))
        lam = float(rng.choice([-3.0, -0.5, 0.25, 2.0]))
        top = min(m, n) + 1
        aS = [approx_number(S, k).value for k in range(top)]
        aT = [approx_number(T, k).value for k in range(top)]
        aST = [approx_number(S.with_matrix(S.matrix + T.matrix), k).value for k in range(top)]
        worst["norm"] = max(worst["norm"], abs(aT[0] - operator_norm(T).value))
        seq = snumber_sequence(T, "approximation", top - 1)
        worst["monotone"] = max(worst["monotone"], max(np.diff(seq.raw_values), default=0.0))
        for k in range(top):
            for j in range(top - k):
                if k + j <= 4 and k + j < top:
                    worst["additive"] = max(worst["additive"], aST[k + j] - aS[k] - aT[j])
        dist = operator_norm(T.with_matrix(S.matrix - T.matrix)).value
        adj = adjoint(T)
        sv = svd_oracle(T) + [0.0] * top
        for k in range(top):
            scaled = approx_number(T.with_matrix(lam * T.matrix), k).value
            worst["homogeneous"] = max(worst["homogeneous"], abs(scaled - abs(lam) * aT[k]))
            worst["lipschitz"] = max(worst["lipschitz"], abs(aS[k] - aT[k]) - dist)
            d, c = kolmogorov_number(T, k).value, gelfand_number(T, k).value
            worst["hierarchy"] = max(worst["hierarchy"], d - aT[k], c - aT[k],
                                     abs(d - sv[k]), abs(c - sv[k]))
            worst["cross"] = max(worst["cross"], abs(kolmogorov_number(adj, k).value - c))
            cert = approx_number(T, k).certificate
            if k < min(m, n):
                s = np.linalg.svd(cert, compute_uv=False)
                worst["rank"] = max(worst["rank"], float(np.max(s[k:], initial=0.0)))
        worst["nuclear"] = max(worst["nuclear"], abs(nuclear_norm_euclidean(T) - nuclear_norm_euclidean(adj)))
    limits = {"rank": 1e-8}
    for name, val in worst.items():
        res.add(name, val <= limits.get(name, tol), worst=float(val), tolerance=limits.get(name, tol),
                trials=trials)
    return res


# --------------------------------------------------------------------------
# duality suites
# --------------------------------------------------------------------------


def _duality_suite(name, kind, cfg, budget, seed, default_p, default_q, tolerance):
    res = SuiteResult(name)
    n_max = int(cfg.get("n_max", 2))
    for t, T in _random_corpus(cfg, seed, default_p, default_q):
        rep = duality_gap(T, kind, n_max, budget.with_seed(derive_seed(seed, name, t)),
                          tolerance=tolerance)
        res.dualities.append(_duality_dict(rep, f"trial {t}"))
        res.add(f"trial {t}", rep.passed, shape=list(T.shape), p=str(T.p), q=str(T.q),
                max_gap=float(max(rep.gaps + (rep.cross.gaps if rep.cross else []), default=0.0)))
    return res


def hutton_suite(cfg, budget, seed, tolerance=None):
    return _duality_suite("hutton", "approximation", cfg, budget, seed, 2, 2, tolerance)


def kolmogorov_suite(cfg, budget, seed, tolerance=None):
    return _duality_suite("kolmogorov-dual", "kolmogorov", cfg, budget, seed, 1, "inf", tolerance)


def gelfand_suite(cfg, budget, seed, tolerance=None):
    return _duality_suite("gelfand-dual", "gelfand", cfg, budget, seed, 1, "inf", tolerance)


def tau_suite(cfg, budget, seed, tolerance=None):
    res = SuiteResult("tau-dual")
    M = int(cfg.get("M", 32))
    n = int(cfg.get("n", 1))
    cfg = {"trials": 10, "dims": 2, **cfg}
    for t, T in _random_corpus(cfg, seed, 2, 2):
        if min(T.shape) <= n:
            T = make_random(2, 2, T.p, T.q, derive_seed(seed, "square", t))
        rep = tau_duality_gap(T, n, M, budget, derive_seed(seed, "tau", t), tolerance)
        res.dualities.append(_duality_dict(rep, f"trial {t}"))
        res.add(f"trial {t}", rep.passed, gap=rep.gaps[0], tolerance=rep.tolerance)
    return res


def _scheme_from(cfg, space):
    spec = cfg.get("scheme", {"kind": "subspace"})
    if isinstance(spec, str):
        spec = {"kind": spec}
    return Scheme.from_config(spec, space)


def scheme_axioms_suite(cfg, budget, seed, tolerance=None):
    res = SuiteResult("scheme-axioms")
    space = Space(int(cfg.get("dim", 4)), _exponent(cfg.get("p", 2)))
    rep = check_scheme_axioms(_scheme_from(cfg, space), int(cfg.get("n_max", 3)),
                              int(cfg.get("samples", 200)), seed)
    for axiom, ok in rep.passed.items():
        bad = [c for c in rep.counterexamples if c["axiom"] == axiom]
        res.add(axiom, ok, counterexamples=bad[:5])
    return res


def scheme_dual_suite(cfg, budget, seed, tolerance=None):
    res = SuiteResult("scheme-dual")
    trials = int(cfg.get("trials", 10))
    dmax = int(cfg.get("dims", 6))
    n_max = int(cfg.get("n_max", 3))
    p = _exponent(cfg.get("p", 2))
    rng = np.random.default_rng(derive_seed(seed, "scheme-dual"))
    for t in range(trials):
        N = int(rng.integers(1, dmax + 1))
        if "operator" in cfg:
            T = OperatorSpec.from_dict(cfg["operator"]).build()
        else:
            T = make_diagonal(rng.standard_normal(N), N, p)
        rep = scheme_duality_gap(T, _scheme_from(cfg, T.codomain), n_max,
                                 budget.with_seed(derive_seed(seed, "scheme-dual", t)), tolerance)
        res.dualities.append(_duality_dict(rep, f"trial {t}"))
        res.add(f"trial {t}", rep.passed, max_gap=float(max(rep.gaps)))
    return res


def profile_suite(cfg, budget, seed, tolerance=None):
    res = SuiteResult("profile")
    spec = cfg.get("operator", {"kind": "diagonal", "weights": {"form": "constant"}, "p": 2})
    N_range = cfg.get("N_range", list(range(2, 9)))
    family = make_truncation_family(OperatorSpec.from_dict(spec), N_range)
    scheme = cfg.get("scheme", "subspace")
    scheme = scheme.get("kind", "subspace") if isinstance(scheme, dict) else scheme
    n_max = int(cfg.get("n_max", 3))
    rep = q_compactness_profile(family, scheme, n_max, budget=budget.with_seed(seed))
    expect = cfg.get("expect")
    ok = rep.chain_ok and (rep.verdict == expect if expect else rep.verdict != "inconclusive")
    res.add("profile", ok, verdict=rep.verdict, limits=rep.limits,
            classical_verdict=rep.classical_verdict, gamma=rep.gamma, chain_ok=rep.chain_ok,
            N_values=rep.N_values, values=rep.values.tolist())
    return res


def properties_suite(cfg, budget, seed, tolerance=None):
    return property_suite(int(cfg.get("trials", 50)), seed, int(cfg.get("dims", 6)),
                          EXACT_TOL if tolerance is None else tolerance)


SUITES = {
    "properties": properties_suite,
    "hutton": hutton_suite,
    "kolmogorov-dual": kolmogorov_suite,
    "gelfand-dual": gelfand_suite,
    "tau-dual": tau_suite,
    "scheme-axioms": scheme_axioms_suite,
    "scheme-dual": scheme_dual_suite,
    "profile": profile_suite,
}


def run_suite(name: str, cfg: dict | None = None, budget: Budget | None = None, seed: int = 0,
              tolerance: float | None = None) -> SuiteResult:
    if name not in SUITES:
        raise SNumberError(f"unknown suite {name!r}; expected one of {sorted(SUITES)}")
    return SUITES[name](cfg or {}, budget or core.DEFAULT_BUDGET, seed, tolerance)
