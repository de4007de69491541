"""Command line front end: ``snlab compute``, ``snlab verify <suite>``, ``snlab table``.

Exit codes: 0 success, 1 verification failure (verify) or a failed row
(table), 2 invalid configuration, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import copy
import json
import logging
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .core import Budget, SNumberError
from .report import (
    SCHEMA_VERSION, estimate_entry, sequences_csv, table_csv, to_json, verify_csv,
)
from .schemes import Scheme, gen_kolmogorov_op, scheme_approx_number
from .snumbers import duality_gap, snumber_sequence
from .suites import SUITES, run_suite
from .symmetrized import symmetrized_approx_number
from .zoo import OperatorSpec

log = logging.getLogger("snlab")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3

NUMBER_TAGS = {
    "alpha": "alpha", "approximation": "alpha", "a": "alpha",
    "delta": "delta", "kolmogorov": "delta", "d": "delta",
    "c": "c", "gelfand": "c",
    "tau": "tau",
    "alphaq": "alphaQ", "deltaq": "deltaQ",
}
SNUMBER_KIND = {"alpha": "approximation", "delta": "kolmogorov", "c": "gelfand"}


class ConfigError(Exception):
    pass


class NumericError(Exception):
    pass


# --------------------------------------------------------------------------
# configuration
# --------------------------------------------------------------------------


def load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    return cfg


def _int(value, name, minimum=0):
    if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
        raise ConfigError(f"'{name}' must be an integer >= {minimum}, got {value!r}")
    return value


def apply_overrides(cfg: dict, args) -> dict:
    cfg = copy.deepcopy(cfg)
    budget = dict(cfg.get("budget") or {})
    if args.budget_restarts is not None:
        budget["restarts"] = args.budget_restarts
    if args.budget_iters is not None:
        budget["iters"] = args.budget_iters
    if budget:
        cfg["budget"] = budget
    if args.seed is not None:
        cfg["seed"] = args.seed
    if args.tolerance is not None:
        cfg["tolerance"] = args.tolerance
    return cfg


def make_budget(cfg: dict) -> Budget:
    b = cfg.get("budget") or {}
    if not isinstance(b, dict):
        raise ConfigError("'budget' must be an object with 'restarts' and 'iters'")
    return Budget(_int(b.get("restarts", 64), "budget.restarts", 1),
                  _int(b.get("iters", 500), "budget.iters", 1),
                  _int(cfg.get("seed", 0), "seed"))


def parse_numbers(cfg: dict) -> list:
    raw = cfg.get("numbers", ["alpha"])
    if isinstance(raw, str):
        raw = [raw]
    out = []
    for tag in raw:
        key = NUMBER_TAGS.get(str(tag).strip().lower())
        if key is None:
            raise ConfigError(f"unknown number kind {tag!r}; expected alpha|delta|c|tau|alphaQ|deltaQ")
        if key == "tau" and cfg.get("M") is None:
            raise ConfigError("'tau' requires the net size 'M'")
        if key in ("alphaQ", "deltaQ") and not cfg.get("scheme"):
            raise ConfigError(f"'{key}' requires a 'scheme'")
        if key not in out:
            out.append(key)
    return out


def build_compute(cfg: dict):
    """Validate a compute config; returns (operator, numbers, n_max, scheme, budget)."""
    if "operator" not in cfg:
        raise ConfigError("config needs an 'operator' spec")
    try:
        T = OperatorSpec.from_dict(cfg["operator"]).build()
    except (SNumberError, TypeError, ValueError, KeyError) as exc:
        raise ConfigError(f"invalid operator spec: {exc}") from None
    numbers = parse_numbers(cfg)
    n_max = _int(cfg.get("n_max", 2), "n_max")
    scheme = None
    if cfg.get("scheme"):
        spec = cfg["scheme"]
        spec = {"kind": spec} if isinstance(spec, str) else spec
        try:
            scheme = Scheme.from_config(spec, T.codomain)
        except (SNumberError, TypeError, ValueError) as exc:
            raise ConfigError(f"invalid scheme spec: {exc}") from None
    if "M" in cfg and cfg["M"] is not None:
        M = _int(cfg["M"], "M", 1)
        if M < 2 * max(T.domain.dim, T.codomain.dim):
            raise ConfigError(f"'M' must be at least 2*max(dims) = {2 * max(T.domain.dim, T.codomain.dim)}")
    return T, numbers, n_max, scheme, make_budget(cfg)


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------


def _sequence(T, tag, n_max, scheme, budget, cfg) -> dict:
    if tag in SNUMBER_KIND:
        seq = snumber_sequence(T, SNUMBER_KIND[tag], n_max, budget)
        ests = seq.entries
    elif tag == "tau":
        ests = [symmetrized_approx_number(T, n, cfg["M"], budget, budget.seed) for n in range(n_max + 1)]
    elif tag == "alphaQ":
        ests = [scheme_approx_number(T, scheme, n, budget) for n in range(n_max + 1)]
    else:
        ests = [gen_kolmogorov_op(T, scheme, n, budget) for n in range(n_max + 1)]
    out = {"kind": tag, "entries": [estimate_entry(n, e) for n, e in enumerate(ests)]}
    if tag == "tau":
        out["eta"] = [list(e.eta) for e in ests]
    return out


def compute_report(cfg: dict) -> dict:
    T, numbers, n_max, scheme, budget = build_compute(cfg)
    t0 = time.perf_counter()
    timings, sequences, dualities = {}, [], []
    try:
        for tag in numbers:
            t = time.perf_counter()
            sequences.append(_sequence(T, tag, n_max, scheme, budget, cfg))
            timings[tag] = time.perf_counter() - t
        if cfg.get("dualities"):
            for tag in numbers:
                if tag in SNUMBER_KIND:
                    rep = duality_gap(T, SNUMBER_KIND[tag], n_max, budget, cfg.get("tolerance"))
                    dualities.append({"theorem": rep.theorem_tag, "gaps": rep.gaps,
                                      "verdicts": rep.verdicts, "tolerance": rep.tolerance})
    except (ArithmeticError, ValueError, RuntimeError, SNumberError) as exc:
        raise NumericError(f"{type(exc).__name__}: {exc}") from exc
    timings["total"] = time.perf_counter() - t0
    return {"schema_version": SCHEMA_VERSION, "tool_version": __version__, "config": cfg,
            "sequences": sequences, "dualities": dualities, "timings": timings}


def verify_report(suite: str, cfg: dict) -> dict:
    if suite not in SUITES:
        raise ConfigError(f"unknown suite {suite!r}; expected one of {sorted(SUITES)}")
    budget = make_budget(cfg)
    t0 = time.perf_counter()
    try:
        res = run_suite(suite, cfg.get("corpus", cfg), budget, budget.seed, cfg.get("tolerance"))
    except SNumberError as exc:
        raise ConfigError(str(exc)) from None
    except (ArithmeticError, ValueError, RuntimeError) as exc:
        raise NumericError(f"{type(exc).__name__}: {exc}") from exc
    return {"schema_version": SCHEMA_VERSION, "tool_version": __version__, "config": cfg,
            "suite": suite, "passed": res.passed, "cases": res.cases, "sequences": [],
            "dualities": res.dualities, "timings": {"total": time.perf_counter() - t0}}


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("SNLAB_THREADS", "1")))
    except ValueError:
        return 1


def _table_row(i, row_cfg):
    label = row_cfg.get("label", f"row {i}")
    try:
        rep = compute_report(row_cfg)
        return {"label": label, "status": "ok", "sequences": rep["sequences"]}
    except (ConfigError, NumericError) as exc:
        return {"label": label, "status": "error", "error": str(exc), "sequences": []}


def table_report(cfg: dict) -> dict:
    rows = cfg.get("rows")
    if not isinstance(rows, list) or not rows:
        raise ConfigError("table config needs a non-empty 'rows' list")
    shared = {k: v for k, v in cfg.items() if k != "rows"}
    merged = []
    for r in rows:
        if not isinstance(r, dict):
            raise ConfigError("each table row must be an object")
        merged.append({**shared, **r})
    t0 = time.perf_counter()
    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        results = list(pool.map(_table_row, range(len(merged)), merged))
    return {"schema_version": SCHEMA_VERSION, "tool_version": __version__, "config": cfg,
            "rows": results, "passed": all(r["status"] == "ok" for r in results),
            "timings": {"total": time.perf_counter() - t0}}


# --------------------------------------------------------------------------
# entry point
# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="snlab", description="s-numbers of finite l_p operators")
    parser.add_argument("--version", action="version", version=f"snlab {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--seed", type=int)
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--format", choices=("json", "csv"))
    common.add_argument("--tolerance", type=float)
    common.add_argument("--budget-restarts", type=int)
    common.add_argument("--budget-iters", type=int)
    common.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("compute", parents=[common], help="compute s-number sequences")
    v = sub.add_parser("verify", parents=[common], help="run a verification suite")
    v.add_argument("suite", help="one of: " + ", ".join(SUITES))
    sub.add_parser("table", parents=[common], help="batch of compute rows as a matrix")
    return parser


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _error(kind: str, message: str, code: int) -> int:
    sys.stderr.write(json.dumps({"error": {"type": kind, "message": message, "exit_code": code}}) + "\n")
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) if exc.code in (0, None) else EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        with np.errstate(all="ignore"):
            return _run(args)
    except ConfigError as exc:
        return _error("invalid_config", str(exc), EXIT_CONFIG)
    except NumericError as exc:
        return _error("numeric_failure", str(exc), EXIT_NUMERIC)


def _run(args) -> int:
    # overflow is reported through non-finite estimates, not numpy warnings
    cfg = apply_overrides(load_config(args.config), args)
    if args.command == "compute":
        report = compute_report(cfg)
        fmt = args.format or "json"
        text = to_json(report) if fmt == "json" else sequences_csv(report)
        code = EXIT_OK
    elif args.command == "verify":
        report = verify_report(args.suite, cfg)
        fmt = args.format or "json"
        text = to_json(report) if fmt == "json" else verify_csv(report)
        code = EXIT_OK if report["passed"] else EXIT_FAIL
    else:
        report = table_report(cfg)
        fmt = args.format or "csv"
        text = to_json(report) if fmt == "json" else table_csv(report)
        code = EXIT_OK if report["passed"] else EXIT_FAIL
    _emit(text, args.out)
    return code


if __name__ == "__main__":
    sys.exit(main())
