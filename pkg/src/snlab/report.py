"""Report assembly and serialization.

JSON is the source of truth: floats are written with 17 significant digits.
CSV is a projection with 9 significant digits and fixed columns.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import re

import numpy as np

from .core import Subspace

SCHEMA_VERSION = "1"

SEQUENCE_COLUMNS = ["kind", "n", "value", "direction", "restarts", "certificate_digest"]
TABLE_COLUMNS = ["row", "label", "status"] + SEQUENCE_COLUMNS + ["error"]
VERIFY_COLUMNS = ["suite", "case", "passed", "theorem", "n", "gap", "tolerance", "verdict"]

_FLOAT_TAG = "\u0000f:"


def certificate_digest(cert) -> str | None:
    if cert is None:
        return None
    if isinstance(cert, Subspace):
        data = np.ascontiguousarray(cert.basis)
    else:
        data = np.ascontiguousarray(np.asarray(cert, dtype=float))
    h = hashlib.sha256()
    h.update(str(data.shape).encode())
    h.update(data.tobytes())
    return h.hexdigest()[:16]


def estimate_entry(n: int, est) -> dict:
    return {"n": int(n), "value": float(est.value), "direction": est.direction,
            "restarts": int(est.restarts_used), "certificate_digest": certificate_digest(est.certificate)}


def _tag_floats(obj):
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if not math.isfinite(v):
            return None
        return f"{_FLOAT_TAG}{v:.17g}"
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, dict):
        return {str(k): _tag_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, range)):
        return [_tag_floats(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_tag_floats(v) for v in obj.tolist()]
    return obj


def _float_text(text: str) -> str:
    # keep a decimal point or exponent so the value reads back as a float
    return text if re.search(r"[.eEn]", text) else text + ".0"


def to_json(report: dict) -> str:
    text = json.dumps(_tag_floats(report), indent=2, sort_keys=False)
    pattern = re.compile('"' + re.escape(json.dumps(_FLOAT_TAG)[1:-1]) + r'([^"]*)"')
    return pattern.sub(lambda m: _float_text(m.group(1)), text) + "\n"


def _fmt9(v):
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.9g}"
    return "" if v is None else v


def _write_csv(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    for row in rows:
        w.writerow({k: _fmt9(row.get(k)) for k in columns})
    return buf.getvalue()


def sequences_csv(report: dict) -> str:
    rows = [{"kind": s["kind"], **e} for s in report.get("sequences", []) for e in s["entries"]]
    return _write_csv(SEQUENCE_COLUMNS, rows)


def table_csv(report: dict) -> str:
    rows = []
    for i, r in enumerate(report["rows"]):
        base = {"row": i, "label": r.get("label", ""), "status": r["status"], "error": r.get("error")}
        entries = [{"kind": s["kind"], **e} for s in r.get("sequences", []) for e in s["entries"]]
        if not entries:
            rows.append(base)
        rows.extend({**base, **e} for e in entries)
    return _write_csv(TABLE_COLUMNS, rows)


def verify_csv(report: dict) -> str:
    rows = []
    passed = {c["case"]: c["passed"] for c in report.get("cases", [])}
    for d in report.get("dualities", []):
        for part in (d, d.get("cross")):
            if not part:
                continue
            ns = part.get("n") or range(len(part["gaps"]))
            for n, gap, ok in zip(ns, part["gaps"], part["verdicts"]):
                rows.append({"suite": report["suite"], "case": d["case"], "passed": passed.get(d["case"]),
                             "theorem": part["theorem"], "n": n, "gap": gap,
                             "tolerance": part["tolerance"], "verdict": "pass" if ok else "fail"})
    if not rows:
        rows = [{"suite": report["suite"], "case": c["case"], "passed": c["passed"]}
                for c in report.get("cases", [])]
    return _write_csv(VERIFY_COLUMNS, rows)
