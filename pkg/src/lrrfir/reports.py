"""CSV / JSON / SVG output, and the DataRecord CSV format.

Record CSV columns are ``k, u, u_tilde, y`` with one row per input sample
``k = 2 - q .. N``; ``y`` is empty for the pre-window rows ``k <= 0``.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
from pathlib import Path

import jsonschema
import numpy as np

from .sim import DataRecord

__all__ = [
    "REPORT_SCHEMA", "write_record_csv", "read_record_csv", "format_csv", "build_report",
    "validate_report", "ensure_writable", "emit_reports", "dump_json",
]

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["kind", "config", "results"],
    "additionalProperties": False,
    "properties": {
        "kind": {"enum": ["montecarlo", "nsweep", "grid", "identify", "theory"]},
        "config": {"type": "object"},
        "results": {"type": "object"},
        "recovery_reports": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["n", "upsilon", "lhs", "rhs", "holds"],
                "properties": {"n": {"type": "integer"}, "upsilon": {"type": "number"},
                               "lhs": {"type": "number"}, "rhs": {"type": "number"},
                               "holds": {"type": "boolean"}},
            },
        },
    },
}


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "" if math.isnan(v) else repr(float(v))
    return str(v)


def format_csv(rows, columns) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r.get(c)) for c in columns])
    return buf.getvalue()


def write_record_csv(rec: DataRecord, path) -> Path:
    path = Path(path)
    rows = []
    for j, k in enumerate(rec.k):
        rows.append({"k": int(k), "u": rec.u[j], "u_tilde": rec.u_tilde[j],
                     "y": rec.y[k - 1] if k >= 1 else None})
    path.write_text(format_csv(rows, ("k", "u", "u_tilde", "y")))
    return path


def read_record_csv(path) -> DataRecord:
    with open(path, newline="") as fh:
        rd = csv.DictReader(fh)
        missing = {"k", "u", "u_tilde", "y"} - set(rd.fieldnames or ())
        if missing:
            raise ValueError(f"record CSV is missing columns {sorted(missing)}")
        rows = list(rd)
    k = np.array([int(r["k"]) for r in rows])
    if k.size == 0 or np.any(np.diff(k) != 1) or k[-1] < 1:
        raise ValueError("record CSV must have consecutive k ending at N >= 1")
    q = 2 - int(k[0])
    N = int(k[-1])
    u = np.array([float(r["u"]) for r in rows])
    ut = np.array([float(r["u_tilde"]) for r in rows])
    y = np.array([float(r["y"]) for r in rows if int(r["k"]) >= 1])
    return DataRecord(u=u, u_tilde=ut, y=y, N=N, q=q)


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return None if not math.isfinite(obj) else float(obj)
    return obj


def dump_json(obj) -> str:
    return json.dumps(_clean(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def build_report(kind: str, config: dict, results: dict, recovery=None) -> dict:
    """Report dict; the config echo leaves out ``out_dir`` so the bytes do not
    depend on where the report is written."""
    config = {k: v for k, v in config.items() if k != "out_dir"}
    rep = {"kind": kind, "config": config, "results": results}
    if recovery is not None:
        rep["recovery_reports"] = recovery
    return _clean(rep)


def validate_report(report: dict) -> None:
    jsonschema.validate(report, REPORT_SCHEMA)


def ensure_writable(out_dir) -> Path:
    """Create ``out_dir`` if needed and fail now if files cannot be written there."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if not os.access(out, os.W_OK):
        raise PermissionError(f"output directory {out} is not writable")
    return out


def _svg(result, path):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "lrrfir"
    fig, ax = plt.subplots(figsize=(6, 4))
    if result.kind == "grid":
        for i, su in enumerate(result.sigma_us):
            ok = ~result.failed[i]
            ax.plot(result.C[i, ok], result.E[i, ok], marker="o", label=f"sigma_u={su:g}")
        ax.set_xlabel("complexity ||x||_0")
        ax.set_ylabel("fitting error ||y - Ux||^2")
    elif result.kind == "nsweep":
        for m in ("LRR", "LS", "TLS"):
            Ns, v = result.series(m, "TN0")
            ax.plot(Ns, v, marker="o", label=m)
        ax.set_xscale("log")
        ax.set_xlabel("N")
        ax.set_ylabel("mean TN0")
    else:
        rows = list(result.rows())
        for m in ("LRR", "LS", "TLS"):
            rs = [r for r in rows if r["method"] == m]
            ax.scatter([r["TN0"] for r in rs], [r["FIT"] for r in rs], label=m, s=12)
        ax.set_xlabel("TN0")
        ax.set_ylabel("FIT [%]")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def emit_reports(result, config: dict, out_dir, svg: bool = False) -> dict:
    """Write ``<kind>.csv``, ``<kind>_report.json`` and optionally ``<kind>.svg``.

    Returns the written paths keyed by ``csv``, ``json`` and ``svg``.
    """
    out = ensure_writable(out_dir)
    paths = {}
    csv_path = out / f"{result.kind}.csv"
    csv_path.write_text(format_csv(result.rows(), result.csv_columns))
    paths["csv"] = csv_path
    summary = result.summary()
    recovery = summary.pop("recovery_reports", None)
    report = build_report(result.kind, config, summary, recovery)
    validate_report(report)
    json_path = out / f"{result.kind}_report.json"
    json_path.write_text(dump_json(report))
    paths["json"] = json_path
    if svg:
        svg_path = out / f"{result.kind}.svg"
        _svg(result, svg_path)
        paths["svg"] = svg_path
    return paths
