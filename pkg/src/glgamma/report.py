"""Deterministic report emission: canonical JSON and terminal summaries.

A report is {suite, params, ok, cases, timing}; each case is
{name, status, witness?, lhs?, rhs?, reason?, ...} with exact values
serialized as rational strings.  Written files are byte-identical
across runs with the same configuration and seed: keys are sorted and
the timing field is always null in files (wall-clock goes to stderr).
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

REPORT_SCHEMA = "1"


def finalize_report(report: dict) -> dict:
    """Stable key order with an explicit (null) timing slot."""
    return {"suite": report["suite"], "params": report["params"],
            "ok": report["ok"], "cases": report["cases"], "timing": None}


def reports_to_json(reports: list[dict]) -> str:
    doc = {"schema": REPORT_SCHEMA, "ok": all(r["ok"] for r in reports),
           "reports": [finalize_report(r) for r in reports]}
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def write_reports(path: Path | str, reports: list[dict]) -> Path:
    """Atomic write (temp-then-rename) of the canonical JSON document."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    text = reports_to_json(reports)
    fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def count_statuses(report: dict) -> tuple[int, int, int]:
    statuses = [case["status"] for case in report["cases"]]
    return (statuses.count("pass"), statuses.count("skipped"),
            statuses.count("fail"))


def summarize(report: dict) -> str:
    npass, nskip, nfail = count_statuses(report)
    verdict = "PASS" if report["ok"] else "FAIL"
    bits = [f"{npass} pass"]
    if nskip:
        bits.append(f"{nskip} skipped")
    if nfail:
        bits.append(f"{nfail} fail")
    params = report.get("params", {})
    shown = ", ".join(f"{k}={params[k]}" for k in params
                      if k not in ("seed", "extra"))
    return f"{report['suite']}[{shown}]: {verdict} ({', '.join(bits)})"


def failing_lines(report: dict, limit: int = 5) -> list[str]:
    lines = []
    for case in report["cases"]:
        if case["status"] == "fail":
            detail = case.get("witness") or case.get("reason") or ""
            lines.append(f"  FAIL {case['name']}"
                         + (f" ({detail})" if detail else ""))
            if len(lines) >= limit:
                break
    return lines


def overall_exit(reports: list[dict]) -> int:
    return 0 if all(r["ok"] for r in reports) else 1
