"""Tabular rendering of count reports and verification diffs."""

from __future__ import annotations

import json
from collections.abc import Iterable
from enum import Enum
from pathlib import Path

import pandas as pd
from loguru import logger

from bm_census.enumeration import CountReport
from bm_census.utils import relpath
from bm_census.verification import VerificationDiff

REPORT_COLUMNS = ["key", "class", "identity", "order", "raw", "iso", "iso_anti", "engine"]
TIMING_COLUMNS = ["elapsed_s", "nodes_visited"]
DIFF_COLUMNS = ["key", "order", "metric", "expected", "computed", "match", "erratum"]


class OutputFormat(str, Enum):
    TEXT = "text"
    CSV = "csv"
    JSON = "json"


def reports_frame(reports: Iterable[CountReport], include_timing: bool = False) -> pd.DataFrame:
    rows = []
    for r in reports:
        row = {
            "key": r.key,
            "class": r.bm_class,
            "identity": r.identity,
            "order": r.order,
            "raw": r.raw_count,
            "iso": r.iso_classes,
            "iso_anti": r.iso_anti_classes,
            "engine": r.engine.value,
        }
        if include_timing:
            row["elapsed_s"] = round(r.elapsed, 3)
            row["nodes_visited"] = r.nodes_visited
        rows.append(row)
    columns = REPORT_COLUMNS + (TIMING_COLUMNS if include_timing else [])
    frame = pd.DataFrame(rows, columns=columns)
    int_cols = ["order", "raw", "iso", "iso_anti"] + (["nodes_visited"] if include_timing else [])
    frame[int_cols] = frame[int_cols].astype("Int64")
    return frame


def diffs_frame(diffs: Iterable[VerificationDiff]) -> pd.DataFrame:
    rows = [
        {
            "key": d.key,
            "order": d.order,
            "metric": d.metric.value,
            # mixed int/str columns are rendered as text for stable output
            "expected": "" if d.expected is None else str(d.expected),
            "computed": "" if d.computed is None else str(d.computed),
            "match": d.match,
            "erratum": d.erratum,
        }
        for d in diffs
    ]
    frame = pd.DataFrame(rows, columns=DIFF_COLUMNS)
    frame["order"] = frame["order"].astype("Int64")
    return frame


def render(frame: pd.DataFrame, fmt: OutputFormat = OutputFormat.TEXT) -> str:
    if fmt is OutputFormat.CSV:
        return frame.to_csv(index=False)
    if fmt is OutputFormat.JSON:
        records = json.loads(frame.to_json(orient="records"))
        return json.dumps(records, indent=2, ensure_ascii=False) + "\n"
    if frame.empty:
        return "(no rows)\n"
    # missing keys and class counts print as "-"
    return frame.astype("string").fillna("-").to_string(index=False) + "\n"


def write_report(text: str, path: Path):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    logger.success(f"📝 Report written to {relpath(path)}")
