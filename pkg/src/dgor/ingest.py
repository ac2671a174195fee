"""Ingestion of trials recording per-stage quality-of-life scores.

The source schema is ``patient_id,stage1,responder,stage2,y1,y2`` with y2
empty for responders. Each patient's overall score is y1 for a responder and
the mean of y1 and y2 otherwise; the composite is then cut into three ordered
categories: below 3 -> 1 (poor), exactly 3 -> 2 (fair), above 3 -> 3 (good).
Half-integer composites fall strictly on one side of each cut.
"""
from __future__ import annotations

import csv
import io

from .errors import BadCategory, MissingY2ForNonResponder, SchemaError
from .model import SmartDataset, SmartDesign, Trajectory

QOL_HEADER = ["patient_id", "stage1", "responder", "stage2", "y1", "y2"]


def composite_category(responder: bool, y1: float, y2: float | None) -> int:
    if responder:
        y = y1
    else:
        if y2 is None:
            raise MissingY2ForNonResponder("non-responder lacks a stage-2 outcome")
        y = (y1 + y2) / 2.0
    if y < 3:
        return 1
    if y == 3:
        return 2
    return 3


def ingest_stard_like(text: str, design: SmartDesign) -> SmartDataset:
    """Parse a per-stage QOL CSV into a standard 3-category dataset.

    Responders are recorded on their continuation arm regardless of the file's
    stage2 value (a follow-up label is common); a stage-2 score present for a
    responder is ignored, matching the composite formula.
    """
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != QOL_HEADER:
        raise SchemaError(f"expected header {','.join(QOL_HEADER)!r}, got {reader.fieldnames!r}")
    rows = []
    for lineno, row in enumerate(reader, start=2):
        if row["responder"] not in ("0", "1"):
            raise SchemaError(f"line {lineno}: responder must be 0 or 1")
        responder = row["responder"] == "1"

        def score(field: str) -> float | None:
            raw = (row[field] or "").strip()
            if not raw:
                return None
            try:
                return float(raw)
            except ValueError:
                raise BadCategory(f"line {lineno}: {field} value {raw!r} is not a number")

        y1 = score("y1")
        if y1 is None:
            raise SchemaError(f"line {lineno}: y1 is required for every patient")
        y2 = score("y2")
        if not responder and y2 is None:
            raise MissingY2ForNonResponder(f"line {lineno}: non-responder lacks y2")
        stage1 = row["stage1"]
        rows.append(Trajectory(
            patient_id=row["patient_id"],
            stage1=stage1,
            responder=responder,
            stage2=stage1 if responder else row["stage2"],
            outcome=composite_category(responder, y1, y2),
        ))
    return SmartDataset(design=design, trajectories=tuple(rows), j=3)
