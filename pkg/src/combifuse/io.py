"""File formats: scores CSV, recall-weights CSV, and report writers.

The scores CSV is wide: one column per (system, class) pair, e.g.
``item_id,label,A:0,...,A:13,B:0,...,F:13``, which keeps even a
220k-item export a single scan-friendly file.  All report writers are
atomic (temp file + rename) and deterministic; floats are rendered with
17 significant digits so values round-trip exactly.
"""

from __future__ import annotations

import csv
import json
import logging
import math
import os
import tempfile
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .core import ScoreMatrix, canonical_label
from .errors import (
    DuplicateItemError,
    ParseError,
    SchemaError,
)

logger = logging.getLogger(__name__)

SCORES_KEY_COLUMNS = ("item_id", "label")
WEIGHTS_COLUMNS = ("system", "class_code", "recall")


def fmt_float(x: float) -> str:
    """Render a float with 17 significant digits (exact round-trip)."""
    return format(float(x), ".17g")


# ---------------------------------------------------------------------------
# scores CSV


def _parse_score_header(header: Sequence[str]) -> tuple[list[str], list[int], dict[tuple[str, int], int]]:
    for required in SCORES_KEY_COLUMNS:
        if required not in header:
            raise SchemaError(f"scores file is missing column {required!r}", column=required)
    if header[0] != "item_id" or header[1] != "label":
        raise SchemaError(
            "scores file must start with columns item_id,label", column=header[0]
        )

    systems: list[str] = []
    codes: set[int] = set()
    per_system: dict[str, set[int]] = {}
    column_of: dict[tuple[str, int], int] = {}
    for idx, name in enumerate(header[2:], start=2):
        system, sep, code_text = name.partition(":")
        if not sep or not system:
            raise SchemaError(
                f"score column {name!r} is not of the form SYSTEM:class_code", column=name
            )
        try:
            code = int(code_text)
        except ValueError:
            raise SchemaError(
                f"score column {name!r} has a non-integer class code", column=name
            ) from None
        if system not in per_system:
            systems.append(system)
            per_system[system] = set()
        if code in per_system[system]:
            raise SchemaError(f"duplicate score column {name!r}", column=name)
        per_system[system].add(code)
        codes.add(code)
        column_of[(system, code)] = idx

    if not systems:
        raise SchemaError("scores file has no SYSTEM:class_code columns", column=None)
    for system, seen in per_system.items():
        missing = codes - seen
        if missing:
            column = f"{system}:{sorted(missing)[0]}"
            raise SchemaError(
                f"scores file is missing column {column!r}", column=column
            )
    return systems, sorted(codes), column_of


def ingest_scores(path: str | Path) -> ScoreMatrix:
    """Parse and validate a scores CSV into a ScoreMatrix.

    Probability rows that do not sum to 1 within tolerance are rescaled
    and counted (see ``ScoreMatrix``); the count is logged as a warning.
    """
    path = Path(path)
    item_ids: list[str] = []
    labels: list[int] = []
    prob_rows: list[np.ndarray] = []
    seen_ids: set[str] = set()

    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError("scores file is empty", column=None) from None
        systems, codes, column_of = _parse_score_header(header)
        m, c = len(systems), len(codes)
        width = len(header)
        # Column order for reshaping each row into an (m, c) block.
        take = [column_of[(s, code)] for s in systems for code in codes]

        for row_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != width:
                raise ParseError(
                    f"row {row_no} has {len(row)} cells, expected {width}", row=row_no
                )
            item_id = row[0]
            if item_id in seen_ids:
                raise DuplicateItemError(f"duplicate item_id {item_id!r} at row {row_no}")
            seen_ids.add(item_id)
            try:
                label = int(row[1])
            except ValueError:
                raise ParseError(
                    f"non-integer label {row[1]!r} at row {row_no}", row=row_no, column="label"
                ) from None
            values = np.empty(m * c, dtype=np.float64)
            for out_idx, col_idx in enumerate(take):
                cell = row[col_idx]
                try:
                    value = float(cell)
                except ValueError:
                    raise ParseError(
                        f"non-numeric cell {cell!r} at row {row_no}, column {header[col_idx]!r}",
                        row=row_no,
                        column=header[col_idx],
                    ) from None
                if math.isnan(value) or value < 0.0 or value > 1.0:
                    raise ParseError(
                        f"probability {cell!r} outside [0, 1] at row {row_no}, "
                        f"column {header[col_idx]!r}",
                        row=row_no,
                        column=header[col_idx],
                    )
                values[out_idx] = value
            item_ids.append(item_id)
            labels.append(label)
            prob_rows.append(values.reshape(m, c))

    if not item_ids:
        raise SchemaError("scores file has no data rows", column=None)
    classes = tuple(canonical_label(code) for code in codes)
    matrix = ScoreMatrix.build(
        item_ids=item_ids,
        labels=labels,
        systems=systems,
        classes=classes,
        probs=np.stack(prob_rows, axis=0),
    )
    if matrix.renormalized_rows:
        logger.warning(
            "%s: renormalized %d probability row(s) whose sums were off by more than 1e-6",
            path.name,
            matrix.renormalized_rows,
        )
    return matrix


def write_scores_csv(matrix: ScoreMatrix, path: str | Path) -> None:
    """Emit a ScoreMatrix in the wide scores-CSV format (exact values)."""
    header = ["item_id", "label"]
    for system in matrix.systems:
        for label in matrix.classes:
            header.append(f"{system}:{label.code}")
    lines = [",".join(header)]
    for i, item_id in enumerate(matrix.item_ids):
        cells = [item_id, str(int(matrix.labels[i]))]
        for s in range(len(matrix.systems)):
            cells.extend(fmt_float(v) for v in matrix.probs[i, s, :])
        lines.append(",".join(cells))
    atomic_write_text(path, "\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# weights CSV


def load_weights(path: str | Path) -> dict[str, dict[int, float]]:
    """Parse a recall-weights CSV (``system,class_code,recall``)."""
    path = Path(path)
    weights: dict[str, dict[int, float]] = {}
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError("weights file is empty", column=None) from None
        if tuple(header) != WEIGHTS_COLUMNS:
            missing = [c for c in WEIGHTS_COLUMNS if c not in header]
            column = missing[0] if missing else header[0]
            raise SchemaError(
                f"weights file header must be {','.join(WEIGHTS_COLUMNS)}", column=column
            )
        for row_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise ParseError(f"row {row_no} has {len(row)} cells, expected 3", row=row_no)
            system = row[0]
            try:
                code = int(row[1])
            except ValueError:
                raise ParseError(
                    f"non-integer class_code {row[1]!r} at row {row_no}",
                    row=row_no,
                    column="class_code",
                ) from None
            try:
                recall = float(row[2])
            except ValueError:
                raise ParseError(
                    f"non-numeric recall {row[2]!r} at row {row_no}", row=row_no, column="recall"
                ) from None
            if math.isnan(recall) or recall < 0.0 or recall > 1.0:
                raise ParseError(
                    f"recall {row[2]!r} outside [0, 1] at row {row_no}",
                    row=row_no,
                    column="recall",
                )
            per_system = weights.setdefault(system, {})
            if code in per_system:
                raise DuplicateItemError(
                    f"duplicate weight for system {system!r}, class {code} at row {row_no}"
                )
            per_system[code] = recall
    if not weights:
        raise SchemaError("weights file has no data rows", column=None)
    return weights


def write_weights_csv(weights: Mapping[str, Mapping[int, float]], path: str | Path) -> None:
    lines = [",".join(WEIGHTS_COLUMNS)]
    for system in sorted(weights):
        for code in sorted(weights[system]):
            lines.append(f"{system},{code},{fmt_float(weights[system][code])}")
    atomic_write_text(path, "\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# report writers


def atomic_write_text(path: str | Path, text: str) -> None:
    """Write via a temp file in the target directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise


def render_json(value, indent: int = 0) -> str:
    """Serialize to JSON with floats at 17 significant digits.

    Matches ``json.dumps(..., indent=2)`` layout; keys keep insertion
    order so output is deterministic.
    """
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(value, Mapping):
        if not value:
            return "{}"
        parts = [
            f"{inner}{json.dumps(str(k))}: {render_json(v, indent + 1)}"
            for k, v in value.items()
        ]
        return "{\n" + ",\n".join(parts) + "\n" + pad + "}"
    if isinstance(value, (list, tuple)):
        if not len(value):
            return "[]"
        parts = [f"{inner}{render_json(v, indent + 1)}" for v in value]
        return "[\n" + ",\n".join(parts) + "\n" + pad + "]"
    if isinstance(value, bool) or value is None:
        return json.dumps(value)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        if not math.isfinite(value):
            raise ValueError(f"cannot serialize non-finite float {value}")
        return fmt_float(float(value))
    if isinstance(value, str):
        return json.dumps(value)
    raise TypeError(f"cannot serialize {type(value).__name__}")


def write_json_report(payload: Mapping, path: str | Path) -> None:
    atomic_write_text(path, render_json(payload) + "\n")


def write_csv_report(header: Sequence[str], rows: Iterable[Sequence], path: str | Path) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_csv_cell(cell) for cell in row))
    atomic_write_text(path, "\n".join(lines) + "\n")


def _csv_cell(cell) -> str:
    if isinstance(cell, (float, np.floating)):
        return fmt_float(float(cell))
    if isinstance(cell, (int, np.integer)):
        return str(int(cell))
    text = str(cell)
    if any(ch in text for ch in ",\"\n"):
        return '"' + text.replace('"', '""') + '"'
    return text
