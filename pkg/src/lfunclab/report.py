"""Deterministic report emission: CSV and JSON-lines.

Floats are rendered with 17 significant digits so every value survives a
round trip through a generic parser, and two runs with identical resolved
configuration produce byte-identical files.  The resolved configuration
is embedded in the report itself: a '# config' comment line for CSV, a
leading config record for JSON-lines.
"""

from __future__ import annotations

import json
import math

from .errors import ReportIOError, UsageError


def format_scalar(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return format(value, ".17g")
    if isinstance(value, (int, str)):
        return str(value)
    if isinstance(value, complex):
        raise UsageError("flatten complex values into re/im columns before emitting")
    return str(value)


def _json_scalar(value) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value) or math.isinf(value):
            return '"%s"' % format_scalar(value)
        return format(value, ".17g")
    if isinstance(value, int):
        return str(value)
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_json_scalar(v) for v in value) + "]"
    if isinstance(value, dict):
        return _json_object(value)
    raise UsageError(f"cannot serialize {type(value).__name__} into a report")


def _json_object(record: dict) -> str:
    parts = [f"{json.dumps(str(k))}: {_json_scalar(v)}" for k, v in record.items()]
    return "{" + ", ".join(parts) + "}"


def emit_report(records, fmt: str, path: str, columns=None, config: dict | None = None) -> None:
    """Write homogeneous records to path as CSV or JSON-lines.

    Column order comes from `columns` or the first record's insertion
    order; an empty record list with explicit columns yields a header-only
    CSV.
    """
    records = list(records)
    if fmt not in ("csv", "jsonl"):
        raise UsageError(f"unknown report format {fmt!r}")
    if columns is None:
        if not records:
            raise UsageError("empty record sets need an explicit column list")
        columns = list(records[0].keys())
    lines: list[str] = []
    if fmt == "csv":
        if config is not None:
            lines.append("# config = " + _json_object(_sorted_config(config)))
        lines.append(",".join(columns))
        for rec in records:
            lines.append(",".join(_csv_cell(rec.get(c)) for c in columns))
    else:
        if config is not None:
            lines.append(_json_object({"config": _sorted_config(config)}))
        for rec in records:
            lines.append(_json_object({c: rec.get(c) for c in columns}))
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise ReportIOError(f"cannot write report to {path}: {exc}")


def _csv_cell(value) -> str:
    text = format_scalar(value)
    if "," in text or '"' in text or "\n" in text:
        return '"' + text.replace('"', '""') + '"'
    return text


def _sorted_config(config: dict) -> dict:
    return {k: config[k] for k in sorted(config)}
