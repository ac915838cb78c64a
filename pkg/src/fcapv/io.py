"""Case-report files: CSV (``case_id,sex,age_band,drugs,events``) and JSON lines."""
from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Iterable

from .context import CaseReport, ContextError

FIELDS = ("case_id", "sex", "age_band", "drugs", "events")
LIST_SEP = ";"


class SchemaError(ContextError):
    pass


def _split(value) -> list[str]:
    if value is None:
        return []
    if isinstance(value, list):
        items = value
    else:
        items = str(value).split(LIST_SEP)
    return [str(x).strip() for x in items if str(x).strip()]


def _record(row: dict, where: str) -> CaseReport:
    case_id = str(row.get("case_id") or "").strip()
    if not case_id:
        raise SchemaError(f"{where}: missing case_id")
    demographics = [str(row[k]).strip() for k in ("sex", "age_band") if row.get(k) not in (None, "")]
    return CaseReport(case_id, demographics, _split(row.get("drugs")), _split(row.get("events")))


def read_csv(path) -> list[CaseReport]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = [f for f in FIELDS if f not in (reader.fieldnames or [])]
        if missing:
            raise SchemaError(f"{path}: header lacks column(s) {', '.join(missing)}")
        # line 1 is the header
        return [_record(row, f"{path} row {i}") for i, row in enumerate(reader, start=2)]


def read_jsonl(path) -> list[CaseReport]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for i, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"{path} row {i}: invalid JSON ({exc.msg})") from None
            if not isinstance(row, dict):
                raise SchemaError(f"{path} row {i}: expected an object")
            out.append(_record(row, f"{path} row {i}"))
    return out


def read_cases(path, fmt: str | None = None) -> list[CaseReport]:
    if fmt is None:
        fmt = "jsonl" if Path(path).suffix in (".jsonl", ".ndjson") else "csv"
    if fmt == "csv":
        return read_csv(path)
    if fmt == "jsonl":
        return read_jsonl(path)
    raise ValueError(f"unknown input format {fmt!r}")


def write_csv(records: Iterable[dict], fh) -> None:
    """Write rows with keys case_id, sex, age_band, drugs (list), events (list)."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(FIELDS)
    for r in records:
        w.writerow([r["case_id"], r.get("sex", ""), r.get("age_band", ""),
                    LIST_SEP.join(r["drugs"]), LIST_SEP.join(r["events"])])
