"""CSV and JSON formats.

Population CSV: ``ID,X[,Y]``. RSS CSV: ``rank[,ID][,y]``. Missing outcomes
are written as ``NA``; both ``NA`` and an empty field are read as missing.
Outcomes are written with the shortest repr that round-trips.
"""
from __future__ import annotations

import csv
import io
import json
import math
import re
from pathlib import Path
from typing import Any, Optional, TextIO, Union

from .core import Kind, PopulationFrame, RssDataset, RssRecord, validate_dataset
from .errors import DataError

PathOrFile = Union[str, Path, TextIO]

_MISSING = {"", "na", "nan", "null"}
_INT_RE = re.compile(r"^[+-]?\d+$")


def _open_text(src: PathOrFile):
    if isinstance(src, (str, Path)):
        try:
            return open(src, newline="", encoding="utf-8")
        except OSError as exc:
            raise DataError(f"cannot read {src}: {exc}") from exc
    return src


def _rows(src: PathOrFile) -> tuple[list[str], list[tuple[int, list[str]]]]:
    handle = _open_text(src)
    try:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError("CSV is empty; a header row is required") from None
        header = [h.strip() for h in header]
        rows = []
        for row in reader:
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise DataError(
                    f"line {reader.line_num}: expected {len(header)} fields, got {len(row)}"
                )
            rows.append((reader.line_num, [c.strip() for c in row]))
    finally:
        if handle is not src:
            handle.close()
    return header, rows


def _column(header: list[str], *names: str) -> Optional[int]:
    lowered = [h.lower() for h in header]
    for name in names:
        if name in lowered:
            return lowered.index(name)
    return None


def _float(text: str, line: int, what: str) -> Optional[float]:
    if text.lower() in _MISSING:
        return None
    try:
        return float(text)
    except ValueError:
        raise DataError(f"line {line}: {what} value {text!r} is not a number") from None


def _parse_id(text: str) -> Any:
    return int(text) if _INT_RE.match(text) else text


def format_float(v: Optional[float]) -> str:
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return "NA"
    return repr(float(v))


def read_population(src: PathOrFile) -> PopulationFrame:
    header, rows = _rows(src)
    ix = _column(header, "x")
    if ix is None:
        raise DataError("population CSV needs an X column")
    iid = _column(header, "id")
    iy = _column(header, "y")
    ids, xs, ys = [], [], []
    for line, row in rows:
        x = _float(row[ix], line, "X")
        if x is None:
            raise DataError(f"line {line}: X is missing")
        xs.append(x)
        ids.append(_parse_id(row[iid]) if iid is not None else len(ids) + 1)
        if iy is not None:
            ys.append(_float(row[iy], line, "Y"))
    return PopulationFrame(ids=tuple(ids), x=xs, y=ys if iy is not None else None)


def write_population(pop: PopulationFrame, dst: PathOrFile) -> None:
    lines = ["ID,X,Y" if pop.has_y else "ID,X"]
    for i, unit in enumerate(pop.ids):
        fields = [str(unit), format_float(pop.x[i])]
        if pop.has_y:
            fields.append(format_float(pop.y[i]))
        lines.append(",".join(fields))
    _write(dst, "\n".join(lines) + "\n")


def read_rss(src: PathOrFile, kind: Kind = "continuous", set_size: Optional[int] = None) -> RssDataset:
    """Parse an RSS CSV; the set size defaults to the largest rank present."""
    header, rows = _rows(src)
    ir = _column(header, "rank")
    if ir is None:
        raise DataError("RSS CSV needs a rank column")
    iid = _column(header, "id")
    iy = _column(header, "y")
    records = []
    for line, row in rows:
        try:
            rank = int(row[ir])
        except ValueError:
            raise DataError(f"line {line}: rank {row[ir]!r} is not an integer") from None
        y = _float(row[iy], line, "y") if iy is not None else None
        if y is not None and kind == "binary" and y not in (0.0, 1.0):
            raise DataError(f"line {line}: non-binary outcome {row[iy]!r}")
        unit = _parse_id(row[iid]) if iid is not None else None
        records.append(RssRecord(rank=rank, y=y, id=unit))
    if not records:
        raise DataError("RSS CSV has no data rows")
    H = set_size if set_size is not None else max(r.rank for r in records)
    return validate_dataset(RssDataset(H, tuple(records), kind))


def rss_to_csv(data: RssDataset, with_ids: Optional[bool] = None, with_y: Optional[bool] = None) -> str:
    with_ids = data.has_ids if with_ids is None else with_ids
    with_y = data.has_y if with_y is None else with_y
    cols = ["rank"] + (["ID"] if with_ids else []) + (["y"] if with_y else [])
    lines = [",".join(cols)]
    for rec in data.records:
        fields = [str(rec.rank)]
        if with_ids:
            fields.append("NA" if rec.id is None else str(rec.id))
        if with_y:
            if data.kind == "binary" and not rec.missing:
                fields.append(str(int(rec.y)))
            else:
                fields.append(format_float(None if rec.missing else rec.y))
        lines.append(",".join(fields))
    return "\n".join(lines) + "\n"


def write_rss(data: RssDataset, dst: PathOrFile, **kwargs) -> None:
    _write(dst, rss_to_csv(data, **kwargs))


def _write(dst: PathOrFile, text: str) -> None:
    if isinstance(dst, (str, Path)):
        with open(dst, "w", newline="", encoding="utf-8") as fh:
            fh.write(text)
    else:
        dst.write(text)


def _json_safe(obj):
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if hasattr(obj, "item"):  # numpy scalar
        return _json_safe(obj.item())
    return obj


def to_json(obj) -> str:
    """JSON text; non-finite floats become ``null``."""
    return json.dumps(_json_safe(obj), indent=2, allow_nan=False)


def parse_csv_text(text: str, kind: Kind = "continuous") -> RssDataset:
    return read_rss(io.StringIO(text), kind=kind)
