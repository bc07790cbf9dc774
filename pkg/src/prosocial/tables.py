"""CSV/JSON table I/O with atomic writes and round-trip-exact floats."""
from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Sequence

from .synthsurvey import SURVEY_FIELDS, CountrySpec, SurveyRow

FLOAT_FORMAT = ".17g"

COUNTRY_FIELDS = tuple(CountrySpec.__dataclass_fields__)


def format_value(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return format(value, FLOAT_FORMAT)
    if value is None:
        return ""
    return str(value)


def write_atomic(path: Path, data: bytes) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def csv_bytes(records: Sequence[Mapping[str, object]], fieldnames: Sequence[str]) -> bytes:
    buf = io.StringIO(newline="")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(fieldnames)
    for rec in records:
        writer.writerow([format_value(rec[k]) for k in fieldnames])
    return buf.getvalue().encode("utf-8")


def json_bytes(obj) -> bytes:
    return (json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n").encode("utf-8")


def write_table(
    path: Path, records: Sequence[Mapping[str, object]], fieldnames: Sequence[str], fmt: str = "csv"
) -> Path:
    """Write ``records`` to ``path`` plus the extension ``.fmt``."""
    path = Path(path)
    path = path.with_name(f"{path.name}.{fmt}")
    if fmt == "csv":
        write_atomic(path, csv_bytes(records, fieldnames))
    elif fmt == "json":
        rows = [{k: rec[k] for k in fieldnames} for rec in records]
        write_atomic(path, json_bytes({"columns": list(fieldnames), "rows": rows}))
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return path


def read_csv(path: Path) -> List[Dict[str, str]]:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def _typed(cls, raw: Mapping[str, str], fields: Iterable[str]):
    types = {name: f.type for name, f in cls.__dataclass_fields__.items()}
    kwargs = {}
    for name in fields:
        kind = types[name]
        value = raw[name]
        kwargs[name] = int(value) if kind in ("int", int) else float(value) if kind in ("float", float) else value
    return cls(**kwargs)


def write_microdata(path: Path, rows: Sequence[SurveyRow], fmt: str = "csv") -> Path:
    return write_table(path, [r.__dict__ for r in rows], SURVEY_FIELDS, fmt)


def read_microdata(path: Path) -> List[SurveyRow]:
    return [_typed(SurveyRow, raw, SURVEY_FIELDS) for raw in read_csv(path)]


def write_countries(path: Path, countries: Sequence[CountrySpec], fmt: str = "csv") -> Path:
    return write_table(path, [c.__dict__ for c in countries], COUNTRY_FIELDS, fmt)


def read_countries(path: Path) -> List[CountrySpec]:
    return [_typed(CountrySpec, raw, COUNTRY_FIELDS) for raw in read_csv(path)]
