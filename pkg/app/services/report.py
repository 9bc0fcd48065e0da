"""Output writers for command results: JSON lines, CSV and jinja2 text."""

import csv
import io
import json
import logging
import os
import sys
from contextlib import contextmanager
from pathlib import Path
from typing import IO, Iterable, Iterator

from jinja2 import Environment, FileSystemLoader
from pydantic import BaseModel

from app.config import OutputFormat

logger = logging.getLogger(__name__)

_TEMPLATE_DIR = os.path.join(os.path.dirname(__file__), "..", "templates")

_env = Environment(
    loader=FileSystemLoader(_TEMPLATE_DIR),
    trim_blocks=True,
    lstrip_blocks=True,
    keep_trailing_newline=True,
)


def _display(value) -> str:
    if isinstance(value, dict):
        if set(value) == {"lo", "hi"}:
            return f"[{value['lo']}, {value['hi']}]"
        return ", ".join(f"{k}={_display(v)}" for k, v in value.items())
    if isinstance(value, list):
        return "[" + ", ".join(_display(v) for v in value) + "]"
    return str(value)


_env.filters["display"] = _display


def _flat(row: BaseModel) -> dict:
    """CSV columns: nested values are written as compact JSON."""
    data = row.model_dump(mode="json", by_alias=True)
    return {
        key: json.dumps(value, separators=(",", ":")) if isinstance(value, (dict, list)) else value
        for key, value in data.items()
    }


def render(template_name: str, rows: list[dict]) -> str:
    """Render reports/<template_name>.txt.j2 over JSON-mode row dicts."""
    tmpl = _env.get_template(f"reports/{template_name}.txt.j2")
    return tmpl.render(rows=rows)


def write_rows(rows: Iterable[BaseModel], fmt: OutputFormat, stream: IO[str], template: str = "generic") -> int:
    """Write rows in the requested format; returns the number of rows written."""
    count = 0
    if fmt == "jsonl":
        for row in rows:
            stream.write(row.model_dump_json(by_alias=True) + "\n")
            count += 1
    elif fmt == "csv":
        writer = None
        for row in rows:
            flat = _flat(row)
            if writer is None:
                writer = csv.DictWriter(stream, fieldnames=list(flat), lineterminator="\n")
                writer.writeheader()
            writer.writerow(flat)
            count += 1
    else:
        data = [row.model_dump(mode="json", by_alias=True) for row in rows]
        stream.write(render(template, data))
        count = len(data)
    stream.flush()
    logger.debug("rows_written format=%s count=%d", fmt, count)
    return count


@contextmanager
def open_output(path: Path | None) -> Iterator[IO[str]]:
    """stdout, or a file opened for writing."""
    if path is None:
        yield sys.stdout
        return
    with open(path, "w", encoding="utf-8", newline="") as handle:
        yield handle


def dumps(rows: Iterable[BaseModel], fmt: OutputFormat, template: str = "generic") -> str:
    buffer = io.StringIO()
    write_rows(rows, fmt, buffer, template)
    return buffer.getvalue()
