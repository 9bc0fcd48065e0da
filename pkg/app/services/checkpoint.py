"""JSON-lines checkpoint of completed grid cells.

Line 1 is a ``config`` record, then one ``cell`` record per finished
(n, a) cell, and a ``summary`` record once the grid is complete. Only lines
terminated by a newline count; an incomplete or corrupt trailing line is
cut off on resume.
"""

import json
import logging
import os
from pathlib import Path
from typing import Any

from app.exceptions import CheckpointMismatchError
from app.schemas.search import SearchConfig
from app.services.search import CellResult, Solution, SolutionClass

logger = logging.getLogger(__name__)


def _encode_solution(s: Solution) -> dict[str, Any]:
    return {"x": str(s.x), "y": str(s.y), "value": str(s.value), "class": s.kind.value}


def _decode_solution(n: int, a: int, row: dict[str, Any]) -> Solution:
    return Solution(
        n=n, a=a, x=int(row["x"]), y=int(row["y"]), value=int(row["value"]), kind=SolutionClass(row["class"])
    )


class CheckpointStore:
    """Append-only store; the grid coordinator is its only writer."""

    def __init__(self, path: Path, config: SearchConfig):
        self.path = Path(path)
        self._fingerprint = config.fingerprint()

    def load(self) -> dict[tuple[int, int], CellResult]:
        """Completed cells from an existing file; creates the file if absent."""
        if not self.path.exists() or self.path.stat().st_size == 0:
            self._write({"kind": "config", "config": self._fingerprint})
            return {}

        data = self.path.read_bytes()
        good_end = 0
        records = []
        for raw in data.splitlines(keepends=True):
            if not raw.endswith(b"\n"):
                break
            try:
                records.append(json.loads(raw))
            except json.JSONDecodeError:
                break
            good_end += len(raw)
        if good_end < len(data):
            if data[good_end:].count(b"\n") > 1:
                raise CheckpointMismatchError(f"corrupt record inside checkpoint {self.path}")
            logger.warning("checkpoint_truncated path=%s bytes=%d", self.path, len(data) - good_end)
            with open(self.path, "r+b") as fh:
                fh.truncate(good_end)

        if not records:
            self._write({"kind": "config", "config": self._fingerprint})
            return {}
        head = records[0]
        if head.get("kind") != "config" or head.get("config") != self._fingerprint:
            raise CheckpointMismatchError(f"checkpoint {self.path} was written by a different search")

        done: dict[tuple[int, int], CellResult] = {}
        for record in records[1:]:
            if record.get("kind") != "cell":
                continue
            n, a = record["n"], record["a"]
            done[(n, a)] = CellResult(n=n, a=a, solutions=[_decode_solution(n, a, r) for r in record["solutions"]])
        logger.info("checkpoint_loaded path=%s cells=%d", self.path, len(done))
        return done

    def append_cell(self, result: CellResult) -> None:
        self._write(
            {
                "kind": "cell",
                "n": result.n,
                "a": result.a,
                "solutions": [_encode_solution(s) for s in result.solutions],
            }
        )

    def write_summary(self, cells: int, solutions: int) -> None:
        self._write({"kind": "summary", "cells": cells, "solutions": solutions})

    def _write(self, record: dict[str, Any]) -> None:
        with open(self.path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(record, separators=(",", ":")) + "\n")
            fh.flush()
            os.fsync(fh.fileno())
