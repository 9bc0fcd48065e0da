"""Pydantic schemas for searches and their output rows."""

from pathlib import Path
from typing import Literal

from pydantic import BaseModel, Field, model_validator

from app.schemas.common import BigInt

Strategy = Literal["naive", "proximity"]


class SearchConfig(BaseModel):
    """Grid of (n, a) cells searched for |F_{n,a}(x, y)| <= m."""

    n_min: int = Field(0, ge=0)
    n_max: int = Field(10, ge=0)
    a_min: int = Field(2, ge=1)
    a_max: int = Field(70, ge=1)
    m: int = Field(1, ge=1)
    y_max: int = Field(1000, ge=1)
    x_max: int | None = Field(None, ge=1)
    strategy: Strategy = "proximity"
    checkpoint: Path | None = None

    @model_validator(mode="after")
    def _check_ranges(self):
        if self.n_min > self.n_max:
            raise ValueError("n range is empty")
        if self.a_min > self.a_max:
            raise ValueError("a range is empty")
        if self.strategy == "naive" and self.x_max is None:
            raise ValueError("naive strategy needs x_max")
        return self

    def cells(self) -> list[tuple[int, int]]:
        return [(n, a) for n in range(self.n_min, self.n_max + 1) for a in range(self.a_min, self.a_max + 1)]

    def fingerprint(self) -> dict:
        """Fields that must match for a checkpoint to be resumed."""
        return self.model_dump(mode="json", exclude={"checkpoint"})


def table_config(**overrides) -> SearchConfig:
    """Range of the published exotic table: 0<=n<=10, 1<=a<=70, |x|, y <= 1000."""
    values = {"n_min": 0, "n_max": 10, "a_min": 1, "a_max": 70, "m": 1, "y_max": 1000, "x_max": 1000}
    values.update({k: v for k, v in overrides.items() if v is not None})
    return SearchConfig(**values)


class SolutionRow(BaseModel):
    """One output line of `search`."""

    model_config = {"from_attributes": True, "populate_by_name": True}

    n: int
    a: int
    x: BigInt
    y: BigInt
    value: BigInt
    kind: str = Field(serialization_alias="class")


class TableEntry(BaseModel):
    n: int
    a: int
    x: BigInt
    y: BigInt


class TableReport(BaseModel):
    """Diff between the computed exotic solutions and the published table."""

    rows_expected: int
    rows_found: int
    missing: list[TableEntry]
    extra: list[TableEntry]

    @property
    def ok(self) -> bool:
        return not self.missing and not self.extra
