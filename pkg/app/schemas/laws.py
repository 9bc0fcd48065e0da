"""Pydantic schemas for the exact verification suites."""

from typing import Literal

from pydantic import BaseModel, Field

Suite = Literal["recurrence", "pm-one", "diagonal"]


class LawPartReport(BaseModel):
    """Observed violations of one statement against its published exceptions."""

    suite: Suite
    part: str
    statement: str
    observed: list[list[int]] = Field(default_factory=list)
    stated: list[list[int]] = Field(default_factory=list)
    errata: list[list[int]] = Field(default_factory=list)
    missing: list[list[int]] = Field(default_factory=list)
    extra: list[list[int]] = Field(default_factory=list)
    equality: list[list[int]] = Field(default_factory=list)
    not_equal: list[list[int]] = Field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.missing and not self.extra and not self.not_equal


class LawReport(BaseModel):
    suite: Suite
    grid: dict[str, int]
    parts: list[LawPartReport]

    @property
    def ok(self) -> bool:
        return all(part.ok for part in self.parts)


class StabilityReport(BaseModel):
    """Violations that appear only on the doubled grid."""

    suite: Suite
    grid: dict[str, int]
    new_violations: dict[str, list[list[int]]]

    @property
    def stable(self) -> bool:
        return not any(self.new_violations.values())
