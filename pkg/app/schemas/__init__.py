from app.schemas.common import BigInt, IntervalOut
from app.schemas.laws import LawPartReport, LawReport, StabilityReport
from app.schemas.search import SearchConfig, SolutionRow, TableEntry, TableReport, table_config

__all__ = [
    "BigInt",
    "IntervalOut",
    "LawPartReport",
    "LawReport",
    "StabilityReport",
    "SearchConfig",
    "SolutionRow",
    "TableEntry",
    "TableReport",
    "table_config",
]
