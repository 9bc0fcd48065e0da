"""Enumeration of the solutions of |F_{n,a}(x, y)| <= m.

Two strategies: an exhaustive box scan, and a proximity scan that only tests
x close to some λ_i^a·y (one factor x - λ_i^a y is at most m^(1/3) in
absolute value).
"""

import enum
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from importlib import resources
from typing import Callable, Iterable

from sympy import integer_nthroot

from app.exceptions import PreconditionError
from app.schemas.search import SearchConfig, TableEntry, TableReport
from app.services.forms import coeffs, eval_form
from app.services.roots import root_power_bracket

logger = logging.getLogger(__name__)


class SolutionClass(str, enum.Enum):
    """Kinds of solutions."""

    TRIVIAL = "trivial"
    UNIT_PM = "unit_pm"
    DIAGONAL = "diagonal"
    EXOTIC = "exotic"


@dataclass(frozen=True, slots=True)
class Solution:
    n: int
    a: int
    x: int
    y: int
    value: int
    kind: SolutionClass

    @property
    def merge_key(self) -> tuple[int, int, int, int]:
        return (self.n, self.a, self.y, self.x)


def classify(n: int, a: int, x: int, y: int, value: int) -> SolutionClass:
    """trivial: (c,0), (0,-c); unit_pm: F_{0,1}(-c,-c) = F_{0,2}(c,c) = F_{n,1}(-c,c) = c."""
    if value in (1, -1):
        if (x, y) in ((value, 0), (0, -value)):
            return SolutionClass.TRIVIAL
        if abs(x) == 1 and abs(y) == 1:
            c = value
            if (n == 0 and a == 1 and x == y == -c) or (n == 0 and a == 2 and x == y == c):
                return SolutionClass.UNIT_PM
            if a == 1 and n >= 0 and x == -c and y == c:
                return SolutionClass.UNIT_PM
    if x != 0 and abs(x) == abs(y):
        return SolutionClass.DIAGONAL
    return SolutionClass.EXOTIC


def make_solution(n: int, a: int, x: int, y: int, value: int) -> Solution:
    return Solution(n=n, a=a, x=x, y=y, value=value, kind=classify(n, a, x, y, value))


def canonicalize(s: Solution) -> Solution:
    """Representative of {(x, y), (-x, -y)} with positive value."""
    if s.value > 0:
        return s
    return make_solution(s.n, s.a, -s.x, -s.y, -s.value)


def search_naive(
    n: int, a: int, m: int, x_range: tuple[int, int], y_range: tuple[int, int]
) -> list[Solution]:
    """Every (x, y) in the closed box with 0 < |F_{n,a}(x, y)| <= m, ordered by (x, y)."""
    if m < 1:
        raise PreconditionError("m must be positive", n=n, a=a)
    form = coeffs(n, a) if a > 0 else None
    found = []
    for x in range(x_range[0], x_range[1] + 1):
        for y in range(y_range[0], y_range[1] + 1):
            value = form.evaluate(x, y) if form else eval_form(n, a, x, y)
            if value != 0 and abs(value) <= m:
                found.append(make_solution(n, a, x, y, value))
    return found


def _cube_root_ceiling(m: int) -> int:
    root, exact = integer_nthroot(m, 3)
    return int(root) if exact else int(root) + 1


def search_proximity(n: int, a: int, m: int, y_max: int, x_max: int | None = None) -> list[Solution]:
    """All solutions with 0 <= y <= y_max (and |x| <= x_max if given), ordered by (y, x).

    For each y and root i, every x with |x - λ_i^a y| <= ceil(m^(1/3)) + 1
    is tested; λ_i^a is bracketed to width < 1/(4 y_max) so the integer
    window is exact.
    """
    if a < 1 or m < 1 or y_max < 1:
        raise PreconditionError("proximity search needs a >= 1, m >= 1, y_max >= 1", n=n, a=a)
    radius = _cube_root_ceiling(m) + 1
    bits = y_max.bit_length() + 3
    shift = bits + 2
    windows = []
    for i in range(3):
        bracket = root_power_bracket(n, i, a, bits)
        # endpoints are multiples of 2^-shift
        windows.append(((bracket.lo * (1 << shift)).numerator, (bracket.hi * (1 << shift)).numerator))

    form = coeffs(n, a)
    u, v = form.u, (-form.v if a % 2 else form.v)
    found: dict[tuple[int, int], int] = {}

    root, _ = integer_nthroot(m, 3)
    for x in range(1, int(root) + 1):
        for sx in (x, -x):
            if x_max is None or abs(sx) <= x_max:
                found[(sx, 0)] = sx**3

    for y in range(1, y_max + 1):
        yy, y3 = y * y, y**3
        for lo_num, hi_num in windows:
            x_lo = ((lo_num * y) >> shift) - radius
            x_hi = -((-hi_num * y) >> shift) + radius
            if x_max is not None:
                x_lo, x_hi = max(x_lo, -x_max), min(x_hi, x_max)
            for x in range(x_lo, x_hi + 1):
                if (x, y) in found:
                    continue
                value = x * x * (x - u * y) + v * x * yy - y3
                if value != 0 and -m <= value <= m:
                    found[(x, y)] = value
    solutions = [make_solution(n, a, x, y, value) for (x, y), value in found.items()]
    solutions.sort(key=lambda s: (s.y, s.x))
    return solutions


@dataclass(frozen=True)
class CellTask:
    """One (n, a) cell of a grid search."""

    n: int
    a: int
    m: int
    y_max: int
    strategy: str
    x_max: int | None = None


@dataclass
class CellResult:
    n: int
    a: int
    solutions: list[Solution] = field(default_factory=list)


def run_cell(task: CellTask) -> CellResult:
    """Search one cell; top-level so it can run in a worker process."""
    if task.strategy == "naive":
        solutions = search_naive(task.n, task.a, task.m, (-task.x_max, task.x_max), (0, task.y_max))
        solutions.sort(key=lambda s: (s.y, s.x))
    else:
        solutions = search_proximity(task.n, task.a, task.m, task.y_max, task.x_max)
    return CellResult(n=task.n, a=task.a, solutions=solutions)


def cell_tasks(config: SearchConfig) -> list[CellTask]:
    return [
        CellTask(n=n, a=a, m=config.m, y_max=config.y_max, strategy=config.strategy, x_max=config.x_max)
        for n, a in config.cells()
    ]


def merge(results: Iterable[CellResult]) -> list[Solution]:
    """Deterministic merge: sorted by (n, a, y, x)."""
    merged = [s for result in results for s in result.solutions]
    merged.sort(key=lambda s: s.merge_key)
    return merged


def run_grid(config: SearchConfig) -> list[Solution]:
    """Sequential grid search without checkpointing."""
    results = []
    for task in cell_tasks(config):
        result = run_cell(task)
        logger.debug("cell_done n=%d a=%d solutions=%d", task.n, task.a, len(result.solutions))
        results.append(result)
    return merge(results)


ExpectedTable = dict[tuple[int, int], set[tuple[int, int]]]


def load_expected_table() -> ExpectedTable:
    """Parse app/data/exotic_solutions.txt."""
    text = resources.files("app.data").joinpath("exotic_solutions.txt").read_text(encoding="utf-8")
    table: ExpectedTable = {}
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, body = line.partition(":")
        n, a = (int(t) for t in head.split())
        table[(n, a)] = {tuple(int(c) for c in pair.split(",")) for pair in body.split()}
    return table


def exotic_table(solutions: Iterable[Solution]) -> ExpectedTable:
    """Canonical exotic solutions grouped by (n, a)."""
    table: ExpectedTable = defaultdict(set)
    for s in solutions:
        if s.kind is SolutionClass.EXOTIC and abs(s.value) == 1:
            c = canonicalize(s)
            table[(c.n, c.a)].add((c.x, c.y))
    return dict(table)


def compare_table(found: ExpectedTable, expected: ExpectedTable, config: SearchConfig) -> TableReport:
    """Diff restricted to the (n, a) cells the config covers."""
    in_range = {
        key: pairs
        for key, pairs in expected.items()
        if config.n_min <= key[0] <= config.n_max and config.a_min <= key[1] <= config.a_max
    }
    missing, extra = [], []
    for key in sorted(set(in_range) | set(found)):
        want, got = in_range.get(key, set()), found.get(key, set())
        missing.extend(TableEntry(n=key[0], a=key[1], x=x, y=y) for x, y in sorted(want - got))
        extra.extend(TableEntry(n=key[0], a=key[1], x=x, y=y) for x, y in sorted(got - want))
    return TableReport(rows_expected=len(in_range), rows_found=len(found), missing=missing, extra=extra)


def reproduce_table(
    config: SearchConfig, run: Callable[[SearchConfig], list[Solution]] | None = None
) -> TableReport:
    """Recompute the exotic solutions over ``config`` and diff them against the published table."""
    solutions = (run or run_grid)(config)
    report = compare_table(exotic_table(solutions), load_expected_table(), config)
    if report.ok:
        logger.info("table_reproduced rows=%d", report.rows_found)
    else:
        logger.error("table_diff missing=%d extra=%d", len(report.missing), len(report.extra))
    return report
