"""Exact checks of the published inequalities on u_a, v_a and F_{n,a}.

Each check runs over a finite grid with big-integer arithmetic and compares
the observed violations with the exception lists shipped in
app/data/lemma_exceptions.json.
"""

import json
import logging
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from typing import Any, Callable, Iterable

from app.exceptions import PreconditionError
from app.schemas.laws import LawPartReport, LawReport, StabilityReport, Suite
from app.services.forms import coefficient_sequence

logger = logging.getLogger(__name__)

DEFAULT_GRIDS: dict[str, dict[str, int]] = {
    "recurrence": {"n_max": 100, "a_max": 100},
    "pm-one": {"n_max": 300, "a_max": 300},
    "diagonal": {"n_max": 50, "a_max": 30, "x_max": 20},
}

Point = tuple[int, ...]


@lru_cache
def load_lemma_exceptions() -> dict[str, Any]:
    text = resources.files("app.data").joinpath("lemma_exceptions.json").read_text(encoding="utf-8")
    return {key: value for key, value in json.loads(text).items() if not key.startswith("_")}


def _sorted(points: Iterable[Point]) -> list[list[int]]:
    return [list(p) for p in sorted(points)]


def _part(
    suite: Suite,
    part: str,
    statement: str,
    observed: set[Point],
    stated: Iterable[Point],
    errata: Iterable[Point],
    in_grid: Callable[[Point], bool],
    equality: Iterable[Point] = (),
    ties: set[Point] | None = None,
) -> LawPartReport:
    stated = {tuple(p) for p in stated if in_grid(tuple(p))}
    errata = {tuple(p) for p in errata if in_grid(tuple(p))}
    equality = {tuple(p) for p in equality if in_grid(tuple(p))}
    expected = stated | errata
    report = LawPartReport(
        suite=suite,
        part=part,
        statement=statement,
        observed=_sorted(observed),
        stated=_sorted(stated),
        errata=_sorted(errata),
        missing=_sorted(expected - observed),
        extra=_sorted(observed - expected),
        equality=_sorted(equality),
        not_equal=_sorted(equality - (ties or set())),
    )
    if not report.ok:
        logger.error(
            "law_mismatch suite=%s part=%s missing=%s extra=%s not_equal=%s",
            suite,
            part,
            report.missing,
            report.extra,
            report.not_equal,
        )
    return report


def verify_recurrence_lemma(n_max: int, a_max: int) -> LawReport:
    """Every inequality of the coefficient lemma on 0 <= n <= n_max, 1 <= a <= a_max."""
    if n_max < 5 or a_max < 5:
        raise PreconditionError("recurrence grid must be at least 5 x 5", detail={"n_max": n_max, "a_max": a_max})
    exceptions = load_lemma_exceptions()
    observed: dict[str, set[Point]] = {key: set() for key in exceptions}
    # violations where both sides are equal
    ties: dict[str, set[Point]] = {key: set() for key in exceptions}

    for n in range(n_max + 1):
        seq = coefficient_sequence(n, a_max)
        u = [c.u for c in seq]
        v = [c.v for c in seq]
        if v[1] != u[1] + v[0]:
            observed["v_base"].add((n, 1))
        for a in range(1, a_max + 1):
            if abs(u[a]) > v[a]:
                observed["u_below_v"].add((n, a))
            if not v[a] > 2 * v[a - 1]:
                observed["v_doubling"].add((n, a))
            if n >= 1:
                if not u[a] > 0:
                    observed["positivity"].add((n, a))
                if a >= 2 and not 2 * u[a] > n * u[a - 1]:
                    observed["ratio"].add((n, a))
                    if 2 * u[a] == n * u[a - 1]:
                        ties["ratio"].add((n, a))
                if a >= 2 and not v[a] > u[a] + v[a - 1]:
                    observed["v_growth"].add((n, a))
                    if v[a] == u[a] + v[a - 1]:
                        ties["v_growth"].add((n, a))
            if n == 0:
                signed = -u[a] if a % 2 else u[a]
                if not (0 < signed and 2 * signed <= v[a]):
                    observed["alternating"].add((n, a))

    def in_grid(p: Point) -> bool:
        return p[0] <= n_max and 1 <= p[1] <= a_max

    parts = [
        _part(
            "recurrence",
            key,
            entry["statement"],
            observed[key],
            entry["stated"],
            entry["errata"],
            in_grid,
            equality=entry.get("equality", ()),
            ties=ties[key],
        )
        for key, entry in exceptions.items()
    ]
    report = LawReport(suite="recurrence", grid={"n_max": n_max, "a_max": a_max}, parts=parts)
    logger.info("recurrence_verified n_max=%d a_max=%d ok=%s", n_max, a_max, report.ok)
    return report


def pm_one_cases(n_max: int) -> set[Point]:
    """(n, a, c1, c2) with F_{n,a}(c1, c2) = ±1 as listed: F_{0,1}(-c,-c) = F_{0,2}(c,c) = F_{n,1}(-c,c) = c."""
    cases: set[Point] = set()
    for c in (1, -1):
        cases.add((0, 1, -c, -c))
        cases.add((0, 2, c, c))
        cases.update((n, 1, -c, c) for n in range(n_max + 1))
    return cases


def verify_pm_one_inputs(n_max: int, a_max: int) -> LawReport:
    """All (n, a, c1, c2) in [0, n_max] x [1, a_max] x {±1}² where the form takes a value ±1."""
    if n_max < 10 or a_max < 10:
        raise PreconditionError("±1 grid must be at least 10 x 10", detail={"n_max": n_max, "a_max": a_max})
    observed: set[Point] = set()
    for n in range(n_max + 1):
        for form in coefficient_sequence(n, a_max)[1:]:
            for c1 in (1, -1):
                for c2 in (1, -1):
                    if abs(form.evaluate(c1, c2)) == 1:
                        observed.add((n, form.a, c1, c2))
    part = _part(
        "pm-one",
        "pm_one",
        "F_{n,a}(c1, c2) = c with c, c1, c2 in {±1} only for the listed cases",
        observed,
        pm_one_cases(n_max),
        (),
        lambda p: p[1] <= a_max,
    )
    return LawReport(suite="pm-one", grid={"n_max": n_max, "a_max": a_max}, parts=[part])


def diagonal_lower_bound(n: int, a: int, x: int) -> Fraction | None:
    """Lower bound for |F_{n,a}(x, ±x)|, where one is known."""
    if n >= 1 and a >= 2:
        return Fraction(abs(x) ** 3 * a * n ** (a - 1), 8)
    if n == 0 and a >= 3:
        return Fraction(abs(x) ** 3 * 2 ** (a - 1))
    return None


def verify_diagonal_bounds(n_max: int, a_max: int, x_max: int) -> LawReport:
    """Bounds on the diagonals y = ±x, plus F_{n,1}(x, x) = -(2n+1)x³."""
    if min(n_max, a_max, x_max) < 5:
        raise PreconditionError(
            "diagonal grid must be at least 5 x 5 x 5", detail={"n_max": n_max, "a_max": a_max, "x_max": x_max}
        )
    growth: set[Point] = set()
    first: set[Point] = set()
    xs = [x for x in range(-x_max, x_max + 1) if x]
    for n in range(n_max + 1):
        seq = coefficient_sequence(n, a_max)
        for x in xs:
            if seq[1].evaluate(x, x) != -(2 * n + 1) * x**3:
                first.add((n, 1, x, 1))
            for form in seq[2:]:
                for c in (1, -1):
                    bound = diagonal_lower_bound(n, form.a, x)
                    if bound is not None and abs(form.evaluate(x, c * x)) < bound:
                        growth.add((n, form.a, x, c))

    def in_grid(p: Point) -> bool:
        return True

    parts = [
        _part(
            "diagonal",
            "growth",
            "8|F_{n,a}(x,cx)| >= |x|^3 a n^(a-1) (n >= 1, a >= 2); |F_{0,a}(x,cx)| >= |x|^3 2^(a-1) (a >= 3)",
            growth,
            (),
            (),
            in_grid,
        ),
        _part("diagonal", "a_one", "F_{n,1}(x, x) = -(2n+1)x^3", first, (), (), in_grid),
    ]
    return LawReport(suite="diagonal", grid={"n_max": n_max, "a_max": a_max, "x_max": x_max}, parts=parts)


def run_suite(suite: Suite, **grid: int) -> LawReport:
    values = {**DEFAULT_GRIDS[suite], **{k: v for k, v in grid.items() if v is not None}}
    if suite == "recurrence":
        return verify_recurrence_lemma(values["n_max"], values["a_max"])
    if suite == "pm-one":
        return verify_pm_one_inputs(values["n_max"], values["a_max"])
    return verify_diagonal_bounds(values["n_max"], values["a_max"], values["x_max"])


def stability_check(suite: Suite, **grid: int) -> StabilityReport:
    """Re-run a suite on the doubled grid and collect violations outside the expected lists."""
    values = {**DEFAULT_GRIDS[suite], **{k: v for k, v in grid.items() if v is not None}}
    doubled = {key: 2 * value for key, value in values.items()}
    report = run_suite(suite, **doubled)
    new = {part.part: part.extra for part in report.parts}
    logger.info("stability_checked suite=%s grid=%s new=%d", suite, doubled, sum(len(v) for v in new.values()))
    return StabilityReport(suite=suite, grid=doubled, new_violations=new)
