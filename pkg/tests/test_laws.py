from fractions import Fraction

import pytest

from app.exceptions import PreconditionError
from app.services.forms import coefficient_sequence
from app.services.laws import (
    _part,
    diagonal_lower_bound,
    load_lemma_exceptions,
    pm_one_cases,
    run_suite,
    stability_check,
    verify_diagonal_bounds,
    verify_pm_one_inputs,
    verify_recurrence_lemma,
)


def _observed(report):
    return {part.part: {tuple(p) for p in part.observed} for part in report.parts}


def test_recurrence_lemma_exceptions_are_exact():
    report = verify_recurrence_lemma(100, 100)
    assert report.ok
    observed = _observed(report)
    assert observed["positivity"] == {(1, 1)}
    assert observed["ratio"] == {(1, 3)}
    assert observed["v_growth"] == {(1, 2)}
    assert observed["v_base"] == set()
    assert observed["u_below_v"] == set()
    assert observed["alternating"] == {(0, 2)}
    assert observed["v_doubling"] == {(0, 1), (0, 3), (1, 1), (2, 1), (3, 1), (4, 1)}


def test_errata_are_reported_separately():
    report = verify_recurrence_lemma(10, 10)
    doubling = next(p for p in report.parts if p.part == "v_doubling")
    assert doubling.stated == [[0, 1], [0, 3], [1, 1]]
    assert doubling.errata == [[2, 1], [3, 1], [4, 1]]
    assert set(load_lemma_exceptions()) == set(_observed(report))


def test_ratio_equality_case():
    report = verify_recurrence_lemma(5, 5)
    ratio = next(p for p in report.parts if p.part == "ratio")
    assert ratio.observed == [[1, 3]]
    assert ratio.equality == [[1, 3]]
    assert ratio.not_equal == []


def test_stated_exceptions_are_equalities():
    u = [c.u for c in coefficient_sequence(1, 3)]
    v = [c.v for c in coefficient_sequence(1, 3)]
    assert 2 * u[3] == 1 * u[2] == 6
    assert v[2] == u[2] + v[1] == 9
    report = verify_recurrence_lemma(10, 10)
    growth = next(p for p in report.parts if p.part == "v_growth")
    assert growth.equality == [[1, 2]]
    assert growth.not_equal == []
    assert growth.ok


def test_strict_failure_at_equality_exception_is_flagged():
    report = _part(
        "recurrence",
        "ratio",
        "2 u_a > n u_{a-1}",
        {(1, 3)},
        [(1, 3)],
        [],
        lambda p: True,
        equality=[(1, 3)],
        ties=set(),
    )
    assert report.not_equal == [[1, 3]]
    assert not report.ok


def test_pm_one_inputs_small_grid():
    report = verify_pm_one_inputs(30, 30)
    assert report.ok
    observed = _observed(report)["pm_one"]
    assert observed == pm_one_cases(30)
    assert (0, 2, 1, 1) in observed
    assert (17, 1, -1, 1) in observed


@pytest.mark.slow
def test_pm_one_inputs_default_grid():
    assert run_suite("pm-one").ok


def test_diagonal_bounds():
    report = verify_diagonal_bounds(50, 30, 20)
    assert report.ok
    assert all(not part.observed for part in report.parts)


def test_diagonal_lower_bound_values():
    assert diagonal_lower_bound(2, 3, 2) == 12
    assert diagonal_lower_bound(0, 3, -1) == 4
    assert diagonal_lower_bound(1, 2, 2) == Fraction(2)
    assert diagonal_lower_bound(0, 2, 5) is None
    assert diagonal_lower_bound(3, 1, 5) is None


def test_grid_minimums():
    with pytest.raises(PreconditionError):
        verify_recurrence_lemma(4, 10)
    with pytest.raises(PreconditionError):
        verify_pm_one_inputs(10, 9)
    with pytest.raises(PreconditionError):
        verify_diagonal_bounds(5, 5, 4)


def test_run_suite_fills_default_grid():
    report = run_suite("diagonal", n_max=6, a_max=6, x_max=None)
    assert report.grid == {"n_max": 6, "a_max": 6, "x_max": 20}


@pytest.mark.parametrize(
    "suite, grid",
    [
        ("recurrence", {"n_max": 20, "a_max": 20}),
        ("pm-one", {"n_max": 10, "a_max": 10}),
        ("diagonal", {"n_max": 5, "a_max": 5, "x_max": 5}),
    ],
)
def test_stability_on_doubled_grid(suite, grid):
    report = stability_check(suite, **grid)
    assert report.stable
    assert report.grid == {key: 2 * value for key, value in grid.items()}
