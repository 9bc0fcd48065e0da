from fractions import Fraction

import pytest

from app.exceptions import PreconditionError
from app.services.roots import (
    check_root_bounds,
    compare_to_root,
    f_sign,
    isolate_roots,
    isolating_brackets,
    root_power_bracket,
)


@pytest.mark.parametrize("n", [-5, -1, 0, 1, 2, 3, 25, 1000])
def test_roots_are_ordered(n):
    triple = isolate_roots(n, 64)
    assert triple.lam0.lo > 0 > triple.lam1.hi
    assert triple.lam1.lo > -1 > triple.lam2.hi
    assert triple.max_width <= Fraction(1, 1 << 64)


@pytest.mark.parametrize("n", [0, 4, 31])
def test_brackets_carry_sign_change(n):
    for i, (lo, hi) in enumerate(isolating_brackets(n)):
        assert f_sign(n, lo) == -f_sign(n, hi)


def test_precision_floor():
    with pytest.raises(PreconditionError):
        isolate_roots(3, 16)


def test_n1_decimal_brackets():
    triple = isolate_roots(1, 40)
    assert Fraction("1.8793") < triple.lam0.lo and triple.lam0.hi < Fraction("1.8794")
    assert Fraction("-0.3473") < triple.lam1.lo and triple.lam1.hi < Fraction("-0.3472")
    assert Fraction("-1.5321") < triple.lam2.lo and triple.lam2.hi < Fraction("-1.532")
    report = check_root_bounds(1)
    assert report.ok
    assert "1.8793 < lam0 < 1.8794" in {c.label for c in report.checks}


@pytest.mark.parametrize("n", range(3, 200))
def test_closed_form_bounds_hold(n):
    report = check_root_bounds(n)
    assert report.ok, report.failures
    assert all(c.asserted for c in report.checks)


@pytest.mark.slow
def test_closed_form_bounds_hold_to_ten_thousand():
    for n in range(200, 10001):
        assert check_root_bounds(n).ok, n


def test_small_n_bounds_are_not_asserted():
    report = check_root_bounds(2)
    assert report.ok
    assert not any(c.asserted for c in report.checks)
    with pytest.raises(PreconditionError):
        check_root_bounds(0)


def test_n2_middle_bound_is_reported_failing():
    # f_2(8/3) > 0, so lam0 < 8/3
    verdicts = {c.label: c.holds for c in check_root_bounds(2).checks}
    assert verdicts["5/2 < 8/3"] is True
    assert verdicts["8/3 < lam0"] is False
    assert verdicts["lam0 < 3"] is True


def test_root_links_for_n5():
    verdicts = {c.label: c.holds for c in check_root_bounds(5).checks}
    assert verdicts["16/3 < lam0"] is True
    assert verdicts["lam0 < 27/5"] is True
    assert all(verdicts.values())


def test_compare_to_root():
    assert compare_to_root(5, 0, Fraction(5)) == -1
    assert compare_to_root(5, 0, Fraction(6)) == 1
    assert compare_to_root(5, 1, Fraction(-1, 6)) == -1
    assert compare_to_root(5, 1, Fraction(-1, 7)) == 1
    assert compare_to_root(5, 2, Fraction(-1)) == 1
    assert compare_to_root(5, 2, Fraction(-7, 5)) == -1


@pytest.mark.parametrize("a", [-3, 1, 4, 9])
def test_root_power_bracket_width(a):
    for i in range(3):
        power = root_power_bracket(6, i, a, 50)
        assert power.width <= Fraction(1, 1 << 50)
        base = isolate_roots(6, 128).lam(i)
        assert power.overlaps(base**a)


def test_root_power_zero():
    assert root_power_bracket(6, 0, 0, 50).is_point
