from fractions import Fraction
from math import isqrt

import pytest

from app.exceptions import PrecisionExhaustedError, PreconditionError
from app.services.diophantine import (
    Convergent,
    approximation_quality,
    convergents,
    decide,
    partial_quotients,
    small_value_witnesses,
)
from app.services.forms import eval_form
from app.services.intervals import RationalInterval


def test_convergents_of_rational_point():
    point = RationalInterval.point(Fraction(415, 93))
    assert convergents(point, 10) == [Convergent(4, 1), Convergent(9, 2), Convergent(58, 13), Convergent(415, 93)]
    assert partial_quotients(point, 10) == ([4, 2, 6, 7], True)


def test_wide_interval_cannot_certify():
    with pytest.raises(PrecisionExhaustedError):
        convergents(RationalInterval(Fraction(3), Fraction(4)), 2)
    with pytest.raises(PreconditionError):
        convergents(RationalInterval.point(2), 0)


def test_convergents_refine_a_source():
    def sqrt2(bits: int) -> RationalInterval:
        scale = 1 << bits
        lo = Fraction(isqrt(2 * scale * scale), scale)
        return RationalInterval(lo, lo + Fraction(1, scale))

    got = convergents(sqrt2, 6, start_precision=8)
    assert [(c.p, c.q) for c in got] == [(1, 1), (3, 2), (7, 5), (17, 12), (41, 29), (99, 70)]


def test_decide_escalates_until_verdict():
    seen = []

    def check(bits: int):
        seen.append(bits)
        return None if bits < 256 else True

    assert decide(check, start=64, cap=1024) is True
    assert seen == [64, 128, 256]
    with pytest.raises(PrecisionExhaustedError):
        decide(lambda bits: None, start=64, cap=256)


def _assert_witnesses(n, a, count):
    witnesses = small_value_witnesses(n, a, count)
    assert len(witnesses) == count
    ys = [w.y for w in witnesses]
    assert ys == sorted(set(ys))
    for w in witnesses:
        assert w.value == eval_form(n, a, w.x, w.y)
        assert abs(w.value) <= w.y * (n + 4) ** a
        assert approximation_quality(n, a, w.x, w.y, 64).lo <= Fraction(1, 2)
        if w.y_condition_ok:
            assert w.refined_bound_ok


@pytest.mark.parametrize("n", [0, 1, 2, 5])
@pytest.mark.parametrize("a", [1, 2, 3])
def test_small_value_witnesses(n, a):
    _assert_witnesses(n, a, 5)


@pytest.mark.slow
def test_small_value_witnesses_full_grid():
    for n in range(0, 21):
        for a in range(1, 9):
            _assert_witnesses(n, a, 5)


def test_witness_preconditions():
    with pytest.raises(PreconditionError):
        small_value_witnesses(3, 0, 5)
    with pytest.raises(PreconditionError):
        small_value_witnesses(-1, 2, 5)


@pytest.mark.parametrize("n, a", [(0, 2), (3, 1), (6, 4)])
def test_witness_heights_are_unbounded(n, a):
    heights = [max(w.y for w in small_value_witnesses(n, a, k)) for k in range(1, 7)]
    assert all(low < high for low, high in zip(heights, heights[1:]))
