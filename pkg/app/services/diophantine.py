"""Continued fractions of certified reals and small-value witnesses.

For every (n, a) there are infinitely many (x, y), y > 0, with
|F_{n,a}(x, y)| <= y(n+4)^a. The witnesses are convergents x/y of λ2^a
with y|x - λ2^a y| <= 1/2.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from app.config import settings
from app.exceptions import InvariantViolationError, PrecisionExhaustedError, PreconditionError
from app.services.forms import eval_form
from app.services.intervals import RationalInterval
from app.services.roots import root_power_bracket

logger = logging.getLogger(__name__)

IntervalSource = Callable[[int], RationalInterval]

HALF = Fraction(1, 2)


@dataclass(frozen=True, slots=True)
class Convergent:
    p: int
    q: int


def partial_quotients(alpha: RationalInterval, count: int) -> tuple[list[int], bool]:
    """Partial quotients shared by every real in ``alpha``.

    Returns (quotients, terminated); ``terminated`` means alpha is a single
    rational whose expansion ended.
    """
    lo, hi = alpha.lo, alpha.hi
    quotients: list[int] = []
    while len(quotients) < count:
        q = math.floor(lo)
        if math.floor(hi) != q:
            return quotients, False
        if lo == hi:
            quotients.append(q)
            if lo == q:
                return quotients, True
            lo = hi = 1 / (lo - q)
            continue
        if lo == q:
            # the real number may be the integer q itself
            return quotients, False
        quotients.append(q)
        lo, hi = 1 / (hi - q), 1 / (lo - q)
    return quotients, False


def _from_quotients(quotients: list[int]) -> list[Convergent]:
    result = []
    p_prev, p = 0, 1
    q_prev, q = 1, 0
    for term in quotients:
        p_prev, p = p, term * p + p_prev
        q_prev, q = q, term * q + q_prev
        result.append(Convergent(p, q))
    return result


def convergents(
    alpha: RationalInterval | IntervalSource,
    count: int,
    *,
    start_precision: int | None = None,
    cap: int | None = None,
) -> list[Convergent]:
    """First ``count`` convergents of a certified real.

    ``alpha`` is either a fixed interval or a function precision -> interval
    that is refined until ``count`` partial quotients are certified. A
    rational point may yield fewer convergents than requested.
    """
    if count < 1:
        raise PreconditionError("count must be positive", detail={"count": count})
    if isinstance(alpha, RationalInterval):
        quotients, terminated = partial_quotients(alpha, count)
        if len(quotients) < count and not terminated:
            bits = (alpha.width.denominator // max(1, alpha.width.numerator)).bit_length()
            raise PrecisionExhaustedError("interval too wide for requested convergents", bits=bits)
        return _from_quotients(quotients)

    cap = cap or settings.precision_cap_bits
    precision = start_precision or settings.prec
    while precision <= cap:
        quotients, terminated = partial_quotients(alpha(precision), count)
        if len(quotients) >= count or terminated:
            return _from_quotients(quotients)
        logger.debug("convergents_escalate precision=%d certified=%d", precision, len(quotients))
        precision *= 2
    raise PrecisionExhaustedError("convergent expansion hit the precision cap", bits=cap)


def decide(check: Callable[[int], bool | None], *, start: int | None = None, cap: int | None = None) -> bool:
    """Run a tri-state interval check at doubling precision until it decides."""
    cap = cap or settings.precision_cap_bits
    bits = start or settings.prec
    while bits <= cap:
        verdict = check(bits)
        if verdict is not None:
            return verdict
        bits *= 2
    raise PrecisionExhaustedError("interval comparison undecided at the precision cap", bits=cap)


@dataclass(frozen=True)
class Witness:
    n: int
    a: int
    x: int
    y: int
    value: int
    bound: int
    refined_bound_ok: bool
    y_condition_ok: bool


def _power(n: int, i: int, a: int, bits: int) -> RationalInterval:
    return root_power_bracket(n, i, a, bits)


def approximation_quality(n: int, a: int, x: int, y: int, bits: int) -> RationalInterval:
    """Enclosure of y·|x - λ2^a y|."""
    return abs(x - _power(n, 2, a, bits) * y) * y


def _refined_bound(n: int, a: int, y: int, epsilon: Fraction, bits: int) -> RationalInterval:
    l0, l1, l2 = (_power(n, i, a, bits) for i in range(3))
    return abs(l2 - l1) * abs(l0 - l2) * (Fraction(y, 2) * (1 + epsilon))


def _y_condition(n: int, a: int, y: int, epsilon: Fraction, bits: int) -> bool | None:
    l0, l1, l2 = (_power(n, i, a, bits) for i in range(3))
    d1, d2 = abs(l2 - l1), abs(l0 - l2)
    smaller = d1 if d1.hi <= d2.lo else d2 if d2.hi <= d1.lo else None
    if smaller is None:
        # min of two overlapping intervals
        smaller = RationalInterval(min(d1.lo, d2.lo), min(d1.hi, d2.hi))
    return RationalInterval.point(Fraction(1, 2 * y * y)).less_equal(smaller * (epsilon / 3))


def _make_witness(n: int, a: int, x: int, y: int, epsilon: Fraction) -> Witness:
    value = eval_form(n, a, x, y)
    bound = y * (n + 4) ** a
    if abs(value) > bound:
        raise InvariantViolationError(
            "small-value bound fails at a convergent", n=n, a=a, detail={"x": x, "y": y, "value": value}
        )
    refined = decide(lambda bits: RationalInterval.point(abs(value)).less_equal(_refined_bound(n, a, y, epsilon, bits)))
    y_ok = decide(lambda bits: _y_condition(n, a, y, epsilon, bits))
    if not refined:
        if y_ok:
            raise InvariantViolationError(
                "refined bound fails although the y-condition holds", n=n, a=a, detail={"x": x, "y": y}
            )
        logger.warning("refined_bound_not_reached n=%d a=%d x=%d y=%d", n, a, x, y)
    return Witness(n=n, a=a, x=x, y=y, value=value, bound=bound, refined_bound_ok=refined, y_condition_ok=y_ok)


def small_value_witnesses(n: int, a: int, count: int, *, epsilon: Fraction | None = None) -> list[Witness]:
    """``count`` witnesses with strictly increasing y taken from the convergents of λ2^a."""
    if a < 1:
        raise PreconditionError("witnesses need a >= 1", n=n, a=a)
    if n < 0:
        raise PreconditionError("witnesses need n >= 0", n=n, a=a)
    epsilon = epsilon if epsilon is not None else settings.epsilon_fraction

    def alpha(bits: int) -> RationalInterval:
        return _power(n, 2, a, bits)

    requested = 2 * count + 4
    while True:
        witnesses: list[Witness] = []
        for conv in convergents(alpha, requested):
            if witnesses and conv.q <= witnesses[-1].y:
                continue
            close = decide(lambda bits: approximation_quality(n, a, conv.p, conv.q, bits).less_equal(HALF))
            if not close:
                continue
            witnesses.append(_make_witness(n, a, conv.p, conv.q, epsilon))
            if len(witnesses) == count:
                logger.info("witnesses_found n=%d a=%d count=%d y_max=%d", n, a, count, conv.q)
                return witnesses
        requested *= 2
