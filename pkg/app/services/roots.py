"""Certified isolation of the roots λ0 > 0 > λ1 > -1 > λ2 of f_n.

f_n(X) = X^3 - (n-1)X^2 - (n+2)X - 1. Every verdict here is exact: f_n is
evaluated at rational points with integer arithmetic and root brackets
carry a sign-change certificate.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from app.exceptions import InvariantViolationError, PreconditionError
from app.services.intervals import RationalInterval, interval_pow

logger = logging.getLogger(__name__)

# Bisection hands over to Newton once the bracket is this narrow.
_NEWTON_HANDOFF_BITS = 40


def _scaled_value(n: int, num: int, den: int) -> int:
    """den^3 * f_n(num/den)."""
    return num**3 - (n - 1) * num * num * den - (n + 2) * num * den * den - den**3


def _sign(value: int) -> int:
    return (value > 0) - (value < 0)


def f_sign(n: int, p: Fraction) -> int:
    """Sign of f_n at a rational point (never 0: f_n has no rational root)."""
    return _sign(_scaled_value(n, p.numerator, p.denominator))


def f_value(n: int, p: Fraction) -> Fraction:
    return Fraction(_scaled_value(n, p.numerator, p.denominator), p.denominator**3)


@dataclass(frozen=True)
class RootTriple:
    """Certified brackets for λ0, λ1, λ2 at a given precision."""

    n: int
    precision: int
    lam0: RationalInterval
    lam1: RationalInterval
    lam2: RationalInterval

    def lam(self, i: int) -> RationalInterval:
        return (self.lam0, self.lam1, self.lam2)[i]

    @property
    def max_width(self) -> Fraction:
        return max(self.lam0.width, self.lam1.width, self.lam2.width)


# f_n goes - to + across λ0 and λ2, + to - across λ1.
_LEFT_SIGN = (-1, 1, -1)


@lru_cache(maxsize=16384)
def isolating_brackets(n: int) -> tuple[tuple[Fraction, Fraction], ...]:
    """Disjoint rational brackets holding exactly one root each, ordered λ0, λ1, λ2.

    For n >= 3 the closed-form brackets n+1/n < λ0 < n+2/n,
    -1/(n+1) < λ1 < -1/(n+2), -1-1/n < λ2 < -1-1/(n+1) are tried first.
    Otherwise f(-1) = 1, f(0) = -1 and the Cauchy bound give
    (0, B), (-1, 0), (-B, -1).
    """
    if n >= 3:
        seeded = (
            (n + Fraction(1, n), n + Fraction(2, n)),
            (Fraction(-1, n + 1), Fraction(-1, n + 2)),
            (-1 - Fraction(1, n), -1 - Fraction(1, n + 1)),
        )
        if all(
            f_sign(n, lo) == _LEFT_SIGN[i] and f_sign(n, hi) == -_LEFT_SIGN[i]
            for i, (lo, hi) in enumerate(seeded)
        ):
            return seeded
        logger.warning("closed_form_brackets_rejected n=%d", n)

    bound = Fraction(max(abs(n - 1), abs(n + 2), 1) + 1)
    general = ((Fraction(0), bound), (Fraction(-1), Fraction(0)), (-bound, Fraction(-1)))
    for i, (lo, hi) in enumerate(general):
        if f_sign(n, lo) != _LEFT_SIGN[i] or f_sign(n, hi) != -_LEFT_SIGN[i]:
            raise InvariantViolationError("sign change missing in root bracket", n=n, detail={"root": i})
    return general


def _bisect(n: int, lo: Fraction, hi: Fraction, left_sign: int, width: Fraction) -> tuple[Fraction, Fraction]:
    while hi - lo > width:
        mid = (lo + hi) / 2
        s = f_sign(n, mid)
        if s == 0:
            raise InvariantViolationError("rational root found", n=n, detail={"point": str(mid)})
        if s == left_sign:
            lo = mid
        else:
            hi = mid
    return lo, hi


def _newton(n: int, lo: Fraction, hi: Fraction, left_sign: int, bits: int) -> tuple[Fraction, Fraction] | None:
    """Integer Newton iteration on the grid 2^-(bits+4), then re-certify."""
    shift = bits + 4
    scale = 1 << shift
    mid = (lo + hi) / 2
    k = (mid.numerator * scale) // mid.denominator
    c1, c2 = n - 1, n + 2
    cube = scale**3
    for _ in range(shift.bit_length() + 4):
        value = k**3 - c1 * k * k * scale - c2 * k * scale * scale - cube
        slope = 3 * k * k - 2 * c1 * k * scale - c2 * scale * scale
        if slope == 0:
            return None
        step = value // slope
        if step == 0:
            break
        k -= step
    for d in (1, 2, 3):
        left, right = Fraction(k - d, scale), Fraction(k + d, scale)
        if left < lo or right > hi:
            continue
        if f_sign(n, left) == left_sign and f_sign(n, right) == -left_sign:
            return left, right
    return None


def refine_bracket(n: int, i: int, bits: int) -> RationalInterval:
    """Bracket of λ_i with width at most 2^-bits."""
    lo, hi = isolating_brackets(n)[i]
    left_sign = _LEFT_SIGN[i]
    target = Fraction(1, 1 << bits)
    if bits <= _NEWTON_HANDOFF_BITS:
        return RationalInterval(*_bisect(n, lo, hi, left_sign, target))
    lo, hi = _bisect(n, lo, hi, left_sign, Fraction(1, 1 << _NEWTON_HANDOFF_BITS))
    polished = _newton(n, lo, hi, left_sign, bits)
    if polished is None:
        logger.debug("newton_fallback n=%d root=%d bits=%d", n, i, bits)
        polished = _bisect(n, lo, hi, left_sign, target)
    return RationalInterval(*polished)


@lru_cache(maxsize=4096)
def isolate_roots(n: int, precision: int) -> RootTriple:
    """Sign-certified brackets of width <= 2^-precision for the three roots."""
    if precision < 32:
        raise PreconditionError("precision must be at least 32 bits", n=n, detail={"precision": precision})
    lam0, lam1, lam2 = (refine_bracket(n, i, precision) for i in range(3))
    if not (lam0.lo > 0 > lam1.hi and lam1.lo > -1 > lam2.hi):
        raise InvariantViolationError("root ordering violated", n=n)
    return RootTriple(n=n, precision=precision, lam0=lam0, lam1=lam1, lam2=lam2)


def compare_to_root(n: int, i: int, p: Fraction) -> int:
    """-1 if p < λ_i, +1 if p > λ_i (equality is impossible for rational p)."""
    lo, hi = isolating_brackets(n)[i]
    if p <= lo:
        return -1
    if p >= hi:
        return 1
    return -1 if f_sign(n, p) == _LEFT_SIGN[i] else 1


def _log2_ceiling(value: Fraction) -> int:
    return max(1, (value.numerator // value.denominator + 1).bit_length())


def root_power_bracket(n: int, i: int, a: int, bits: int) -> RationalInterval:
    """Bracket of λ_i^a with width at most 2^-bits and dyadic endpoints."""
    if a == 0:
        return RationalInterval.point(1)
    base = isolating_brackets(n)[i]
    magnitude = max(abs(base[0]), abs(base[1])) + 1
    growth = abs(a) * _log2_ceiling(magnitude)
    if a < 0:
        # 1/|λ_i| is at most n+3 for every root
        growth += abs(a) * _log2_ceiling(Fraction(abs(n) + 3))
    precision = max(32, bits + growth + 8)
    target = Fraction(1, 1 << (bits + 1))
    while True:
        power = interval_pow(isolate_roots(n, precision).lam(i), a)
        if power.width <= target:
            return power.round_outward(bits + 2)
        logger.debug("root_power_escalate n=%d root=%d a=%d precision=%d", n, i, a, precision)
        precision *= 2


@dataclass(frozen=True)
class BoundCheck:
    label: str
    holds: bool
    asserted: bool


@dataclass
class BoundReport:
    n: int
    checks: list[BoundCheck] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.holds for c in self.checks if c.asserted)

    @property
    def failures(self) -> list[BoundCheck]:
        return [c for c in self.checks if c.asserted and not c.holds]


Term = Fraction | str


def _term_label(term: Term) -> str:
    return term if isinstance(term, str) else str(term)


def _less(n: int, left: Term, right: Term, strict: bool) -> bool:
    if isinstance(left, str):
        return compare_to_root(n, int(left[-1]), right) > 0
    if isinstance(right, str):
        return compare_to_root(n, int(right[-1]), left) < 0
    return left < right if strict else left <= right


def _chains(n: int) -> list[list[tuple[Term, bool]]]:
    # (term, strict link to the next term)
    return [
        [(n + Fraction(1, n), True), (n + Fraction(2, n + 1), True), ("lam0", True), (n + Fraction(2, n), True)],
        [
            (Fraction(-1, n + 1), True),
            (-1 / (n + 1 + Fraction(1, n)), True),
            ("lam1", True),
            (-1 / (n + 1 + Fraction(2, n)), False),
            (Fraction(-1, n + 2), True),
        ],
        [
            (-1 - Fraction(1, n), True),
            (-1 - Fraction(n, n * n + 1), True),
            ("lam2", True),
            (-1 - Fraction(n, n * n + 2), False),
            (-1 - Fraction(1, n + 1), True),
        ],
    ]


# Decimal brackets printed for n = 1, where f_1(X) = X^3 - 3X - 1.
_N1_BRACKETS = (
    ("1.8793", "1.8794"),
    ("-0.3473", "-0.3472"),
    ("-1.5321", "-1.532"),
)


def check_root_bounds(n: int) -> BoundReport:
    """Exact verdicts for the closed-form root bounds.

    Asserted for n >= 3; for n in {1, 2} every link is reported but only the
    n = 1 decimal brackets are asserted.
    """
    if n < 1:
        raise PreconditionError("root bounds need n >= 1", n=n)
    report = BoundReport(n=n)
    asserted = n >= 3
    for chain in _chains(n):
        for (left, strict), (right, _) in zip(chain, chain[1:]):
            op = "<" if strict else "<="
            label = f"{_term_label(left)} {op} {_term_label(right)}"
            report.checks.append(BoundCheck(label=label, holds=_less(n, left, right, strict), asserted=asserted))
    if n == 1:
        for i, (lo, hi) in enumerate(_N1_BRACKETS):
            holds = compare_to_root(1, i, Fraction(lo)) < 0 and compare_to_root(1, i, Fraction(hi)) > 0
            report.checks.append(BoundCheck(label=f"{lo} < lam{i} < {hi}", holds=holds, asserted=True))
    if not report.ok:
        logger.error("root_bounds_failed n=%d failures=%s", n, [c.label for c in report.failures])
    return report
