"""The factors γ_i = x - λ_i^a·y and their unit decompositions.

For a solution of |F_{n,a}(x, y)| = m the three factors γ_0, γ_1, γ_2 are
Galois conjugates in Z[λ0] whose product is F_{n,a}(x, y). Each factor is
written γ = δ·λ0^A·λ2^B with δ of controlled size, and the Siegel identity
between the three factors gives the linear form in logarithms

    Λ = A'·log λ0 + B'·log|λ2| + log|μ|.

Exact statements are checked in Z[λ0]; everything involving logarithms is
reported as certified mpmath intervals.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Any, Callable

from mpmath import iv

from app.config import settings
from app.exceptions import (
    DecompositionNotNormalizedError,
    IntervalDomainError,
    InvariantViolationError,
    PrecisionExhaustedError,
    PreconditionError,
    ZeroValueError,
)
from app.services.cubic_order import (
    OrderElement,
    conjugates,
    embed,
    embed_certified,
    lambda2_element,
    oe_invert_unit,
    oe_mul,
    oe_norm,
    oe_pow,
)
from app.services.diophantine import decide
from app.services.forms import eval_form
from app.services.intervals import (
    RationalInterval,
    interval_log_abs,
    interval_pow,
    interval_precision,
    iv_less_than,
    iv_log,
    iv_midpoint,
    iv_overlaps,
    to_iv,
)
from app.services.roots import isolate_roots, root_power_bracket

logger = logging.getLogger(__name__)

# Reported (never asserted) verdicts stay undecided past this precision.
_REPORT_CAP_BITS = 4096

Triple = tuple[RationalInterval, RationalInterval, RationalInterval]


def _settle(check: Callable[[int], bool | None], start: int | None = None) -> bool | None:
    bits = start or settings.prec
    while bits <= _REPORT_CAP_BITS:
        verdict = check(bits)
        if verdict is not None:
            return verdict
        bits *= 2
    return None


def _all_of(verdicts: list[bool | None]) -> bool | None:
    if any(v is False for v in verdicts):
        return False
    if any(v is None for v in verdicts):
        return None
    return True


@lru_cache(maxsize=1024)
def power_elements(n: int, a: int) -> tuple[OrderElement, OrderElement, OrderElement]:
    """λ0^a, λ1^a, λ2^a as elements of Z[λ0]."""
    return conjugates(oe_pow(OrderElement.generator(n), a))


@dataclass(frozen=True)
class GammaTriple:
    n: int
    a: int
    x: int
    y: int
    gammas: tuple[OrderElement, OrderElement, OrderElement]
    value: int
    i0: int
    abs_embeddings: Triple

    @property
    def m(self) -> int:
        return abs(self.value)

    def cyclic(self) -> tuple[int, int, int]:
        """(i0, i1, i2), a circular permutation of (0, 1, 2)."""
        return (self.i0, (self.i0 + 1) % 3, (self.i0 + 2) % 3)

    def estimate_residual(self) -> bool | None:
        """Whether |γ_{i0}| is below 2m/(y²λ0^{2a}) (i0 = 0) or 2m/(y²(λ0+1)^a).

        These estimates are asymptotic in y, so the verdict is only reported.
        """
        if self.y == 0:
            return None

        def check(bits: int) -> bool | None:
            lam0 = isolate_roots(self.n, bits + 4 * self.a).lam0
            scale = lam0 ** (2 * self.a) if self.i0 == 0 else interval_pow(lam0 + 1, self.a)
            bound = Fraction(2 * self.m, self.y * self.y) / scale
            return abs(embed(self.gammas[0], bits)[self.i0]).less_equal(bound)

        return _settle(check)


def _select_i0(abs_values: Triple) -> int | None:
    # smallest index among the minimal absolute values
    for i in range(3):
        verdicts = [
            abs_values[i].less_than(abs_values[j]) if j < i else abs_values[i].less_equal(abs_values[j])
            for j in range(3)
            if j != i
        ]
        if all(v is True for v in verdicts):
            return i
    return None


def gamma_triple(n: int, a: int, x: int, y: int) -> GammaTriple:
    """Factors of F_{n,a}(x, y) in Z[λ0] and the index of the smallest one."""
    if a < 1:
        raise PreconditionError("factors are defined for a >= 1", n=n, a=a)
    value = eval_form(n, a, x, y)
    if value == 0:
        raise ZeroValueError("F_{n,a}(x, y) = 0 has no normalized factors", n=n, a=a, detail={"x": x, "y": y})

    gamma0 = x - power_elements(n, a)[0] * y
    gammas = conjugates(gamma0)
    product = oe_mul(oe_mul(gammas[0], gammas[1]), gammas[2])
    if product != OrderElement.constant(n, value):
        raise InvariantViolationError(
            "factor product differs from the form value", n=n, a=a, detail={"x": x, "y": y, "value": value}
        )

    m = abs(value)
    if y == 0:
        point = RationalInterval.point(abs(x))
        return GammaTriple(n, a, x, y, gammas, value, 0, (point, point, point))

    bits = settings.prec
    while True:
        if bits > settings.precision_cap_bits:
            raise PrecisionExhaustedError("could not order the factor sizes", bits=settings.precision_cap_bits, n=n, a=a)
        abs_values = tuple(abs(e) for e in embed(gamma0, bits))
        i0 = _select_i0(abs_values)
        if i0 is not None:
            break
        logger.debug("i0_escalate n=%d a=%d x=%d y=%d bits=%d", n, a, x, y, bits)
        bits *= 2

    smallest_ok = decide(lambda b: interval_pow(abs(embed(gamma0, b)[i0]), 3).less_equal(m), start=bits)
    if not smallest_ok:
        raise InvariantViolationError("smallest factor exceeds m^(1/3)", n=n, a=a, detail={"x": x, "y": y})
    return GammaTriple(n, a, x, y, gammas, value, i0, abs_values)


@dataclass(frozen=True)
class RegulatorSolution:
    """Real solution (A, B) of the unit-logarithm system, with its ingredients."""

    A: Any
    B: Any
    R: Any
    logs: tuple[Any, Any, Any]


def _root_logs(n: int) -> tuple[Any, Any, Any]:
    triple = isolate_roots(n, iv.prec + 16)
    return tuple(interval_log_abs(triple.lam(i)) for i in range(3))


def regulator_system(n: int, c0, c1, prec: int | None = None) -> RegulatorSolution:
    """Solve c0 = A·L0 + B·L2, c1 = A·L1 + B·L0 with L_i = log|λ_i|.

    The determinant is R = L0² - L1·L2. Also defined at n = 0, where the
    root signs are the same as for n >= 1.
    """
    if n < 0:
        raise PreconditionError("regulator system needs n >= 0", n=n)
    with interval_precision(prec or settings.prec):
        c0, c1 = iv.mpf(c0), iv.mpf(c1)
        l0, l1, l2 = _root_logs(n)
        r = l0 * l0 - l1 * l2
        a_real = (c0 * l0 - c1 * l2) / r
        b_real = ((c0 + c1) * l0 + c0 * l2) / r
        return RegulatorSolution(A=a_real, B=b_real, R=r, logs=(l0, l1, l2))


@dataclass(frozen=True)
class RegulatorDiagnostics:
    n: int
    R: Any
    log_lambda0_squared: Any
    R_exceeds_square: bool
    log_lambda2_near_reciprocal: bool
    root_product_is_one: bool


def regulator_diagnostics(n: int) -> RegulatorDiagnostics:
    """R > (log λ0)², |log|λ2| - 1/λ0| <= 1/(2λ0²) and λ0λ1λ2 = 1, all certified."""
    if n < 0:
        raise PreconditionError("regulator diagnostics need n >= 0", n=n)

    def exceeds(bits: int) -> bool | None:
        with interval_precision(bits):
            l0, l1, l2 = _root_logs(n)
            return iv_less_than(l0 * l0, l0 * l0 - l1 * l2)

    def near(bits: int) -> bool | None:
        with interval_precision(bits):
            lam0 = to_iv(isolate_roots(n, bits + 16).lam0)
            gap = abs(_root_logs(n)[2] - 1 / lam0)
            return iv_less_than(gap, 1 / (2 * lam0 * lam0))

    triple = isolate_roots(n, settings.prec)
    product = triple.lam0 * triple.lam1 * triple.lam2
    with interval_precision(settings.prec):
        solution = regulator_system(n, 0, 0)
        square = solution.logs[0] ** 2
    return RegulatorDiagnostics(
        n=n,
        R=solution.R,
        log_lambda0_squared=square,
        R_exceeds_square=decide(exceeds),
        log_lambda2_near_reciprocal=decide(near),
        root_product_is_one=product.contains(1),
    )


@dataclass(frozen=True)
class UnitDecomposition:
    """γ = δ·λ0^A·λ2^B with exact δ and certified size reports."""

    n: int
    m: int
    A: int
    B: int
    delta: OrderElement
    norm: int
    A_real: Any
    B_real: Any
    delta_abs: Triple
    conjugate_bounds_ok: bool | None
    height: Any
    height_bound: Any
    product_bound_ok: bool | None
    candidates_tried: int

    @property
    def height_bound_ok(self) -> bool | None:
        # h(δ) <= (2/3)log(n+3) + (1/3)log m  <=>  ∏max(1, |δ_i|) <= (n+3)²·m
        return self.product_bound_ok


def _unit(n: int, A: int, B: int) -> OrderElement:
    return oe_mul(oe_pow(OrderElement.generator(n), A), oe_pow(lambda2_element(n), B))


def _conjugate_bounds(n: int, m: int, delta: OrderElement, bits: int) -> bool | None:
    # m^(1/3)/(n+3) <= |δ0| <= (n+3)m^(1/3), m^(1/3)/√(n+3) <= |δ1|, |δ2| <= √(n+3)m^(1/3)
    k = n + 3
    d0, d1, d2 = (abs(e) for e in embed(delta, bits))
    checks = [
        RationalInterval.point(m).less_equal(interval_pow(d0 * k, 3)),
        interval_pow(d0, 3).less_equal(k**3 * m),
    ]
    for d in (d1, d2):
        sixth = interval_pow(d, 6)
        checks.append(RationalInterval.point(m * m).less_equal(sixth * k**3))
        checks.append(sixth.less_equal(k**3 * m * m))
    return _all_of(checks)


def _product_bound(n: int, m: int, delta: OrderElement, bits: int) -> bool | None:
    product = RationalInterval.point(1)
    for e in embed(delta, bits):
        product = product * abs(e).clamp_below(1)
    return product.less_equal((n + 3) ** 2 * m)


def _deviation(images: Triple, m: int) -> float:
    """max_i |log|δ_i| - (1/3)log m|, used to rank rejected candidates."""
    with interval_precision(settings.prec):
        third = iv_log(m) / 3
        return max(abs(float(iv_midpoint(interval_log_abs(e) - third))) for e in images)


def _offsets(radius: int) -> list[tuple[int, int]]:
    cells = [(da, db) for da in range(-radius, radius + 1) for db in range(-radius, radius + 1) if abs(da) + abs(db) <= radius]
    return sorted(cells, key=lambda c: (abs(c[0]) + abs(c[1]), c))


def decompose_element(u: OrderElement, *, radius: int | None = None, strict: bool = False) -> UnitDecomposition:
    """Write a nonzero u as δ·λ0^A·λ2^B with δ normalized.

    (A, B) starts from the rounded real solution of the regulator system
    with targets c_i = log|u_i| - (1/3)log m and moves through the lattice
    neighbourhood of the given radius. For a unit δ must come out as ±1.
    """
    n = u.n
    radius = settings.neighbor_radius if radius is None else radius
    norm = oe_norm(u)
    if norm == 0:
        raise ZeroValueError("cannot decompose the zero element", n=n)
    m = abs(norm)

    images = embed_certified(u, 24, start=settings.prec)
    with interval_precision(settings.prec):
        third = iv_log(m) / 3
        solution = regulator_system(n, interval_log_abs(images[0]) - third, interval_log_abs(images[1]) - third)
    a0, b0 = round(iv_midpoint(solution.A)), round(iv_midpoint(solution.B))

    best: tuple[float, UnitDecomposition] | None = None
    tried = 0
    for da, db in _offsets(radius):
        A, B = a0 + da, b0 + db
        tried += 1
        unit = _unit(n, A, B)
        delta = oe_mul(u, oe_invert_unit(unit))
        if oe_mul(delta, unit) != u:
            raise InvariantViolationError("δ·λ0^A·λ2^B does not multiply back", n=n, detail={"A": A, "B": B})
        if oe_norm(delta) != norm:
            raise InvariantViolationError("norm of δ differs from norm of γ", n=n, detail={"A": A, "B": B})

        if m == 1:
            if not (delta.is_constant and delta.c0 in (1, -1)):
                continue
            bounds_ok: bool | None = True if n >= 3 else None
        elif n >= 3:
            bounds_ok = decide(lambda bits: _conjugate_bounds(n, m, delta, bits))
        else:
            bounds_ok = None

        delta_abs = tuple(abs(e) for e in embed_certified(delta, 8, start=settings.prec))
        result = _finish(n, m, A, B, delta, norm, solution, delta_abs, bounds_ok, tried)
        if bounds_ok is not False and (m == 1 or n >= 3):
            logger.debug("decomposed n=%d A=%d B=%d tried=%d", n, A, B, tried)
            return result
        score = _deviation(delta_abs, m)
        if best is None or score < best[0]:
            best = (score, result)

    if m == 1 or best is None:
        raise DecompositionNotNormalizedError(
            "no unit exponents give δ = ±1", n=n, detail={"start": (a0, b0), "radius": radius}
        )
    result = best[1]
    if result.conjugate_bounds_ok is False:
        if strict:
            raise DecompositionNotNormalizedError(
                "conjugate bounds fail for every candidate", n=n, best=result, detail={"A": result.A, "B": result.B}
            )
        logger.warning("decomposition_not_normalized n=%d m=%d A=%d B=%d", n, m, result.A, result.B)
    return result


def _finish(
    n: int,
    m: int,
    A: int,
    B: int,
    delta: OrderElement,
    norm: int,
    solution: RegulatorSolution,
    delta_abs: Triple,
    bounds_ok: bool | None,
    tried: int,
) -> UnitDecomposition:
    with interval_precision(settings.prec):
        height = sum((iv_log(d.clamp_below(1)) for d in delta_abs), iv.mpf(0)) / 3
        height_bound = (2 * iv_log(n + 3) + iv_log(m)) / 3
    return UnitDecomposition(
        n=n,
        m=m,
        A=A,
        B=B,
        delta=delta,
        norm=norm,
        A_real=solution.A,
        B_real=solution.B,
        delta_abs=delta_abs,
        conjugate_bounds_ok=bounds_ok,
        height=height,
        height_bound=height_bound,
        product_bound_ok=_settle(lambda bits: _product_bound(n, m, delta, bits)),
        candidates_tried=tried,
    )


def decompose(g: GammaTriple, *, radius: int | None = None, strict: bool = False) -> UnitDecomposition:
    """Decomposition of γ_0 = x - λ0^a·y."""
    return decompose_element(g.gammas[0], radius=radius, strict=strict)


def siegel_check(g: GammaTriple) -> bool:
    """Exact Siegel identity Σ γ_{i0}(λ_{i1}^a - λ_{i2}^a) over the cyclic shifts is 0."""
    powers = power_elements(g.n, g.a)
    i0, i1, i2 = g.cyclic()
    total = (
        oe_mul(g.gammas[i0], powers[i1] - powers[i2])
        + oe_mul(g.gammas[i1], powers[i2] - powers[i0])
        + oe_mul(g.gammas[i2], powers[i0] - powers[i1])
    )
    if not total.is_zero:
        logger.error("siegel_identity_failed n=%d a=%d x=%d y=%d", g.n, g.a, g.x, g.y)
    return total.is_zero


def ab_prime(i0: int, A: int, B: int) -> tuple[int, int]:
    """Exponents with γ_{i1}/γ_{i2} = (δ_{i1}/δ_{i2})·λ0^{A'}·λ2^{B'}."""
    if i0 == 0:
        return (-A + 2 * B, -2 * A + B)
    if i0 == 1:
        return (-A - B, A - 2 * B)
    if i0 == 2:
        return (2 * A - B, A + B)
    raise PreconditionError("i0 must be 0, 1 or 2", detail={"i0": i0})


@dataclass(frozen=True)
class LambdaDiagnostics:
    i0: int
    A_prime: int
    B_prime: int
    mu: RationalInterval
    Lambda: Any
    log_ratio: Any
    ratio_minus_one: RationalInterval
    rhs: RationalInterval
    identity_holds: bool
    lambda_matches: bool
    positive: bool
    rhs_inequality: bool | None
    mu_height_lower: Any
    mu_height_upper: Any
    mu_height_bound: Any
    mu_height_bound_coarse: Any
    mu_height_lower_ok: bool | None
    mu_height_upper_ok: bool | None
    lambda0_height: Any
    precision: int


def _mu_factors(g: GammaTriple, d: UnitDecomposition) -> tuple[OrderElement, OrderElement]:
    """N, D in Z[λ0] with μ = N/D at the identity embedding."""
    powers = power_elements(g.n, g.a)
    i0, i1, i2 = g.cyclic()
    deltas = conjugates(d.delta)
    return (
        oe_mul(deltas[i1], powers[i2] - powers[i0]),
        oe_mul(deltas[i2], powers[i1] - powers[i0]),
    )


def _log_house(images: Triple):
    return sum((iv_log(abs(e).clamp_below(1)) for e in images), iv.mpf(0)) / 3


def lambda_diagnostics(g: GammaTriple, d: UnitDecomposition) -> LambdaDiagnostics:
    """Certified μ, Λ and the Siegel ratio, with the size comparisons reported."""
    if g.y < 1:
        raise PreconditionError("the Siegel ratio needs y >= 1", n=g.n, a=g.a, detail={"y": g.y})
    if d.delta.n != g.n:
        raise PreconditionError("decomposition belongs to another field", n=g.n)
    n, a, m, y = g.n, g.a, g.m, g.y
    i0, i1, i2 = g.cyclic()
    a_p, b_p = ab_prime(i0, d.A, d.B)
    numerator, denominator = _mu_factors(g, d)
    denominator_conjugates = conjugates(denominator)
    cleared = oe_mul(numerator, oe_mul(denominator_conjugates[1], denominator_conjugates[2]))
    denominator_norm = abs(oe_norm(denominator))

    bits = settings.prec
    while bits <= settings.precision_cap_bits:
        try:
            lam = [root_power_bracket(n, i, a, bits) for i in range(3)]
            gam = embed(g.gammas[0], bits)
            dlt = embed(d.delta, bits)
            roots = isolate_roots(n, bits + 2 * (abs(a_p) + abs(b_p)) + 16)
            # μ and its conjugates: shifting every index by j
            mu_images = tuple(
                dlt[(i1 + j) % 3] / dlt[(i2 + j) % 3]
                * ((lam[(i2 + j) % 3] - lam[(i0 + j) % 3]) / (lam[(i1 + j) % 3] - lam[(i0 + j) % 3]))
                for j in range(3)
            )
            mu = mu_images[0]
            product = mu * interval_pow(roots.lam0, a_p) * interval_pow(roots.lam2, b_p)
            ratio = gam[i1] * (lam[i2] - lam[i0]) / (gam[i2] * (lam[i1] - lam[i0]))
            identity = -gam[i0] * (lam[i1] - lam[i2]) / (gam[i2] * (lam[i1] - lam[i0]))
        except IntervalDomainError:
            bits *= 2
            continue
        ratio_minus_one = product - 1
        if mu.excludes_zero() and ratio_minus_one.excludes_zero() and (ratio - 1).excludes_zero():
            break
        logger.debug("lambda_escalate n=%d a=%d x=%d y=%d bits=%d", n, a, g.x, y, bits)
        bits *= 2
    else:
        raise PrecisionExhaustedError("Siegel ratio did not separate from 1", bits=settings.precision_cap_bits, n=n, a=a)

    identity_holds = (ratio - 1).overlaps(identity)
    if not identity_holds:
        raise InvariantViolationError("Siegel ratio identity fails", n=n, a=a, detail={"x": g.x, "y": y})
    rhs = Fraction(2 * m, y**3) / lam[0]

    with interval_precision(max(settings.prec, bits + 16)):
        Lambda = a_p * iv_log(roots.lam0) + b_p * interval_log_abs(roots.lam2) + interval_log_abs(mu)
        log_ratio = interval_log_abs(ratio)
        lambda_matches = iv_overlaps(Lambda, log_ratio) and iv_overlaps(Lambda, interval_log_abs(product))

        lower = _log_house(mu_images)
        upper = _log_house(embed(cleared, bits)) + iv_log(denominator_norm)
        log_n3, log_m = iv_log(n + 3), iv_log(m)
        lambda0_height = iv_log(roots.lam0 + 1) / 3
        bound = (4 * log_n3 + 2 * log_m) / 3 + 4 * a * lambda0_height + 2 * iv_log(2)
        coarse = 3 * (log_m + a * log_n3)
        lower_ok = _negate(iv_less_than(bound, lower))
        upper_ok = _negate(iv_less_than(bound, upper))

    rhs_inequality = abs(ratio_minus_one).less_equal(rhs)
    if not lambda_matches:
        logger.error("lambda_mismatch n=%d a=%d x=%d y=%d", n, a, g.x, y)
    return LambdaDiagnostics(
        i0=i0,
        A_prime=a_p,
        B_prime=b_p,
        mu=mu,
        Lambda=Lambda,
        log_ratio=log_ratio,
        ratio_minus_one=ratio_minus_one,
        rhs=rhs,
        identity_holds=identity_holds,
        lambda_matches=lambda_matches,
        positive=ratio_minus_one.excludes_zero(),
        rhs_inequality=rhs_inequality,
        mu_height_lower=lower,
        mu_height_upper=upper,
        mu_height_bound=bound,
        mu_height_bound_coarse=coarse,
        mu_height_lower_ok=lower_ok,
        mu_height_upper_ok=upper_ok,
        lambda0_height=lambda0_height,
        precision=bits,
    )


def _negate(verdict: bool | None) -> bool | None:
    return None if verdict is None else not verdict
