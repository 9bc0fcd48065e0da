"""Exact arithmetic in the order Z[λ0] of the simplest cubic field.

Elements are c0 + c1·λ0 + c2·λ0² with integer coordinates, reduced with
λ0³ = (n-1)λ0² + (n+2)λ0 + 1.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache

from app.config import settings
from app.exceptions import (
    InvariantViolationError,
    NotAUnitError,
    ParameterMismatchError,
    PrecisionExhaustedError,
    PreconditionError,
)
from app.services.intervals import RationalInterval
from app.services.roots import isolate_roots

logger = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True)
class OrderElement:
    n: int
    c0: int
    c1: int = 0
    c2: int = 0

    @classmethod
    def constant(cls, n: int, k: int) -> OrderElement:
        return cls(n, k, 0, 0)

    @classmethod
    def generator(cls, n: int) -> OrderElement:
        """λ0 itself."""
        return cls(n, 0, 1, 0)

    @property
    def coords(self) -> tuple[int, int, int]:
        return (self.c0, self.c1, self.c2)

    @property
    def is_constant(self) -> bool:
        return self.c1 == 0 and self.c2 == 0

    @property
    def is_zero(self) -> bool:
        return self.c0 == 0 and self.is_constant

    def _coerce(self, other: OrderElement | int) -> OrderElement:
        if isinstance(other, int):
            return OrderElement.constant(self.n, other)
        if other.n != self.n:
            raise ParameterMismatchError(f"elements of Z[λ0] for n={self.n} and n={other.n}", n=self.n)
        return other

    def __add__(self, other: OrderElement | int) -> OrderElement:
        o = self._coerce(other)
        return OrderElement(self.n, self.c0 + o.c0, self.c1 + o.c1, self.c2 + o.c2)

    __radd__ = __add__

    def __neg__(self) -> OrderElement:
        return OrderElement(self.n, -self.c0, -self.c1, -self.c2)

    def __sub__(self, other: OrderElement | int) -> OrderElement:
        return self + (-self._coerce(other))

    def __rsub__(self, other: int) -> OrderElement:
        return self._coerce(other) - self

    def __mul__(self, other: OrderElement | int) -> OrderElement:
        if isinstance(other, int):
            return OrderElement(self.n, self.c0 * other, self.c1 * other, self.c2 * other)
        return oe_mul(self, other)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> OrderElement:
        return oe_pow(self, exponent)

    def __str__(self) -> str:
        return f"{self.c0} + {self.c1}*l0 + {self.c2}*l0^2"


def oe_mul(u: OrderElement, v: OrderElement) -> OrderElement:
    """Product in Z[λ0]."""
    if u.n != v.n:
        raise ParameterMismatchError(f"elements of Z[λ0] for n={u.n} and n={v.n}", n=u.n)
    n = u.n
    a0, a1, a2 = u.coords
    b0, b1, b2 = v.coords
    d = [
        a0 * b0,
        a0 * b1 + a1 * b0,
        a0 * b2 + a1 * b1 + a2 * b0,
        a1 * b2 + a2 * b1,
        a2 * b2,
    ]
    # λ^k = λ^(k-3)·((n-1)λ² + (n+2)λ + 1)
    for k in (4, 3):
        top = d[k]
        if top:
            d[k - 1] += (n - 1) * top
            d[k - 2] += (n + 2) * top
            d[k - 3] += top
    return OrderElement(n, d[0], d[1], d[2])


def oe_pow(u: OrderElement, exponent: int) -> OrderElement:
    """u^e by squaring; negative exponents need u to be a unit."""
    if exponent < 0:
        return oe_pow(oe_invert_unit(u), -exponent)
    result = OrderElement.constant(u.n, 1)
    base = u
    while exponent:
        if exponent & 1:
            result = oe_mul(result, base)
        exponent >>= 1
        if exponent:
            base = oe_mul(base, base)
    return result


def multiplication_matrix(u: OrderElement) -> list[list[int]]:
    """Matrix of t -> u·t on the basis {1, λ0, λ0²}; column j is u·λ0^j."""
    lam = OrderElement.generator(u.n)
    columns = [u, oe_mul(u, lam)]
    columns.append(oe_mul(columns[1], lam))
    return [[col.coords[row] for col in columns] for row in range(3)]


def _det3(m: list[list[int]]) -> int:
    return (
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    )


def oe_norm(u: OrderElement) -> int:
    """Exact norm, the determinant of the multiplication matrix."""
    return _det3(multiplication_matrix(u))


def oe_invert_unit(u: OrderElement) -> OrderElement:
    """Inverse of a unit: the first column of adj(M_u), times det(M_u) = ±1."""
    m = multiplication_matrix(u)
    det = _det3(m)
    if det not in (1, -1):
        raise NotAUnitError(f"element {u} has norm {det}", n=u.n, detail={"norm": det})
    # first column of the adjugate = cofactors of the first row
    col = (
        m[1][1] * m[2][2] - m[1][2] * m[2][1],
        -(m[1][0] * m[2][2] - m[1][2] * m[2][0]),
        m[1][0] * m[2][1] - m[1][1] * m[2][0],
    )
    return OrderElement(u.n, det * col[0], det * col[1], det * col[2])


def lambda2_element(n: int) -> OrderElement:
    """λ2 = -(λ0+1)/λ0 = -λ0² + (n-1)λ0 + (n+1)."""
    return OrderElement(n, n + 1, n - 1, -1)


@lru_cache(maxsize=4096)
def lambda1_element(n: int) -> OrderElement:
    """λ1 = -(λ0+1)^-1, pinned to the middle root by an interval check."""
    lam1 = -oe_invert_unit(OrderElement(n, 1, 1, 0))
    triple = isolate_roots(n, 64)
    image = _evaluate(lam1, triple.lam0)
    if not image.overlaps(triple.lam1):
        raise InvariantViolationError("galois image of λ0 is not λ1", n=n)
    return lam1


def galois(u: OrderElement) -> OrderElement:
    """σ: λ0 -> λ1 -> λ2 -> λ0, extended to Z[λ0]."""
    s = lambda1_element(u.n)
    inner = s * u.c2 + u.c1
    return oe_mul(s, inner) + u.c0


def conjugates(u: OrderElement) -> tuple[OrderElement, OrderElement, OrderElement]:
    first = galois(u)
    return (u, first, galois(first))


def _evaluate(u: OrderElement, at: RationalInterval) -> RationalInterval:
    # Horner on c0 + λ(c1 + λ c2)
    return (at * u.c2 + u.c1) * at + u.c0


def embed(u: OrderElement, precision: int) -> tuple[RationalInterval, RationalInterval, RationalInterval]:
    """Certified images of u under λ0 -> λ0, λ1, λ2."""
    if precision < 32:
        raise PreconditionError("precision must be at least 32 bits", n=u.n, detail={"precision": precision})
    if u.is_constant:
        point = RationalInterval.point(u.c0)
        return (point, point, point)
    spread = max(abs(c) for c in u.coords).bit_length()
    triple = isolate_roots(u.n, precision + spread + 2 * (abs(u.n) + 3).bit_length() + 8)
    return tuple(_evaluate(u, triple.lam(i)) for i in range(3))


def embed_certified(u: OrderElement, relative_bits: int, start: int = 128, cap: int | None = None):
    """Embeddings refined until each excludes 0 and has relative width <= 2^-relative_bits."""
    cap = cap or settings.precision_cap_bits
    if u.is_zero:
        raise PreconditionError("zero element has no certified sign", n=u.n)
    precision = max(32, start)
    while precision <= cap:
        images = embed(u, precision)
        if all(x.excludes_zero() and x.width * (1 << relative_bits) <= abs(x).lo for x in images):
            return images
        logger.debug("embed_escalate n=%d precision=%d", u.n, precision)
        precision *= 2
    raise PrecisionExhaustedError("embedding did not separate from zero", bits=cap, n=u.n)
