"""Shared pydantic types for report rows."""

from typing import Annotated

from pydantic import BaseModel, PlainSerializer

from app.services.intervals import RationalInterval, iv_endpoints, rational_endpoints

# Big integers leave the process as decimal strings.
BigInt = Annotated[int, PlainSerializer(lambda v: str(v), return_type=str, when_used="json")]


class IntervalOut(BaseModel):
    """Interval endpoints as decimal strings."""

    lo: str
    hi: str

    @classmethod
    def from_rational(cls, x: RationalInterval, digits: int = 20) -> "IntervalOut":
        lo, hi = rational_endpoints(x, digits)
        return cls(lo=lo, hi=hi)

    @classmethod
    def from_iv(cls, x, digits: int = 20) -> "IntervalOut":
        lo, hi = iv_endpoints(x, digits)
        return cls(lo=lo, hi=hi)
