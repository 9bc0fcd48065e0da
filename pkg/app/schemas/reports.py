"""Pydantic schemas for the single-shot command reports."""

from __future__ import annotations

from pydantic import BaseModel

from app.schemas.common import BigInt, IntervalOut
from app.services.diophantine import Witness, approximation_quality
from app.services.forms import FormCoefficients
from app.services.roots import BoundReport, RootTriple
from app.services.units import GammaTriple, LambdaDiagnostics, UnitDecomposition


class CoefficientsRow(BaseModel):
    n: int
    a: int
    u: BigInt
    v: BigInt

    @classmethod
    def from_form(cls, form: FormCoefficients) -> CoefficientsRow:
        return cls(n=form.n, a=form.a, u=form.u, v=form.v)


class EvalRow(BaseModel):
    n: int
    a: int
    x: BigInt
    y: BigInt
    value: BigInt


class WitnessRow(BaseModel):
    """A convergent x/y of λ2^a with a small form value."""

    n: int
    a: int
    x: BigInt
    y: BigInt
    value: BigInt
    bound: BigInt
    quality: IntervalOut
    refined_bound_ok: bool
    y_condition_ok: bool

    @classmethod
    def from_witness(cls, w: Witness, bits: int) -> WitnessRow:
        return cls(
            n=w.n,
            a=w.a,
            x=w.x,
            y=w.y,
            value=w.value,
            bound=w.bound,
            quality=IntervalOut.from_rational(approximation_quality(w.n, w.a, w.x, w.y, bits)),
            refined_bound_ok=w.refined_bound_ok,
            y_condition_ok=w.y_condition_ok,
        )


class BoundCheckOut(BaseModel):
    label: str
    holds: bool
    asserted: bool


class RootReport(BaseModel):
    n: int
    precision: int
    lam0: IntervalOut
    lam1: IntervalOut
    lam2: IntervalOut
    bounds: list[BoundCheckOut] = []
    bounds_ok: bool | None = None

    @classmethod
    def build(cls, triple: RootTriple, bounds: BoundReport | None, digits: int) -> RootReport:
        return cls(
            n=triple.n,
            precision=triple.precision,
            lam0=IntervalOut.from_rational(triple.lam0, digits),
            lam1=IntervalOut.from_rational(triple.lam1, digits),
            lam2=IntervalOut.from_rational(triple.lam2, digits),
            bounds=[BoundCheckOut(label=c.label, holds=c.holds, asserted=c.asserted) for c in bounds.checks]
            if bounds
            else [],
            bounds_ok=bounds.ok if bounds else None,
        )


class DecompositionReport(BaseModel):
    """γ_0 = δ·λ0^A·λ2^B for one point (x, y)."""

    n: int
    a: int
    x: BigInt
    y: BigInt
    value: BigInt
    i0: int
    A: int
    B: int
    delta: list[BigInt]
    delta_norm: BigInt
    A_real: IntervalOut
    B_real: IntervalOut
    delta_abs: list[IntervalOut]
    conjugate_bounds_ok: bool | None
    height: IntervalOut
    height_bound: IntervalOut
    height_bound_ok: bool | None
    product_bound_ok: bool | None
    estimate_residual_ok: bool | None

    @classmethod
    def build(cls, g: GammaTriple, d: UnitDecomposition) -> DecompositionReport:
        return cls(
            n=g.n,
            a=g.a,
            x=g.x,
            y=g.y,
            value=g.value,
            i0=g.i0,
            A=d.A,
            B=d.B,
            delta=list(d.delta.coords),
            delta_norm=d.norm,
            A_real=IntervalOut.from_iv(d.A_real),
            B_real=IntervalOut.from_iv(d.B_real),
            delta_abs=[IntervalOut.from_rational(x) for x in d.delta_abs],
            conjugate_bounds_ok=d.conjugate_bounds_ok,
            height=IntervalOut.from_iv(d.height),
            height_bound=IntervalOut.from_iv(d.height_bound),
            height_bound_ok=d.height_bound_ok,
            product_bound_ok=d.product_bound_ok,
            estimate_residual_ok=g.estimate_residual(),
        )


class SiegelReport(BaseModel):
    """Exact Siegel identity plus the certified linear form in logarithms."""

    n: int
    a: int
    x: BigInt
    y: BigInt
    value: BigInt
    i0: int
    identity_zero: bool
    A: int | None = None
    B: int | None = None
    A_prime: int | None = None
    B_prime: int | None = None
    mu: IntervalOut | None = None
    Lambda: IntervalOut | None = None
    ratio_minus_one: IntervalOut | None = None
    rhs: IntervalOut | None = None
    rhs_inequality: bool | None = None
    positive: bool | None = None
    lambda_matches: bool | None = None
    mu_height_lower: IntervalOut | None = None
    mu_height_upper: IntervalOut | None = None
    mu_height_bound: IntervalOut | None = None
    mu_height_bound_coarse: IntervalOut | None = None
    mu_height_lower_ok: bool | None = None
    mu_height_upper_ok: bool | None = None
    lambda0_height: IntervalOut | None = None
    precision: int | None = None

    @classmethod
    def build(
        cls, g: GammaTriple, identity_zero: bool, d: UnitDecomposition | None, diag: LambdaDiagnostics | None
    ) -> SiegelReport:
        report = cls(n=g.n, a=g.a, x=g.x, y=g.y, value=g.value, i0=g.i0, identity_zero=identity_zero)
        if d is None or diag is None:
            return report
        return report.model_copy(
            update={
                "A": d.A,
                "B": d.B,
                "A_prime": diag.A_prime,
                "B_prime": diag.B_prime,
                "mu": IntervalOut.from_rational(diag.mu),
                "Lambda": IntervalOut.from_iv(diag.Lambda),
                "ratio_minus_one": IntervalOut.from_rational(diag.ratio_minus_one),
                "rhs": IntervalOut.from_rational(diag.rhs),
                "rhs_inequality": diag.rhs_inequality,
                "positive": diag.positive,
                "lambda_matches": diag.lambda_matches,
                "mu_height_lower": IntervalOut.from_iv(diag.mu_height_lower),
                "mu_height_upper": IntervalOut.from_iv(diag.mu_height_upper),
                "mu_height_bound": IntervalOut.from_iv(diag.mu_height_bound),
                "mu_height_bound_coarse": IntervalOut.from_iv(diag.mu_height_bound_coarse),
                "mu_height_lower_ok": diag.mu_height_lower_ok,
                "mu_height_upper_ok": diag.mu_height_upper_ok,
                "lambda0_height": IntervalOut.from_iv(diag.lambda0_height),
                "precision": diag.precision,
            }
        )


class RegulatorReport(BaseModel):
    n: int
    R: IntervalOut
    log_lambda0_squared: IntervalOut
    R_exceeds_square: bool
    log_lambda2_near_reciprocal: bool
    root_product_is_one: bool
