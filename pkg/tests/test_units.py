import random

import pytest

from app.exceptions import PreconditionError, ZeroValueError
from app.services.cubic_order import OrderElement, conjugates, lambda2_element, oe_mul, oe_norm, oe_pow
from app.services.intervals import iv_overlaps
from app.services.units import (
    ab_prime,
    decompose,
    decompose_element,
    gamma_triple,
    lambda_diagnostics,
    regulator_diagnostics,
    regulator_system,
    siegel_check,
)


def _unit(n, A, B):
    return oe_mul(oe_pow(OrderElement.generator(n), A), oe_pow(lambda2_element(n), B))


def test_gamma_triple_on_trivial_point():
    g = gamma_triple(4, 3, 1, 0)
    assert g.value == 1
    assert g.i0 == 0
    assert g.cyclic() == (0, 1, 2)
    assert g.estimate_residual() is None


def test_gamma_triple_preconditions():
    with pytest.raises(PreconditionError):
        gamma_triple(4, 0, 1, 1)
    with pytest.raises(ZeroValueError):
        gamma_triple(4, 2, 0, 0)


def test_factor_product_is_form_value(sample_grid):
    for n, a, x, y in sample_grid:
        g = gamma_triple(n, a, x, y)
        product = oe_mul(oe_mul(g.gammas[0], g.gammas[1]), g.gammas[2])
        assert product == OrderElement.constant(n, g.value)
        smallest = g.abs_embeddings[g.i0]
        assert all(smallest.hi <= other.hi for other in g.abs_embeddings)
        assert siegel_check(g)


def test_regulator_system_solutions():
    zero = regulator_system(5, 0, 0)
    assert iv_overlaps(zero.A, 0) and iv_overlaps(zero.B, 0)
    l0, l1, l2 = zero.logs
    unit = regulator_system(5, l0, l1)
    assert iv_overlaps(unit.A, 1) and iv_overlaps(unit.B, 0)
    other = regulator_system(5, l2, l0)
    assert iv_overlaps(other.A, 0) and iv_overlaps(other.B, 1)
    with pytest.raises(PreconditionError):
        regulator_system(-1, 0, 0)


def test_regulator_diagnostics():
    diag = regulator_diagnostics(5)
    assert diag.R_exceeds_square
    assert diag.log_lambda2_near_reciprocal
    assert diag.root_product_is_one


@pytest.mark.parametrize("n", [0, 1, 3, 8])
def test_generators_decompose_to_themselves(n):
    lam0 = decompose_element(OrderElement.generator(n))
    assert (lam0.A, lam0.B, lam0.delta) == (1, 0, OrderElement.constant(n, 1))
    lam2 = decompose_element(lambda2_element(n))
    assert (lam2.A, lam2.B, lam2.delta) == (0, 1, OrderElement.constant(n, 1))
    minus = decompose_element(-_unit(n, -2, 3))
    assert (minus.A, minus.B, minus.delta) == (-2, 3, OrderElement.constant(n, -1))


def test_exotic_points_decompose_into_units(exotic_points):
    for n, a, x, y in exotic_points:
        g = gamma_triple(n, a, x, y)
        assert g.m == 1
        d = decompose(g)
        assert d.delta.is_constant and d.delta.c0 in (1, -1)
        assert oe_mul(d.delta, _unit(n, d.A, d.B)) == g.gammas[0]
        if n >= 3:
            assert d.conjugate_bounds_ok is True
        assert d.product_bound_ok is True


def test_non_unit_decomposition_multiplies_back():
    g = gamma_triple(5, 1, 1, 1)
    assert g.value == -11
    d = decompose(g)
    assert d.m == 11
    assert abs(d.norm) == 11 and oe_norm(d.delta) == d.norm
    assert oe_mul(d.delta, _unit(5, d.A, d.B)) == g.gammas[0]


def test_zero_element_cannot_decompose():
    with pytest.raises(ZeroValueError):
        decompose_element(OrderElement.constant(3, 0))


@pytest.mark.parametrize(
    "i0, expected",
    [(0, (-1, -2)), (1, (-1, 1)), (2, (2, 1))],
)
def test_ab_prime_for_unit_exponents(i0, expected):
    assert ab_prime(i0, 1, 0) == expected


def test_ab_prime_is_bounded():
    for i0 in range(3):
        for A in range(-6, 7):
            for B in range(-6, 7):
                a_p, b_p = ab_prime(i0, A, B)
                assert abs(a_p) + abs(b_p) <= 3 * (abs(A) + abs(B))
    with pytest.raises(PreconditionError):
        ab_prime(3, 1, 1)


def test_factor_ratio_is_unit_times_delta_ratio(exotic_points):
    for n, a, x, y in exotic_points:
        g = gamma_triple(n, a, x, y)
        d = decompose(g)
        i0, i1, i2 = g.cyclic()
        a_p, b_p = ab_prime(i0, d.A, d.B)
        deltas = conjugates(d.delta)
        left = oe_mul(g.gammas[i1], deltas[i2])
        right = oe_mul(oe_mul(deltas[i1], _unit(n, a_p, b_p)), g.gammas[i2])
        assert left == right


def test_lambda_diagnostics(exotic_points):
    for n, a, x, y in exotic_points:
        if y < 1:
            continue
        g = gamma_triple(n, a, x, y)
        diag = lambda_diagnostics(g, decompose(g))
        assert diag.identity_holds
        assert diag.lambda_matches
        assert diag.positive
        assert diag.mu.excludes_zero()
        assert (diag.A_prime, diag.B_prime) == ab_prime(g.i0, decompose(g).A, decompose(g).B)


def test_lambda_diagnostics_needs_positive_y():
    g = gamma_triple(4, 2, 1, 0)
    with pytest.raises(PreconditionError):
        lambda_diagnostics(g, decompose(g))


@pytest.mark.slow
def test_siegel_identity_on_random_points():
    rng = random.Random(20240611)
    for _ in range(10_000):
        n, a = rng.randint(0, 50), rng.randint(1, 20)
        x, y = rng.randint(-10**6, 10**6), rng.randint(-10**6, 10**6)
        if (x, y) == (0, 0):
            continue
        assert siegel_check(gamma_triple(n, a, x, y))


@pytest.mark.slow
def test_every_table_solution_is_a_unit(table_solutions):
    assert table_solutions
    for s in table_solutions:
        g = gamma_triple(s.n, s.a, s.x, s.y)
        assert g.m == 1
        d = decompose(g)
        assert d.delta.is_constant and d.delta.c0 in (1, -1), s
        assert oe_mul(d.delta, _unit(s.n, d.A, d.B)) == g.gammas[0]
        if s.n >= 3:
            assert d.conjugate_bounds_ok is True, s


@pytest.mark.slow
def test_linear_form_in_logs_is_nonzero_on_table_solutions(table_solutions):
    checked = 0
    for s in table_solutions:
        if s.y < 2:
            continue
        g = gamma_triple(s.n, s.a, s.x, s.y)
        d = decompose(g)
        diag = lambda_diagnostics(g, d)
        assert diag.positive, s
        assert diag.mu.excludes_zero()
        assert (diag.A_prime, diag.B_prime) == ab_prime(g.i0, d.A, d.B)
        checked += 1
    assert checked > 0


@pytest.mark.parametrize("n", [3, 4, 10, 57, 100])
def test_log_lambda2_is_near_reciprocal_of_lambda0(n):
    assert regulator_diagnostics(n).log_lambda2_near_reciprocal


@pytest.mark.slow
def test_regulator_diagnostics_up_to_one_hundred():
    for n in range(3, 101):
        diag = regulator_diagnostics(n)
        assert diag.log_lambda2_near_reciprocal, n
        assert diag.R_exceeds_square, n
        assert diag.root_product_is_one, n
