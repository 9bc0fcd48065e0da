import random

import pytest

from app.exceptions import NotAUnitError, ParameterMismatchError, PreconditionError
from app.services.cubic_order import (
    OrderElement,
    conjugates,
    embed,
    embed_certified,
    galois,
    lambda1_element,
    lambda2_element,
    oe_invert_unit,
    oe_mul,
    oe_norm,
    oe_pow,
)
from app.services.forms import eval_form


@pytest.mark.parametrize("n", [-3, 0, 1, 2, 5, 40])
def test_generator_satisfies_minimal_polynomial(n):
    lam = OrderElement.generator(n)
    assert lam**3 == OrderElement(n, 1, n + 2, n - 1)
    assert oe_norm(lam) == 1


@pytest.mark.parametrize("k", [-4, 0, 1, 7])
def test_norm_of_constant_is_cube(k):
    assert oe_norm(OrderElement.constant(3, k)) == k**3


def _assert_norm_form(n, a_max, box):
    lam = OrderElement.generator(n)
    for a in range(1, a_max + 1):
        power = oe_pow(lam, a)
        for x in range(-box, box + 1):
            for y in range(-box, box + 1):
                if (x, y) != (0, 0):
                    assert oe_norm(x - power * y) == eval_form(n, a, x, y), (n, a, x, y)


@pytest.mark.parametrize("n", [0, 1, 4, 10])
def test_norm_of_linear_form_matches_form_value(n):
    _assert_norm_form(n, 5, 6)


@pytest.mark.slow
@pytest.mark.parametrize("n", range(0, 11))
def test_norm_form_identity_full_grid(n):
    _assert_norm_form(n, 10, 20)


@pytest.mark.parametrize("n", [0, 2, 9])
def test_unit_inverses(n):
    one = OrderElement.constant(n, 1)
    for unit in (OrderElement.generator(n), lambda2_element(n), OrderElement(n, 1, 1, 0)):
        assert oe_mul(unit, oe_invert_unit(unit)) == one
    assert oe_norm(OrderElement(n, 1, 1, 0)) == -1
    assert oe_pow(OrderElement.generator(n), -2) * oe_pow(OrderElement.generator(n), 2) == one


def test_non_unit_has_no_inverse():
    with pytest.raises(NotAUnitError):
        oe_invert_unit(OrderElement.constant(3, 2))


def test_mixed_parameters_rejected():
    with pytest.raises(ParameterMismatchError):
        OrderElement.generator(1) * OrderElement.generator(2)
    with pytest.raises(ParameterMismatchError):
        OrderElement.generator(1) + OrderElement.generator(2)


@pytest.mark.parametrize("n", [0, 1, 3, 12])
def test_galois_has_order_three(n):
    lam = OrderElement.generator(n)
    assert galois(galois(lam)) == lambda2_element(n)
    assert galois(lambda2_element(n)) == lam
    u = OrderElement(n, 3, -2, 5)
    assert galois(galois(galois(u))) == u


@pytest.mark.parametrize("n", [0, 1, 6])
def test_roots_multiply_to_one(n):
    product = oe_mul(oe_mul(OrderElement.generator(n), lambda1_element(n)), lambda2_element(n))
    assert product == OrderElement.constant(n, 1)
    u = OrderElement(n, 2, 1, -1)
    c = conjugates(u)
    assert oe_mul(oe_mul(c[0], c[1]), c[2]) == OrderElement.constant(n, oe_norm(u))


def test_embedding_orders_roots():
    lam0, lam1, lam2 = embed(OrderElement.generator(4), 64)
    assert lam0.lo > 4
    assert -1 < lam1.lo and lam1.hi < 0
    assert lam2.hi < -1


def test_embed_rejects_low_precision():
    with pytest.raises(PreconditionError):
        embed(OrderElement.generator(4), 8)


def test_embed_certified_separates_from_zero():
    images = embed_certified(OrderElement(2, 1, 1, 0), 20)
    assert all(x.excludes_zero() for x in images)
    with pytest.raises(PreconditionError):
        embed_certified(OrderElement.constant(2, 0), 20)


def test_norm_of_exotic_factor():
    assert oe_norm(OrderElement(1, -3, -2, 0)) == 1


@pytest.mark.parametrize("n", [0, 7])
def test_inverse_of_generator_is_explicit(n):
    assert oe_invert_unit(OrderElement.generator(n)) == OrderElement(n, -(n + 2), -(n - 1), 1)


def test_norm_is_multiplicative():
    for n in (0, 3, 11):
        u, v = OrderElement(n, 2, -1, 3), OrderElement(n, -5, 4, 1)
        assert oe_norm(u * v) == oe_norm(u) * oe_norm(v)


def _random_element(rng, n):
    return OrderElement(n, rng.randint(-50, 50), rng.randint(-50, 50), rng.randint(-50, 50))


def test_norm_is_multiplicative_on_random_elements():
    rng = random.Random(7)
    for n in range(0, 101):
        for _ in range(5):
            u, v = _random_element(rng, n), _random_element(rng, n)
            assert oe_norm(oe_mul(u, v)) == oe_norm(u) * oe_norm(v), (n, u, v)


def test_conjugate_product_is_norm_on_random_elements():
    rng = random.Random(11)
    for n in range(0, 101):
        for _ in range(3):
            u = _random_element(rng, n)
            c = conjugates(u)
            assert oe_mul(oe_mul(c[0], c[1]), c[2]) == OrderElement.constant(n, oe_norm(u)), (n, u)


@pytest.mark.parametrize("n, a, x, y", [(4, 2, 3, 2), (0, 2, -14, -9), (5, 1, 1, 1), (7, 3, -11, 4)])
def test_embedding_product_encloses_form_value(n, a, x, y):
    gamma = x - oe_pow(OrderElement.generator(n), a) * y
    first, second, third = embed(gamma, 96)
    assert (first * second * third).contains(eval_form(n, a, x, y))
