import pytest

from app.exceptions import DegenerateFormError, PreconditionError
from app.services import forms
from app.services.forms import (
    Symmetry,
    coefficient_sequence,
    coeffs,
    coeffs_oracle,
    configure_cache,
    eval_form,
    symmetry_image,
)


@pytest.mark.parametrize(
    "n, us, vs",
    [
        (0, [3, -1, 5, -4, 13, -16, 38, -57], [3, 2, 6, 11, 26, 57, 129, 289]),
        (1, [3, 0, 6, 3, 18, 15, 57], [3, 3, 9, 24, 69, 198]),
        (2, [3, 1, 9, 16, 53], [3, 4, 14, 49]),
    ],
)
def test_small_coefficients(n, us, vs):
    for a, u in enumerate(us):
        assert coeffs(n, a).u == u
    for a, v in enumerate(vs):
        assert coeffs(n, a).v == v


@pytest.mark.parametrize("n", [0, 3, 17])
def test_seed_values(n):
    assert (coeffs(n, 1).u, coeffs(n, 1).v) == (n - 1, n + 2)
    assert (coeffs(n, 2).u, coeffs(n, 2).v) == (n * n + 5, n * n + 2 * n + 6)


def test_recurrence_matches_trace_oracle():
    for n in range(0, 11):
        for a in range(0, 25):
            assert coeffs(n, a) == coeffs_oracle(n, a)


@pytest.mark.slow
def test_recurrence_matches_trace_oracle_full_grid():
    for n in range(0, 51):
        for a in range(0, 61):
            assert coeffs(n, a) == coeffs_oracle(n, a)


def test_sequence_agrees_with_single_lookups():
    seq = coefficient_sequence(6, 30)
    assert [c.a for c in seq] == list(range(31))
    assert seq[30] == coeffs(6, 30)


@pytest.mark.parametrize(
    "n, a, x, y, value",
    [
        (4, 2, 3, 2, 1),
        (1, 1, -3, 2, 1),
        (0, 5, 19, -1, 1),
        (1, 2, 1, 1, 3),
        (7, 1, 1, 1, -15),
        (7, 1, -1, 1, 1),
    ],
)
def test_known_values(n, a, x, y, value):
    assert eval_form(n, a, x, y) == value


def test_coefficients_for_n4_a2():
    c = coeffs(4, 2)
    assert (c.u, c.v) == (21, 30)


def test_negative_a_swaps_arguments():
    assert eval_form(3, -2, 5, -1) == -eval_form(3, 2, -1, 5)
    with pytest.raises(PreconditionError):
        coeffs(3, -2)


def test_degenerate_form():
    with pytest.raises(DegenerateFormError):
        eval_form(2, 0, 3, 1)
    assert eval_form(2, 0, 3, 1, degenerate=True) == 8


def test_symmetries(sample_grid):
    for n, a, x, y in sample_grid:
        value = eval_form(n, a, x, y)
        for which in Symmetry:
            image = symmetry_image(n, a, x, y, which)
            assert eval_form(image.n, image.a, image.x, image.y) == image.sign * value


def test_symmetry_rejects_degenerate():
    with pytest.raises(DegenerateFormError):
        symmetry_image(1, 0, 1, 1, "neg")


def test_cache_limit_is_respected():
    forms._cache.clear()
    configure_cache(10)
    assert len(forms._cache) == 0
    assert coeffs(3, 50) == coeffs_oracle(3, 50)
    assert len(forms._cache) == 0
    coeffs(3, 5)
    assert len(forms._cache) == 6


@pytest.mark.parametrize("t", [-3, 2, 7])
def test_form_is_homogeneous_of_degree_three(sample_grid, t):
    for n, a, x, y in sample_grid:
        assert eval_form(n, a, t * x, t * y) == t**3 * eval_form(n, a, x, y)
