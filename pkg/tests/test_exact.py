"""Tests for the exact arithmetic kernels."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from pfverify import exact
from pfverify.exact import (
    ModMap,
    gauss_div,
    gauss_eq,
    gauss_from_text,
    gauss_is_unit,
    gauss_lognorm,
    gauss_make,
    gauss_mul,
    mod_eval,
    next_prime,
    parse_expr,
    poly_arith,
    poly_eval_mod,
    poly_subst,
    ratfunc_arith,
    ratfunc_eq,
    ratfunc_from_text,
    to_gf5,
)


def rf(text: str, var_names: tuple[str, ...] = ("a",)) -> exact.RatFunc:
    return ratfunc_from_text(text, var_names)


# ---------------------------------------------------------------------------
# Polynomial arithmetic


def test_poly_representation_is_sparse_exponent_dict() -> None:
    p = rf("a^2 - a + 1").num
    assert p == {(2,): 1, (1,): -1, (0,): 1}


def test_sub_of_poly_from_itself_is_zero() -> None:
    a = rf("a").num
    assert poly_arith(a, a, "sub") == {}


def test_difference_of_squares() -> None:
    one_minus = rf("1 - a").num
    one_plus = rf("1 + a").num
    assert poly_arith(one_minus, one_plus, "mul") == rf("1 - a^2").num


def test_product_of_quadratic_and_linear_gives_cubic() -> None:
    quad = rf("a^2 - a + 1").num
    lin = rf("a + 1").num
    assert poly_arith(quad, lin, "mul") == rf("a^3 + 1").num


def test_poly_arith_rejects_arity_mismatch() -> None:
    one_var = rf("a").num
    two_var = rf("a + b", ("a", "b")).num
    with pytest.raises(ValueError):
        poly_arith(one_var, two_var, "add")


def test_poly_arith_never_stores_zero_coefficients() -> None:
    a = rf("a^2 + a").num
    b = rf("a^2 - a").num
    assert poly_arith(a, b, "sub") == {(1,): 2}


# ---------------------------------------------------------------------------
# Rational function equality by cross-multiplication


def test_negated_reciprocal_forms_are_equal() -> None:
    assert ratfunc_eq(rf("-1/(a - 1)"), rf("1/(1 - a)"))


def test_distinct_linear_polys_are_not_equal() -> None:
    assert not ratfunc_eq(rf("a"), rf("1 - a"))


def test_factored_denominator_matches_expanded_form() -> None:
    expanded = rf("-a/(a^3 + 1)")
    factored = ratfunc_arith(
        rf("-a"),
        ratfunc_arith(rf("a + 1"), rf("a^2 - a + 1"), "mul"),
        "div",
    )
    assert ratfunc_eq(expanded, factored)


def test_ratfunc_equality_ignores_common_factors() -> None:
    doubled = rf("(2*a - 2)/(2*a^2 - 2)")
    assert ratfunc_eq(doubled, rf("1/(a + 1)"))


def _random_poly(rng: random.Random, arity: int) -> exact.Poly:
    terms: exact.Poly = {}
    for _ in range(rng.randint(1, 4)):
        exp = tuple(rng.randint(0, 2) for _ in range(arity))
        coeff = rng.choice([-3, -2, -1, 1, 2, 3])
        terms[exp] = terms.get(exp, 0) + coeff
    return exact.canonicalize(terms)


def _random_ratfunc(rng: random.Random, arity: int) -> exact.RatFunc:
    num = _random_poly(rng, arity)
    den: exact.Poly = {}
    while not den:
        den = _random_poly(rng, arity)
    return exact.RatFunc(num, den)


def test_ratfunc_eq_is_an_equivalence_relation_on_random_triples() -> None:
    rng = random.Random(20260817)
    for _ in range(1000):
        arity = rng.randint(1, 3)
        base = _random_ratfunc(rng, arity)
        scale1: exact.Poly = {}
        while not scale1:
            scale1 = _random_poly(rng, arity)
        scale2: exact.Poly = {}
        while not scale2:
            scale2 = _random_poly(rng, arity)
        b = exact.RatFunc(
            poly_arith(base.num, scale1, "mul"), poly_arith(base.den, scale1, "mul")
        )
        c = exact.RatFunc(
            poly_arith(base.num, scale2, "mul"), poly_arith(base.den, scale2, "mul")
        )
        other = _random_ratfunc(rng, arity)
        assert ratfunc_eq(base, base)
        assert ratfunc_eq(base, b) and ratfunc_eq(b, base)
        assert ratfunc_eq(b, c) and ratfunc_eq(base, c)
        if ratfunc_eq(base, other) and ratfunc_eq(other, b):
            assert ratfunc_eq(base, b)


def test_poly_subst_composes_values_into_polynomial() -> None:
    # a^2 - a + 1 evaluated at a = 1/(1-a) gives (a^2 - a + 1)/(1-a)^2.
    quad = rf("a^2 - a + 1").num
    value = rf("1/(1 - a)")
    result = poly_subst(quad, [value])
    assert ratfunc_eq(result, rf("(a^2 - a + 1)/((1 - a)^2)"))


# ---------------------------------------------------------------------------
# Gaussian dyadic numbers


def test_gauss_canonical_form_reduces_shared_powers_of_two() -> None:
    assert gauss_make(2, 2, 1) == gauss_make(1, 1, 0)


def test_gauss_product_of_conjugates_is_norm() -> None:
    x = gauss_from_text("1 - i")
    y = gauss_from_text("1 + i")
    assert gauss_eq(gauss_mul(x, y), gauss_make(2, 0, 0))


def test_gauss_half_one_minus_i_squares_to_minus_i_over_two() -> None:
    x = gauss_from_text("(1 - i)/2")
    assert gauss_eq(gauss_mul(x, x), gauss_from_text("-i/2"))


def test_gauss_division_is_exact_for_unit_quotients() -> None:
    num = gauss_from_text("-1")
    den = gauss_from_text("-i")
    assert gauss_eq(gauss_div(num, den), gauss_from_text("-i"))


def test_gauss_division_rejects_values_outside_the_ring() -> None:
    with pytest.raises(ValueError):
        gauss_div(gauss_make(1, 0, 0), gauss_make(3, 0, 0))


def test_gauss_unit_recognition() -> None:
    assert gauss_is_unit(gauss_from_text("2"))
    assert gauss_is_unit(gauss_from_text("(1 + i)/2"))
    assert not gauss_is_unit(gauss_make(3, 0, 0))
    assert not gauss_is_unit(gauss_make(0, 0, 0))


def test_gauss_lognorm_values() -> None:
    assert gauss_lognorm(gauss_from_text("2")) == Fraction(1)
    assert gauss_lognorm(gauss_from_text("(1 - i)/2")) == Fraction(-1, 2)
    assert gauss_lognorm(gauss_from_text("1 + i")) == Fraction(1, 2)
    assert gauss_lognorm(gauss_from_text("-1")) == Fraction(0)


def test_gauss_lognorm_rejects_non_units() -> None:
    with pytest.raises(ValueError):
        gauss_lognorm(gauss_make(3, 0, 0))


def test_gauss_lognorm_is_additive_on_random_unit_products() -> None:
    rng = random.Random(11)
    units = [
        gauss_from_text(t)
        for t in ("2", "1/2", "i", "-i", "1 - i", "1 + i", "(1 - i)/2", "-1", "-2", "2*i")
    ]
    for _ in range(300):
        x = rng.choice(units)
        y = rng.choice(units)
        assert gauss_lognorm(gauss_mul(x, y)) == gauss_lognorm(x) + gauss_lognorm(y)


# ---------------------------------------------------------------------------
# Modular evaluation


H3_GENS = ("-1", "a", "1 - a", "a^2 - a + 1")
H4_GENS = ("-1", "a", "b", "1 - a", "1 - b", "a*b - 1", "a + b - 2*a*b")


def _residues(gen_texts: tuple[str, ...], var_res: dict[str, int], p: int) -> tuple[int, ...]:
    return tuple(exact.expr_eval_mod(parse_expr(t), var_res, p) for t in gen_texts)


def test_generator_residues_single_variable_map() -> None:
    p = 1299709
    assert _residues(H3_GENS, {"a": 5}, p) == (1299708, 5, 1299705, 21)


def test_generator_residues_two_variable_map() -> None:
    p = 179424673
    assert _residues(H4_GENS, {"a": 11, "b": 19}, p) == (
        179424672,
        11,
        19,
        179424663,
        179424655,
        208,
        179424285,
    )


def test_poly_eval_mod_matches_direct_substitution() -> None:
    quad = rf("a^2 - a + 1").num
    assert poly_eval_mod(quad, (5,), 1299709) == 21


def test_mod_eval_of_empty_exponent_vector_is_one() -> None:
    m = ModMap(1299709, (1299708, 5, 1299705, 21))
    assert mod_eval(m, 1, (0, 0, 0, 0)) == 1


def test_mod_eval_applies_sign_and_inverse_exponents() -> None:
    m = ModMap(1299709, (1299708, 5, 1299705, 21))
    v = mod_eval(m, -1, (0, -1, 0, 1))
    assert v == (-pow(5, 1299707, 1299709) * 21) % 1299709


def test_mod_eval_is_a_homomorphism_of_the_exponent_lattice() -> None:
    rng = random.Random(7)
    m = ModMap(1299709, (1299708, 5, 1299705, 21))
    for _ in range(200):
        e1 = tuple(rng.randint(-3, 3) for _ in range(4))
        e2 = tuple(rng.randint(-3, 3) for _ in range(4))
        combined = tuple(x + y for x, y in zip(e1, e2))
        assert (
            mod_eval(m, 1, e1) * mod_eval(m, 1, e2) % m.prime == mod_eval(m, 1, combined)
        )


def test_mod_eval_rejects_zero_generator_residue() -> None:
    with pytest.raises(ValueError):
        ModMap(7, (0, 3))


def test_next_prime_advances_deterministically() -> None:
    assert next_prime(1299709) == 1299721
    assert next_prime(2) == 3
    assert next_prime(179424673) == 179424691


# ---------------------------------------------------------------------------
# Reduction to GF(5)


def test_gf5_of_reducible_fraction() -> None:
    assert to_gf5(Fraction(14, 72)) == 2


def test_gf5_of_one() -> None:
    assert to_gf5(Fraction(1)) == 1


def test_gf5_of_fraction_with_removable_factor_of_five() -> None:
    assert to_gf5(Fraction(30, 20)) == 4


def test_gf5_rejects_denominator_divisible_by_five() -> None:
    with pytest.raises(ValueError):
        to_gf5(Fraction(1, 5))
    with pytest.raises(ValueError):
        to_gf5(Fraction(3, 10))


def test_gf5_inverse_table_matches_fermat_inverses() -> None:
    for d in (1, 2, 3, 4):
        assert to_gf5(Fraction(1, d)) == pow(d, 3, 5)


def test_gf5_of_reciprocal_multiplies_to_one() -> None:
    rng = random.Random(3)
    for _ in range(200):
        num = rng.randint(-50, 50)
        den = rng.randint(1, 50)
        x = Fraction(num, den)
        if x == 0 or x.denominator % 5 == 0 or x.numerator % 5 == 0:
            continue
        assert to_gf5(x) * to_gf5(1 / x) % 5 == 1


# ---------------------------------------------------------------------------
# Expression parsing


def test_parser_handles_precedence_and_unary_minus() -> None:
    loose = rf("1 - a/(1 - a + a^2)")
    explicit = ratfunc_arith(rf("1"), rf("a/(1 - a + a^2)"), "sub")
    assert ratfunc_eq(loose, explicit)


def test_parser_supports_powers_of_parenthesized_groups() -> None:
    assert ratfunc_eq(rf("(a - 1)^2"), rf("a^2 - 2*a + 1"))


def test_parser_rejects_unknown_variables() -> None:
    with pytest.raises(ValueError):
        ratfunc_from_text("a + x", ("a",))


def test_parser_rejects_imaginary_unit_in_polynomial_context() -> None:
    with pytest.raises(ValueError):
        ratfunc_from_text("1 - i", ("a",))


def test_gauss_parser_accepts_imaginary_unit_only() -> None:
    assert gauss_eq(gauss_from_text("i*(1 - i)"), gauss_from_text("1 + i"))
    with pytest.raises(ValueError):
        gauss_from_text("a + 1")


def test_expr_eval_mod_handles_division() -> None:
    e = parse_expr("(a - 1)/(a + 1)")
    assert exact.expr_eval_mod(e, {"a": 3}, 7) == (2 * pow(4, 5, 7)) % 7


def test_expr_eval_mod_rejects_division_by_zero_residue() -> None:
    e = parse_expr("1/(a - 3)")
    with pytest.raises(ValueError):
        exact.expr_eval_mod(e, {"a": 3}, 7)
