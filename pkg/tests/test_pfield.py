"""Tests for partial-field specs, associates, homomorphisms, and the
dual-route fundamental tables."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from pfverify import pfield
from pfverify.exact import (
    gauss_eq,
    gauss_from_text,
    ratfunc_arith,
    ratfunc_eq,
    ratfunc_from_text,
)
from pfverify.pfield import (
    FactoredElement,
    associates,
    builtin_specs,
    expand_element,
    factor_over_generators,
    fundamental_table,
    hom_gf5,
    is_fundamental_exact,
)


def spec(name: str) -> pfield.PartialFieldSpec:
    return builtin_specs()[name]


def rf(text: str, var_names: tuple[str, ...] = ("a",)):
    return ratfunc_from_text(text, var_names)


# ---------------------------------------------------------------------------
# Spec loading


def test_builtin_specs_have_expected_shapes() -> None:
    shapes = {
        "H2": (0, 4, 4, 2),
        "H3": (1, 4, 5, 3),
        "H4": (2, 7, 10, 4),
        "H5": (3, 10, 16, 6),
    }
    for name, (arity, n_gens, n_seeds, width) in shapes.items():
        s = spec(name)
        assert s.arity == arity
        assert len(s.generators) == n_gens
        assert len(s.seeds) == n_seeds
        assert s.gf5_width == width


def test_first_generator_is_minus_one_everywhere() -> None:
    for s in builtin_specs().values():
        assert s.generator_exprs[0] == "-1"


def test_spec_rejects_missing_minus_one_generator() -> None:
    text = "field X\nk 3\nvars a\ngen a\nseed a\ngf5map a 2 3 4\nprime 7\nmodvar a 3\n"
    with pytest.raises(ValueError):
        pfield.parse_field_spec(text)


def test_single_variable_generator_residues() -> None:
    mm = spec("H3").mod_map()
    assert mm.prime == 1299709
    assert mm.gen_residues == (1299708, 5, 1299705, 21)


def test_three_variable_generator_residues() -> None:
    mm = spec("H5").mod_map()
    assert mm.gen_residues == (
        22801763488,
        17,
        47,
        53,
        22801763473,
        22801763443,
        22801763437,
        22801763453,
        22801762743,
        700,
    )


# ---------------------------------------------------------------------------
# Associates


def test_associates_of_rationals_one_and_two() -> None:
    values: set[Fraction] = set()
    for p in (Fraction(1), Fraction(2)):
        values.update(associates(p))
    assert values == {Fraction(-1), Fraction(0), Fraction(1, 2), Fraction(1), Fraction(2)}


def test_associates_of_one_is_zero_and_one() -> None:
    assert set(associates(Fraction(1))) == {Fraction(0), Fraction(1)}
    assert set(associates(Fraction(0))) == {Fraction(0), Fraction(1)}


def test_associates_of_single_variable_has_six_distinct_members() -> None:
    got = associates(rf("a"))
    assert len(got) == 6
    expected = ["a", "1 - a", "1/(1 - a)", "a/(a - 1)", "(a - 1)/a", "1/a"]
    for text, actual in zip(expected, got):
        assert ratfunc_eq(actual, rf(text))


def test_associates_of_gaussian_unit() -> None:
    got = associates(gauss_from_text("i"))
    expected = ["i", "1 - i", "(1 + i)/2", "(1 - i)/2", "1 + i", "-i"]
    assert len(got) == 6
    for text, actual in zip(expected, got):
        assert gauss_eq(actual, gauss_from_text(text))


def test_associates_deduplicates_coincident_expressions() -> None:
    # p = 2 collapses to three distinct associates: 2, -1, 1/2.
    assert len(associates(Fraction(2))) == 3


def test_associates_closure_is_idempotent_on_a_sample() -> None:
    first = associates(rf("a"))
    for member in first:
        for again in associates(member):
            assert any(ratfunc_eq(again, m) for m in first)


# ---------------------------------------------------------------------------
# Factoring values over the generators


def test_factor_recovers_plain_generator_powers() -> None:
    s = spec("H3")
    fe = factor_over_generators(s, rf("a^2/(a - 1)"))
    assert fe == FactoredElement(-1, (0, 2, -1, 0))
    assert ratfunc_eq(expand_element(s, fe), rf("a^2/(a - 1)"))


def test_factor_handles_squared_denominators() -> None:
    s = spec("H3")
    fe = factor_over_generators(s, rf("-a/((a - 1)^2)"))
    assert fe == FactoredElement(-1, (0, 1, -2, 0))


def test_factor_rejects_non_units() -> None:
    with pytest.raises(ValueError):
        factor_over_generators(spec("H3"), rf("a + 1"))


def test_factor_of_gaussian_units() -> None:
    s = spec("H2")
    fe = factor_over_generators(s, gauss_from_text("(1 - i)/2"))
    assert fe == FactoredElement(1, (0, -1, 0, 1))
    assert gauss_eq(expand_element(s, fe), gauss_from_text("(1 - i)/2"))
    assert factor_over_generators(s, gauss_from_text("-i")) == FactoredElement(
        -1, (0, 0, 1, 0)
    )


# ---------------------------------------------------------------------------
# Homomorphisms to GF(5)^m


def test_gf5_images_of_single_variable_generators() -> None:
    assert spec("H3").gf5_gen_images == ((4, 4, 4), (2, 3, 4), (4, 3, 2), (3, 2, 3))


def test_gf5_images_of_two_variable_generators() -> None:
    assert spec("H4").gf5_gen_images == (
        (4, 4, 4, 4),
        (2, 3, 3, 4),
        (2, 3, 4, 3),
        (4, 3, 3, 2),
        (4, 3, 2, 3),
        (3, 3, 1, 1),
        (1, 3, 3, 3),
    )


def test_gf5_images_of_three_variable_generators() -> None:
    images = spec("H5").gf5_gen_images
    assert images[0] == (4, 4, 4, 4, 4, 4)
    assert images[1] == (4, 3, 3, 4, 2, 2)
    assert images[-1] == (2, 3, 1, 1, 1, 1)


def test_hom_of_one_is_all_ones() -> None:
    s = spec("H4")
    one = FactoredElement(1, (0,) * 7)
    assert hom_gf5(s, one) == (1, 1, 1, 1)


def test_hom_of_zero_is_all_zeros() -> None:
    s = spec("H4")
    assert hom_gf5(s, FactoredElement(0, (0,) * 7)) == (0, 0, 0, 0)


def test_hom_applies_sign_and_inverse_exponents() -> None:
    s = spec("H2")
    half_one_minus_i = FactoredElement(1, (0, -1, 0, 1))
    assert hom_gf5(s, half_one_minus_i) == (2, 4)


def test_hom_is_multiplicative_on_random_unit_pairs() -> None:
    rng = random.Random(99)
    s = spec("H5")
    n = len(s.generators)
    for _ in range(200):
        e1 = FactoredElement(rng.choice((1, -1)), tuple(rng.randint(-2, 2) for _ in range(n)))
        e2 = FactoredElement(rng.choice((1, -1)), tuple(rng.randint(-2, 2) for _ in range(n)))
        product = FactoredElement(
            e1.sign * e2.sign, tuple(x + y for x, y in zip(e1.exps, e2.exps))
        )
        lhs = tuple(
            x * y % 5 for x, y in zip(hom_gf5(s, e1), hom_gf5(s, e2))
        )
        assert lhs == hom_gf5(s, product)


# ---------------------------------------------------------------------------
# Fundamental tables (dual route)


def test_gaussian_field_table_has_eleven_known_values() -> None:
    table = fundamental_table(spec("H2"))
    expected = {
        "-1", "0", "-i", "i", "1/2", "(1 - i)/2", "(1 + i)/2", "1", "1 - i",
        "1 + i", "2",
    }
    values = {entry.value for entry in table.entries}
    assert len(table.entries) == 11
    assert values == {gauss_from_text(t) for t in expected}


def test_gaussian_table_is_ordered_by_real_then_imaginary_part() -> None:
    table = fundamental_table(spec("H2"))
    assert table.entries[0].value == gauss_from_text("-1")
    assert table.nonzero_one[0].value == gauss_from_text("-1")
    assert table.nonzero_one[1].value == gauss_from_text("-i")


def test_single_variable_table_fingerprints_match_known_residues() -> None:
    table = fundamental_table(spec("H3"))
    assert [e.fingerprint for e in table.entries] == [
        0, 1, 5, 21, 123783, 259942, 259946, 311931, 324922, 324927, 495128,
        568624, 584869, 618910, 680800, 714841, 731086, 804582, 974783,
        974788, 987779, 1039764, 1039768, 1175927, 1299689, 1299705,
    ]


def test_two_variable_table_has_56_elements() -> None:
    table = fundamental_table(spec("H4"))
    assert len(table.entries) == 56
    assert len(table.nonzero_one) == 54


def test_three_variable_table_has_92_elements() -> None:
    table = fundamental_table(spec("H5"))
    assert len(table.entries) == 92
    assert len(table.nonzero_one) == 90


def test_table_gf5_images_are_pairwise_distinct() -> None:
    for name in ("H2", "H3", "H4", "H5"):
        table = fundamental_table(spec(name))
        images = [e.gf5_image for e in table.entries]
        assert len(set(images)) == len(images)


def test_one_minus_every_table_entry_is_fundamental() -> None:
    s = spec("H3")
    one = rf("1")
    for entry in fundamental_table(s).entries:
        complement = ratfunc_arith(one, entry.value, "sub")
        assert is_fundamental_exact(s, complement)


# ---------------------------------------------------------------------------
# Exact membership testing


def test_membership_accepts_unnormalized_forms() -> None:
    s = spec("H3")
    x = ratfunc_arith(rf("-(-1)"), rf("1 - a"), "div")
    assert is_fundamental_exact(s, x)


def test_membership_rejects_non_fundamentals() -> None:
    assert not is_fundamental_exact(spec("H3"), rf("a + 1"))


def test_membership_accepts_zero() -> None:
    assert is_fundamental_exact(spec("H3"), rf("0"))


def test_membership_handles_denominators_that_vanish_modulo_the_prime() -> None:
    s = spec("H3")
    p = s.mod_prime
    assert p is not None
    # x simplifies to a, but its denominator residue is 0 modulo the spec
    # prime, forcing the exact comparison fallback.
    x = rf(f"(a^2 + {p - 5}*a)/(a + {p - 5})")
    assert is_fundamental_exact(s, x)
