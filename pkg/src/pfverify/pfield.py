"""Partial-field descriptions and fundamental-element machinery.

A field description lists multiplicative generators (always including -1),
seed elements, images of the generators in GF(5)^m, and the data a modular
fingerprint needs (a prime and residues for the indeterminates).  From that
this module derives the full table of fundamental elements: the closure of
the seeds under the associate operation, cross-checked against an
independently computed exponent-box sieve, with every table entry carrying
its factored form, exact value, fingerprint, and GF(5)^m image.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

from .exact import (
    Expr,
    GaussDyadic,
    GAUSS_ONE,
    GAUSS_ZERO,
    ModMap,
    Poly,
    RatFunc,
    expr_eval_mod,
    expr_to_gauss,
    expr_to_ratfunc,
    gauss_div,
    gauss_eq,
    gauss_is_one,
    gauss_is_unit,
    gauss_is_zero,
    gauss_lognorm,
    gauss_mul,
    gauss_neg,
    gauss_re_im,
    gauss_sub,
    grlex_key,
    make_const,
    mod_eval,
    parse_expr,
    poly_arith,
    poly_arity,
    poly_eval_mod,
    poly_pow,
    ratfunc_arith,
    ratfunc_const,
    ratfunc_eq,
    ratfunc_is_one,
    ratfunc_is_zero,
)


class VerificationError(Exception):
    """A cross-check between two independent computation routes failed."""


class FactoredElement(NamedTuple):
    """A field element written as sign * prod(generators[i] ** exps[i]).

    sign 0 encodes the zero element; its exponent vector is all zeros.
    """

    sign: int
    exps: tuple[int, ...]


@dataclass(frozen=True, eq=False)
class PartialFieldSpec:
    """Parsed description of one partial field."""

    name: str
    report_index: int
    var_names: tuple[str, ...]
    generator_exprs: tuple[str, ...]
    generator_asts: tuple[Expr, ...]
    generators: tuple[RatFunc | GaussDyadic, ...]
    seed_exprs: tuple[str, ...]
    seeds: tuple[RatFunc | GaussDyadic, ...]
    gf5_width: int
    gf5_var_images: tuple[tuple[int, ...], ...]
    gf5_gen_images: tuple[tuple[int, ...], ...]
    h2_hom_exprs: tuple[tuple[str, ...], ...]
    h2_hom_images: tuple[tuple[GaussDyadic, ...], ...]
    mod_prime: int | None
    mod_var_residues: tuple[int, ...]
    extra_bounds: tuple[tuple[int, int, int], ...]
    include_zero_candidate: bool
    source_text: str

    @property
    def arity(self) -> int:
        return len(self.var_names)

    @property
    def is_gauss(self) -> bool:
        return self.arity == 0

    @property
    def source_hash(self) -> str:
        return hashlib.sha256(self.source_text.encode()).hexdigest()

    def mod_map(self, prime: int | None = None) -> ModMap | None:
        """Modular fingerprint map at the spec prime or an override."""
        if self.is_gauss:
            return None
        p = self.mod_prime if prime is None else prime
        if p is None:
            raise ValueError(f"{self.name}: no fingerprint prime configured")
        env = dict(zip(self.var_names, self.mod_var_residues))
        residues = tuple(expr_eval_mod(ast, env, p) for ast in self.generator_asts)
        return ModMap(p, residues)


def parse_field_spec(text: str) -> PartialFieldSpec:
    """Parse the line-oriented field description format."""
    name = ""
    report_index = 0
    var_names: list[str] = []
    gen_exprs: list[str] = []
    seed_exprs: list[str] = []
    gf5_var_images: dict[str, tuple[int, ...]] = {}
    gf5_gen_rows: list[tuple[int, ...]] = []
    hom_rows: list[tuple[str, ...]] = []
    prime: int | None = None
    var_residues: dict[str, int] = {}
    extra_bounds: list[tuple[int, int, int]] = []
    include_zero = False

    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        keyword, _, rest = line.partition(" ")
        rest = rest.strip()
        if keyword == "field":
            name = rest
        elif keyword == "k":
            report_index = int(rest)
        elif keyword == "vars":
            var_names = rest.split()
        elif keyword == "gen":
            gen_exprs.append(rest)
        elif keyword == "seed":
            seed_exprs.append(rest)
        elif keyword == "gf5map":
            var, *coords = rest.split()
            gf5_var_images[var] = tuple(int(c) for c in coords)
        elif keyword == "gf5gen":
            gf5_gen_rows.append(tuple(int(c) for c in rest.split()))
        elif keyword == "h2hom":
            hom_rows.append(tuple(part.strip() for part in rest.split(",")))
        elif keyword == "prime":
            prime = int(rest)
        elif keyword == "modvar":
            var, value = rest.split()
            var_residues[var] = int(value)
        elif keyword == "extrabound":
            slot, lo, hi = rest.split()
            extra_bounds.append((int(slot), int(lo), int(hi)))
        elif keyword == "candidates-include-zero":
            include_zero = True
        else:
            raise ValueError(f"unknown directive: {keyword!r}")

    if not name or not report_index:
        raise ValueError("field description needs 'field' and 'k' lines")
    if not gen_exprs or not seed_exprs:
        raise ValueError("field description needs generators and seeds")

    arity = len(var_names)
    gen_asts = tuple(parse_expr(e) for e in gen_exprs)

    if arity == 0:
        generators: tuple = tuple(expr_to_gauss(a) for a in gen_asts)
        seeds: tuple = tuple(expr_to_gauss(parse_expr(e)) for e in seed_exprs)
        if not gauss_eq(generators[0], gauss_neg(GAUSS_ONE)):
            raise ValueError("the first generator must be -1")
        if len(gf5_gen_rows) != len(gen_exprs):
            raise ValueError("need one gf5gen row per generator")
        widths = {len(r) for r in gf5_gen_rows}
        if len(widths) != 1:
            raise ValueError("gf5gen rows must share one width")
        width = widths.pop()
        gen_images = tuple(gf5_gen_rows)
        var_images: tuple[tuple[int, ...], ...] = ()
        hom_images: tuple[tuple[GaussDyadic, ...], ...] = ()
        residues: tuple[int, ...] = ()
        if hom_rows or prime is not None or var_residues:
            raise ValueError("h2hom/prime/modvar lines need indeterminates")
    else:
        vt = tuple(var_names)
        generators = tuple(expr_to_ratfunc(a, vt) for a in gen_asts)
        seeds = tuple(expr_to_ratfunc(parse_expr(e), vt) for e in seed_exprs)
        if not ratfunc_eq(generators[0], ratfunc_const(arity, -1)):
            raise ValueError("the first generator must be -1")
        if set(gf5_var_images) != set(var_names):
            raise ValueError("need one gf5map row per indeterminate")
        widths = {len(v) for v in gf5_var_images.values()}
        if len(widths) != 1:
            raise ValueError("gf5map rows must share one width")
        width = widths.pop()
        var_images = tuple(gf5_var_images[v] for v in var_names)
        gen_images = tuple(
            tuple(
                expr_eval_mod(
                    ast, {v: var_images[i][j] for i, v in enumerate(var_names)}, 5
                )
                for j in range(width)
            )
            for ast in gen_asts
        )
        for expr, row in zip(gen_exprs, gen_images):
            if 0 in row:
                raise ValueError(f"generator {expr!r} maps to 0 in GF(5)")
        for row in hom_rows:
            if len(row) != arity:
                raise ValueError("h2hom rows must give one value per indeterminate")
        hom_images = tuple(
            tuple(expr_to_gauss(parse_expr(e)) for e in row) for row in hom_rows
        )
        if prime is None:
            raise ValueError("fields with indeterminates need a fingerprint prime")
        if set(var_residues) != set(var_names):
            raise ValueError("need one modvar row per indeterminate")
        residues = tuple(var_residues[v] for v in var_names)

    for slot, lo, hi in extra_bounds:
        if not 1 <= slot < len(gen_exprs) or lo > hi:
            raise ValueError(f"bad extrabound line: {slot} {lo} {hi}")

    return PartialFieldSpec(
        name=name,
        report_index=report_index,
        var_names=tuple(var_names),
        generator_exprs=tuple(gen_exprs),
        generator_asts=gen_asts,
        generators=generators,
        seed_exprs=tuple(seed_exprs),
        seeds=seeds,
        gf5_width=width,
        gf5_var_images=var_images,
        gf5_gen_images=gen_images,
        h2_hom_exprs=tuple(hom_rows),
        h2_hom_images=hom_images,
        mod_prime=prime,
        mod_var_residues=residues,
        extra_bounds=tuple(extra_bounds),
        include_zero_candidate=include_zero,
        source_text=text,
    )


H2_SPEC_TEXT = """\
field H2
k 2
gen -1
gen 2
gen i
gen 1 - i
seed 0
seed 1
seed 2
seed i
gf5gen 4 4
gf5gen 2 2
gf5gen 2 3
gf5gen 4 3
"""

H3_SPEC_TEXT = """\
field H3
k 3
vars a
gen -1
gen a
gen 1 - a
gen a^2 - a + 1
seed 1
seed a
seed a^2 - a + 1
seed a^2/(a - 1)
seed -a/((a - 1)^2)
gf5map a 2 3 4
prime 1299709
modvar a 5
h2hom i
h2hom 1 - i
h2hom (1 - i)/2
candidates-include-zero
"""

H4_SPEC_TEXT = """\
field H4
k 4
vars a b
gen -1
gen a
gen b
gen 1 - a
gen 1 - b
gen a*b - 1
gen a + b - 2*a*b
seed 1
seed a
seed b
seed a*b
seed (a - 1)/(a*b - 1)
seed (b - 1)/(a*b - 1)
seed -a*(b - 1)/(b*(a - 1))
seed (a - 1)*(b - 1)/(1 - a*b)
seed a*(b - 1)^2/(b*(a*b - 1))
seed b*(a - 1)^2/(a*(a*b - 1))
gf5map a 2 3 3 4
gf5map b 2 3 4 3
prime 179424673
modvar a 11
modvar b 19
h2hom -i, -i
h2hom -i, i*(1 - i)/2
h2hom (1 - i)/2, i
h2hom i*(1 - i)/2, -i
h2hom 1 - i, i*(1 - i)
h2hom 1 - i, 1/2
h2hom i*(1 - i), 1 - i
h2hom i*(1 - i), 1/2
h2hom i, (1 - i)/2
h2hom i, i
h2hom 1/2, 1 - i
h2hom 1/2, i*(1 - i)
extrabound 1 -1 1
extrabound 2 -1 1
extrabound 5 -1 1
"""

H5_SPEC_TEXT = """\
field H5
k 5
vars a b c
gen -1
gen a
gen b
gen c
gen 1 - a
gen 1 - b
gen 1 - c
gen a - c
gen c - a*b
gen (1 - c) - (1 - a)*b
seed 1
seed a
seed b
seed c
seed a*b/c
seed a/c
seed (1 - a)*c/(c - a)
seed (a - 1)*b/(c - 1)
seed (a - 1)/(c - 1)
seed (c - a)/(c - a*b)
seed (b - 1)*(c - 1)/(b*(c - a))
seed b*(c - a)/(c - a*b)
seed (a - 1)*(b - 1)/(c - a)
seed b*(c - a)/((1 - c)*(c - a*b))
seed (1 - a)*(c - a*b)/(c - a)
seed (1 - b)/(c - a*b)
gf5map a 4 3 3 4 2 2
gf5map b 3 2 2 4 3 4
gf5map c 3 2 4 2 3 4
prime 22801763489
modvar a 17
modvar b 47
modvar c 53
h2hom -1, 1 - i, i
h2hom -1, 1 + i, -i
h2hom -i, (1 - i)/2, -1
h2hom -i, (1 - i)/2, (1 - i)/2
h2hom -i, i, 1 - i
h2hom -i, i, i
h2hom (1 - i)/2, -1, (1 + i)/2
h2hom (1 - i)/2, 1 - i, 1 - i
h2hom (1 - i)/2, 1 + i, -i
h2hom (1 - i)/2, 1/2, 1/2
h2hom (1 + i)/2, -1, (1 - i)/2
h2hom (1 + i)/2, 1 - i, i
h2hom (1 + i)/2, 1 + i, 1 + i
h2hom (1 + i)/2, 1/2, 1/2
h2hom 1 - i, -i, -i
h2hom 1 - i, -i, 1 + i
h2hom 1 - i, (1 + i)/2, (1 - i)/2
h2hom 1 - i, (1 + i)/2, 2
h2hom 1 + i, (1 - i)/2, (1 + i)/2
h2hom 1 + i, (1 - i)/2, 2
h2hom 1 + i, i, 1 - i
h2hom 1 + i, i, i
h2hom i, -i, -i
h2hom i, -i, 1 + i
h2hom i, (1 + i)/2, -1
h2hom i, (1 + i)/2, (1 + i)/2
h2hom 1/2, 2, (1 - i)/2
h2hom 1/2, 2, (1 + i)/2
h2hom 2, 1 - i, 1 - i
h2hom 2, 1 + i, 1 + i
"""

_BUILTIN_TEXTS = {
    "H2": H2_SPEC_TEXT,
    "H3": H3_SPEC_TEXT,
    "H4": H4_SPEC_TEXT,
    "H5": H5_SPEC_TEXT,
}

_builtin_cache: dict[str, PartialFieldSpec] = {}


def builtin_specs() -> dict[str, PartialFieldSpec]:
    """The four built-in field descriptions, parsed once."""
    if not _builtin_cache:
        for name, text in _BUILTIN_TEXTS.items():
            _builtin_cache[name] = parse_field_spec(text)
    return dict(_builtin_cache)


# ---------------------------------------------------------------------------
# Associates


def _associates_fraction(p: Fraction) -> list[Fraction]:
    if p == 0 or p == 1:
        return [Fraction(0), Fraction(1)]
    out: list[Fraction] = []
    for q in (p, 1 - p, 1 / (1 - p), p / (p - 1), (p - 1) / p, 1 / p):
        if q not in out:
            out.append(q)
    return out


def _associates_gauss(p: GaussDyadic) -> list[GaussDyadic]:
    if gauss_is_zero(p) or gauss_is_one(p):
        return [GAUSS_ZERO, GAUSS_ONE]
    q = gauss_sub(GAUSS_ONE, p)
    candidates = (
        p,
        q,
        gauss_div(GAUSS_ONE, q),
        gauss_div(p, gauss_neg(q)),
        gauss_div(gauss_neg(q), p),
        gauss_div(GAUSS_ONE, p),
    )
    out: list[GaussDyadic] = []
    for c in candidates:
        if c not in out:
            out.append(c)
    return out


def _associates_ratfunc(p: RatFunc) -> list[RatFunc]:
    arity = poly_arity(p.den)
    assert arity is not None
    if ratfunc_is_zero(p) or ratfunc_is_one(p):
        return [ratfunc_const(arity, 0), ratfunc_const(arity, 1)]
    one = ratfunc_const(arity, 1)
    q = ratfunc_arith(one, p, "sub")
    p_minus_one = ratfunc_arith(p, one, "sub")
    candidates = (
        p,
        q,
        ratfunc_arith(one, q, "div"),
        ratfunc_arith(p, p_minus_one, "div"),
        ratfunc_arith(p_minus_one, p, "div"),
        ratfunc_arith(one, p, "div"),
    )
    out: list[RatFunc] = []
    for c in candidates:
        if not any(ratfunc_eq(c, seen) for seen in out):
            out.append(c)
    return out


def associates(p: Fraction | int | GaussDyadic | RatFunc):
    """The associate set of p: {p, 1-p, 1/(1-p), p/(p-1), (p-1)/p, 1/p}.

    0 and 1 are each other's only associates.  Coincident members are
    deduplicated, preserving first appearance.
    """
    if isinstance(p, GaussDyadic):
        return _associates_gauss(p)
    if isinstance(p, RatFunc):
        return _associates_ratfunc(p)
    return _associates_fraction(Fraction(p))


# ---------------------------------------------------------------------------
# Factoring values over the generators


def poly_divexact(a: Poly, g: Poly) -> Poly | None:
    """Quotient a/g when g divides a exactly over the integers, else None."""
    if not a:
        return {}
    g_lead = max(g, key=grlex_key)
    g_lc = g[g_lead]
    rem = dict(a)
    quot: Poly = {}
    while rem:
        lead = max(rem, key=grlex_key)
        lc = rem[lead]
        mono = tuple(x - y for x, y in zip(lead, g_lead))
        if any(m < 0 for m in mono) or lc % g_lc:
            return None
        c = lc // g_lc
        quot[mono] = c
        for e, gc in g.items():
            key = tuple(x + y for x, y in zip(mono, e))
            nv = rem.get(key, 0) - c * gc
            if nv:
                rem[key] = nv
            else:
                rem.pop(key, None)
    return quot


def _strip_generator(poly: Poly, gen: Poly) -> tuple[Poly, int]:
    count = 0
    while True:
        q = poly_divexact(poly, gen)
        if q is None:
            return poly, count
        poly = q
        count += 1


_GAUSS_UNIT_PHASES = {
    (1, 0): (1, 0),
    (0, 1): (1, 1),
    (-1, 0): (-1, 0),
    (0, -1): (-1, 1),
}


def _factor_gauss(spec: PartialFieldSpec, x: GaussDyadic) -> FactoredElement:
    n = len(spec.generators)
    if gauss_is_zero(x):
        return FactoredElement(0, (0,) * n)
    if not gauss_is_unit(x):
        raise ValueError(f"not expressible as a unit: {x}")
    lognorm = gauss_lognorm(x)
    v = 1 if lognorm.denominator == 2 else 0
    y = int(lognorm - Fraction(v, 2))
    base = GAUSS_ONE
    for gen, e in zip(spec.generators[1:], (y, 0, v)):
        for _ in range(abs(e)):
            base = gauss_mul(base, gen) if e > 0 else gauss_div(base, gen)
    phase = gauss_div(x, base)
    if phase.two_exp != 0 or (phase.re_num, phase.im_num) not in _GAUSS_UNIT_PHASES:
        raise ValueError(f"not expressible as a unit: {x}")
    sign, z = _GAUSS_UNIT_PHASES[(phase.re_num, phase.im_num)]
    return FactoredElement(sign, (0, y, z, v))


def factor_over_generators(
    spec: PartialFieldSpec, x: RatFunc | GaussDyadic
) -> FactoredElement:
    """Write x as sign * prod(generators**exps), or raise ValueError."""
    if isinstance(x, GaussDyadic):
        return _factor_gauss(spec, x)
    n = len(spec.generators)
    num: Poly = dict(x.num)
    den: Poly = dict(x.den)
    if not num:
        return FactoredElement(0, (0,) * n)
    exps = [0] * n
    for i, gen in enumerate(spec.generators[1:], start=1):
        num, up = _strip_generator(num, gen.num)
        den, down = _strip_generator(den, gen.num)
        exps[i] = up - down
    if len(num) != 1 or len(den) != 1:
        raise ValueError("not expressible as a unit over the generators")
    (num_mono, cn), = num.items()
    (den_mono, cd), = den.items()
    if any(num_mono) or any(den_mono) or abs(cn) != abs(cd):
        raise ValueError("not expressible as a unit over the generators")
    sign = 1 if (cn > 0) == (cd > 0) else -1
    return FactoredElement(sign, tuple(exps))


def _gauss_pow(base: GaussDyadic, e: int) -> GaussDyadic:
    acc = GAUSS_ONE
    for _ in range(abs(e)):
        acc = gauss_mul(acc, base) if e > 0 else gauss_div(acc, base)
    return acc


def expand_element(
    spec: PartialFieldSpec, fe: FactoredElement
) -> RatFunc | GaussDyadic:
    """Exact value of a factored element."""
    if spec.is_gauss:
        if fe.sign == 0:
            return GAUSS_ZERO
        acc = GAUSS_ONE if fe.sign > 0 else gauss_neg(GAUSS_ONE)
        for gen, e in zip(spec.generators, fe.exps):
            if e:
                acc = gauss_mul(acc, _gauss_pow(gen, e))
        return acc
    arity = spec.arity
    if fe.sign == 0:
        return ratfunc_const(arity, 0)
    num = make_const(arity, fe.sign)
    den = make_const(arity, 1)
    for gen, e in zip(spec.generators, fe.exps):
        if e > 0:
            num = poly_arith(num, poly_pow(gen.num, e), "mul")
            den = poly_arith(den, poly_pow(gen.den, e), "mul")
        elif e < 0:
            num = poly_arith(num, poly_pow(gen.den, -e), "mul")
            den = poly_arith(den, poly_pow(gen.num, -e), "mul")
    return RatFunc(num, den)


# ---------------------------------------------------------------------------
# Homomorphism to GF(5)^m


def hom_gf5(spec: PartialFieldSpec, fe: FactoredElement) -> tuple[int, ...]:
    """Image of a factored element in GF(5)^m, coordinatewise."""
    width = spec.gf5_width
    if fe.sign == 0:
        return (0,) * width
    acc = list(spec.gf5_gen_images[0]) if fe.sign < 0 else [1] * width
    for img, e in zip(spec.gf5_gen_images, fe.exps):
        if e % 4:
            k = e % 4
            acc = [x * pow(g, k, 5) % 5 for x, g in zip(acc, img)]
    return tuple(acc)


def gf5_image_of_value(spec: PartialFieldSpec, x: RatFunc) -> tuple[int, ...] | None:
    """GF(5)^m image of an exact value, or None if a denominator vanishes."""
    out = []
    for j in range(spec.gf5_width):
        coords = tuple(images[j] for images in spec.gf5_var_images)
        d = poly_eval_mod(x.den, coords, 5)
        if d == 0:
            return None
        n = poly_eval_mod(x.num, coords, 5)
        out.append(n * pow(d, 3, 5) % 5)
    return tuple(out)


# ---------------------------------------------------------------------------
# Fundamental tables


@dataclass(eq=False)
class TableEntry:
    """One fundamental element with all its derived forms."""

    element: FactoredElement
    value: RatFunc | GaussDyadic
    fingerprint: int | GaussDyadic
    gf5_image: tuple[int, ...]


@dataclass(eq=False)
class FundamentalTable:
    """All fundamental elements of one field, ascending by fingerprint."""

    spec: PartialFieldSpec
    mod_map: ModMap | None
    entries: tuple[TableEntry, ...]
    by_fingerprint: dict
    by_element: dict
    by_gf5: dict
    nonzero_one: tuple[TableEntry, ...]


def fingerprint_sort_key(fp: int | GaussDyadic):
    if isinstance(fp, GaussDyadic):
        return gauss_re_im(fp)
    return fp


def element_fingerprint(
    spec: PartialFieldSpec,
    mm: ModMap | None,
    fe: FactoredElement,
    value: RatFunc | GaussDyadic,
) -> int | GaussDyadic:
    """Fingerprint: the exact value itself for the Gaussian field, else the
    residue of the factored form under the modular map."""
    if spec.is_gauss:
        return value
    assert mm is not None
    return mod_eval(mm, fe.sign, fe.exps)


def _closure_of_seeds(spec: PartialFieldSpec) -> list[RatFunc | GaussDyadic]:
    """Distinct values reachable from the seeds by taking associates."""
    if spec.is_gauss:
        values: list = []
        seen: set[GaussDyadic] = set()
        queue = list(spec.seeds)
        while queue:
            v = queue.pop()
            if v in seen:
                continue
            seen.add(v)
            values.append(v)
            queue.extend(associates(v))
        return values

    mm = spec.mod_map()
    assert mm is not None
    residues = spec.mod_var_residues
    p = mm.prime
    values = []
    buckets: dict[int | None, list[int]] = {}
    queue = list(spec.seeds)
    while queue:
        v = queue.pop()
        d = poly_eval_mod(v.den, residues, p)
        if d == 0:
            key: int | None = None
            probe: list[int] = list(range(len(values)))
        else:
            n = poly_eval_mod(v.num, residues, p)
            key = n * pow(d, p - 2, p) % p
            probe = buckets.get(key, []) + buckets.get(None, [])
        if any(ratfunc_eq(values[i], v) for i in probe):
            continue
        buckets.setdefault(key, []).append(len(values))
        values.append(v)
        queue.extend(associates(v))
    return values


def build_fundamental_table(spec: PartialFieldSpec) -> FundamentalTable:
    """Construct the fundamental table by two routes and cross-check them.

    Route one closes the seeds under associates and factors every value over
    the generators.  Route two enumerates the exponent box and sieves by
    fingerprint.  The routes must agree elementwise.
    """
    from . import sieve

    closure = _closure_of_seeds(spec)
    elements = [(factor_over_generators(spec, v), v) for v in closure]

    box = sieve.candidate_box(spec)
    candidates = sieve.enumerate_candidates(box)
    result = sieve.fingerprint_sieve(spec, candidates)
    sieve.verify_survivors(spec, result, elements)

    mm = result.mod_map
    entries = []
    for fe, value in elements:
        fp = element_fingerprint(spec, mm, fe, value)
        entries.append(TableEntry(fe, value, fp, hom_gf5(spec, fe)))
    entries.sort(key=lambda e: fingerprint_sort_key(e.fingerprint))

    by_fingerprint = {e.fingerprint: e for e in entries}
    by_element = {e.element: e for e in entries}
    by_gf5 = {e.gf5_image: e for e in entries}
    for mapping, what in (
        (by_fingerprint, "fingerprints"),
        (by_element, "factored forms"),
        (by_gf5, "GF(5) images"),
    ):
        if len(mapping) != len(entries):
            raise VerificationError(f"{spec.name}: {what} are not pairwise distinct")
    one = FactoredElement(1, (0,) * len(spec.generators))
    nonzero_one = tuple(
        e for e in entries if e.element.sign != 0 and e.element != one
    )
    return FundamentalTable(
        spec=spec,
        mod_map=mm,
        entries=tuple(entries),
        by_fingerprint=by_fingerprint,
        by_element=by_element,
        by_gf5=by_gf5,
        nonzero_one=nonzero_one,
    )


_table_cache: dict[str, FundamentalTable] = {}


def fundamental_table(spec: PartialFieldSpec) -> FundamentalTable:
    """Cached fundamental table for a spec."""
    key = spec.source_hash
    if key not in _table_cache:
        _table_cache[key] = build_fundamental_table(spec)
    return _table_cache[key]


def is_fundamental_exact(
    spec: PartialFieldSpec, x: RatFunc | GaussDyadic
) -> bool:
    """Exact membership test against the fundamental table."""
    table = fundamental_table(spec)
    if isinstance(x, GaussDyadic):
        return x in table.by_fingerprint
    if ratfunc_is_zero(x):
        return True
    mm = table.mod_map
    assert mm is not None
    d = poly_eval_mod(x.den, spec.mod_var_residues, mm.prime)
    if d == 0:
        return any(
            not isinstance(e.value, GaussDyadic) and ratfunc_eq(x, e.value)
            for e in table.entries
        )
    n = poly_eval_mod(x.num, spec.mod_var_residues, mm.prime)
    fp = n * pow(d, mm.prime - 2, mm.prime) % mm.prime
    entry = table.by_fingerprint.get(fp)
    return entry is not None and ratfunc_eq(x, entry.value)
