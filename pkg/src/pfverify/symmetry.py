"""Automorphism search over the fundamental tables.

A symmetry of a field is determined by where it sends the indeterminates,
so candidates are ordered tuples of distinct nonzero-one fundamentals.
Candidates pass two stages.  The first is a fingerprint walk: from the
candidate's fingerprints, derive a residue for every generator, then map
each fundamental's exponent vector through those residues and require the
result to be a fresh member of the table's fingerprint set, stopping at
the first miss.  A completed walk is a full multiset match, and a random
non-symmetry dies on the first non-constant step (miss probability about
1 - n/p per step).  The second stage is exact: substitute the candidate
images into every seed and test fundamental membership.  Confirmed
symmetries are stored through the factored images of all generators,
which makes applying and composing them integer arithmetic on exponent
vectors.

The Gaussian field has no indeterminates; its two symmetries (identity
and conjugation) are checked by direct value substitution instead.
"""

from __future__ import annotations

from dataclasses import dataclass
from multiprocessing import get_context

from .exact import (
    ModMap,
    RatFunc,
    gauss_conj,
    mod_eval,
    poly_eval_mod,
    poly_subst,
    ratfunc_arith,
)
from .pfield import (
    FactoredElement,
    FundamentalTable,
    PartialFieldSpec,
    TableEntry,
    VerificationError,
    builtin_specs,
    expand_element,
    factor_over_generators,
    fundamental_table,
    hom_gf5,
    is_fundamental_exact,
    parse_field_spec,
)

__all__ = [
    "Automorphism",
    "AutGroup",
    "FactoredElement",
    "apply_automorphism",
    "compose_gen_images",
    "confirm_candidate",
    "find_automorphisms",
    "prefilter_candidate",
]


@dataclass(eq=False)
class Automorphism:
    """One symmetry: where the indeterminates go, the factored images of
    every generator, and the induced GF(5) coordinate permutation.

    The sign generator maps to itself under every symmetry, and its image
    is stored as itself (exponent one on its own slot), so gen_images[j]
    is always unit vector j for the identity."""

    var_images: tuple[TableEntry, ...]
    gen_images: tuple[FactoredElement, ...]
    coord_perm: tuple[int, ...]


@dataclass(eq=False)
class AutGroup:
    """All symmetries of one field, in discovery order."""

    spec: PartialFieldSpec
    table: FundamentalTable
    elements: tuple[Automorphism, ...]
    by_gen_images: dict
    identity_index: int


# ---------------------------------------------------------------------------
# Candidate stages


def _gen_residues(
    spec: PartialFieldSpec, fps: tuple[int, ...], p: int
) -> list[int] | None:
    """Residues of every generator at the candidate image residues, or
    None when one vanishes (the image of a unit never has residue 0)."""
    out = []
    for gen in spec.generators:
        num = poly_eval_mod(gen.num, fps, p)
        if num == 0:
            return None
        den = poly_eval_mod(gen.den, fps, p)
        if den == 0:
            return None
        out.append(num if den == 1 else num * pow(den, -1, p) % p)
    return out


def _walk_order(table: FundamentalTable) -> tuple[tuple[int, tuple[int, ...]], ...]:
    """Nonzero fundamentals as (sign, exps), constants last so the first
    walk step already discriminates."""
    live = [e.element for e in table.entries if e.element.sign != 0]
    live.sort(key=lambda fe: not any(fe.exps))
    return tuple((fe.sign, fe.exps) for fe in live)


def _fingerprint_walk(
    spec: PartialFieldSpec,
    walk: tuple[tuple[int, tuple[int, ...]], ...],
    fp_set: frozenset[int],
    fps: tuple[int, ...],
    p: int,
) -> bool:
    """True when every fundamental's image fingerprint is a fresh member
    of the fingerprint set; a completed walk is a full multiset match."""
    residues = _gen_residues(spec, fps, p)
    if residues is None:
        return False
    seen = set()
    for sign, exps in walk:
        total = 1 if sign > 0 else p - 1
        for r, e in zip(residues, exps):
            if e:
                total = total * pow(r, e, p) % p
        if total not in fp_set or total in seen:
            return False
        seen.add(total)
    return True


def prefilter_candidate(
    spec: PartialFieldSpec, table: FundamentalTable, fps: tuple[int, ...]
) -> bool:
    """Multiset test: images of the nonzero fundamentals, fingerprinted at
    the candidate residues, must reproduce the table's fingerprints."""
    assert table.mod_map is not None
    p = table.mod_map.prime
    residues = _gen_residues(spec, fps, p)
    if residues is None:
        return False
    derived_map = ModMap(p, tuple(residues))
    derived = sorted(
        mod_eval(derived_map, e.element.sign, e.element.exps)
        for e in table.entries
        if e.element.sign != 0
    )
    expected = sorted(
        e.fingerprint for e in table.entries if e.element.sign != 0
    )
    return derived == expected


def _substitute(x: RatFunc, images: list[RatFunc]) -> RatFunc:
    num = poly_subst(x.num, images)
    den = poly_subst(x.den, images)
    return ratfunc_arith(num, den, "div")


def confirm_candidate(
    spec: PartialFieldSpec, table: FundamentalTable, entries: tuple[TableEntry, ...]
) -> bool:
    """Exact confirmation: every seed, with the indeterminates replaced by
    the candidate images, must land on a fundamental element."""
    images = [e.value for e in entries]
    for seed in spec.seeds:
        try:
            value = _substitute(seed, images)
        except ValueError:
            return False
        if not is_fundamental_exact(spec, value):
            return False
    return True


# ---------------------------------------------------------------------------
# Assembling confirmed symmetries


def _base_columns(spec: PartialFieldSpec) -> list[tuple[int, ...]]:
    width = spec.gf5_width
    cols = [
        tuple(row[k] for row in spec.gf5_gen_images) for k in range(width)
    ]
    if len(set(cols)) != width:
        raise VerificationError(
            f"{spec.name}: generator image columns are not pairwise distinct"
        )
    return cols


def _induced_perm(
    spec: PartialFieldSpec, gen_images: tuple[FactoredElement, ...]
) -> tuple[int, ...]:
    """The unique coordinate permutation matching the generator images'
    GF(5) columns to the base columns."""
    base = _base_columns(spec)
    rows = [hom_gf5(spec, fe) for fe in gen_images]
    perm = []
    for k in range(spec.gf5_width):
        col = tuple(row[k] for row in rows)
        if col not in base:
            raise VerificationError(
                f"{spec.name}: no coordinate permutation matches column {k}"
            )
        perm.append(base.index(col))
    if len(set(perm)) != spec.gf5_width:
        raise VerificationError(f"{spec.name}: induced map is not a permutation")
    return tuple(perm)


def apply_automorphism(aut: Automorphism, fe: FactoredElement) -> FactoredElement:
    """Image of a factored element, by exponent arithmetic.

    Exact when the generators are multiplicatively independent; the
    Gaussian generators are not, so Gaussian images need recanonicalizing
    through their exact value afterwards."""
    if fe.sign == 0:
        return fe
    sign = fe.sign
    exps = [0] * len(fe.exps)
    for e, gfe in zip(fe.exps, aut.gen_images):
        if not e:
            continue
        if e % 2 and gfe.sign < 0:
            sign = -sign
        for j, x in enumerate(gfe.exps):
            if x:
                exps[j] += e * x
    return FactoredElement(sign, tuple(exps))


def _canonical_image(
    spec: PartialFieldSpec, aut: Automorphism, fe: FactoredElement
) -> FactoredElement:
    img = apply_automorphism(aut, fe)
    if spec.is_gauss and img.sign != 0:
        return factor_over_generators(spec, expand_element(spec, img))
    return img


def _verify_table_permutation(table: FundamentalTable, aut: Automorphism) -> None:
    images = {
        _canonical_image(table.spec, aut, e.element) for e in table.entries
    }
    if images != set(table.by_element):
        raise VerificationError(
            f"{table.spec.name}: confirmed symmetry does not permute the table"
        )


def _sign_gen_image(spec: PartialFieldSpec) -> FactoredElement:
    n = len(spec.generators)
    return FactoredElement(1, tuple(int(j == 0) for j in range(n)))


def _assemble(
    spec: PartialFieldSpec,
    table: FundamentalTable,
    image_entries: tuple[TableEntry, ...],
) -> Automorphism:
    images = [e.value for e in image_entries]
    gen_fes = [_sign_gen_image(spec)]
    for gen in spec.generators[1:]:
        value = _substitute(gen, images)
        gen_fes.append(factor_over_generators(spec, value))
    aut = Automorphism(
        var_images=image_entries,
        gen_images=tuple(gen_fes),
        coord_perm=_induced_perm(spec, tuple(gen_fes)),
    )
    _verify_table_permutation(table, aut)
    return aut


def compose_gen_images(
    group: AutGroup, outer: Automorphism, inner: Automorphism
) -> tuple[FactoredElement, ...]:
    """Generator images of outer . inner (apply inner first).

    The sign generator's image stays the unit-vector convention value, so
    only the other slots need Gaussian recanonicalizing."""
    out = [apply_automorphism(outer, inner.gen_images[0])]
    for fe in inner.gen_images[1:]:
        out.append(_canonical_image(group.spec, outer, fe))
    return tuple(out)


# ---------------------------------------------------------------------------
# Search


def _scan_chunk(text: str, first_index: int) -> list[tuple[int, ...]]:
    """Fingerprint-walk all candidate tuples starting with one image."""
    spec = parse_field_spec(text)
    table = fundamental_table(spec)
    assert table.mod_map is not None
    p = table.mod_map.prime
    walk = _walk_order(table)
    fp_set = frozenset(
        e.fingerprint for e in table.entries if e.element.sign != 0
    )
    entries = table.nonzero_one
    n = len(entries)
    others = [i for i in range(n) if i != first_index]
    tuples: list[tuple[int, ...]] = [(first_index,)]
    for _ in range(spec.arity - 1):
        tuples = [t + (i,) for t in tuples for i in others if i not in t]
    passed = []
    for t in tuples:
        fps = tuple(entries[i].fingerprint for i in t)
        if _fingerprint_walk(spec, walk, fp_set, fps, p):
            passed.append(t)
    return passed


def _scan_worker(args: tuple[str, int]) -> list[tuple[int, ...]]:
    return _scan_chunk(*args)


def _find_gauss_automorphisms(spec: PartialFieldSpec) -> AutGroup:
    table = fundamental_table(spec)
    values = set(table.by_fingerprint)
    elements = []
    for mapper in (lambda v: v, gauss_conj):
        if {mapper(v) for v in values} != values:
            continue
        gen_fes = (_sign_gen_image(spec),) + tuple(
            factor_over_generators(spec, mapper(g)) for g in spec.generators[1:]
        )
        aut = Automorphism(
            var_images=(),
            gen_images=gen_fes,
            coord_perm=_induced_perm(spec, gen_fes),
        )
        _verify_table_permutation(table, aut)
        elements.append(aut)
    return _finish_group(spec, table, elements)


def _finish_group(
    spec: PartialFieldSpec, table: FundamentalTable, elements: list[Automorphism]
) -> AutGroup:
    by_gen_images = {aut.gen_images: i for i, aut in enumerate(elements)}
    if len(by_gen_images) != len(elements):
        raise VerificationError(f"{spec.name}: duplicate symmetries found")
    n = len(spec.generators)
    identity = tuple(
        FactoredElement(1, tuple(int(i == j) for j in range(n))) for i in range(n)
    )
    if identity not in by_gen_images:
        raise VerificationError(f"{spec.name}: identity symmetry missing")
    return AutGroup(
        spec=spec,
        table=table,
        elements=tuple(elements),
        by_gen_images=by_gen_images,
        identity_index=by_gen_images[identity],
    )


_group_cache: dict[str, AutGroup] = {}


def find_automorphisms(spec: PartialFieldSpec, workers: int = 1) -> AutGroup:
    """All symmetries of the field, via pretest, prefilter, and exact
    confirmation.  `workers` parallelizes the pretest scan."""
    key = spec.source_hash
    if key in _group_cache:
        return _group_cache[key]
    if spec.is_gauss:
        group = _find_gauss_automorphisms(spec)
        _group_cache[key] = group
        return group

    table = fundamental_table(spec)
    entries = table.nonzero_one
    n = len(entries)
    if workers > 1 and spec.arity >= 2:
        ctx = get_context("fork")
        with ctx.Pool(workers) as pool:
            chunks = pool.map(
                _scan_worker,
                [(spec.source_text, i) for i in range(n)],
            )
    else:
        chunks = [_scan_chunk(spec.source_text, i) for i in range(n)]

    elements = []
    for t in (t for chunk in chunks for t in chunk):
        image_entries = tuple(entries[i] for i in t)
        if not confirm_candidate(spec, table, image_entries):
            continue
        elements.append(_assemble(spec, table, image_entries))
    group = _finish_group(spec, table, elements)
    _group_cache[key] = group
    return group
