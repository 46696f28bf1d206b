"""Representation pairs, cross-ratio domains, and lifting checks.

A rank-2 representation of the five-point uniform matroid U_{2,5} is
normalized to a pair (p, q) of distinct nonzero-one fundamentals whose
ratio is again fundamental.  Over GF(5)^m the same data is a pair of
width-m tuples assembled from the six single-coordinate representations.
A lifting function inverts the coordinate homomorphism on the
fundamentals; the local-lift check confirms that every tuple pair lifts
to a field pair whose ratio is fundamental.  The field report bundles
every check for one field into a machine-readable verdict.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations, product

from .exact import gauss_div
from .pfield import (
    FactoredElement,
    PartialFieldSpec,
    TableEntry,
    VerificationError,
    builtin_specs,
    factor_over_generators,
    fundamental_table,
)
from .symmetry import find_automorphisms

__all__ = [
    "LiftingFn",
    "build_domain",
    "build_lifting_fn",
    "check_inequivalence",
    "domain_key",
    "enumerate_u25",
    "gf5_u25_tuples",
    "local_lift_check",
    "theorem1_report",
]

GF5_REPRESENTATIONS = ((2, 3), (2, 4), (3, 2), (3, 4), (4, 2), (4, 3))

GFTuple = tuple[int, ...]


def _ratio_element(
    spec: PartialFieldSpec, p: TableEntry, q: TableEntry
) -> FactoredElement:
    """Canonical factored form of p/q for two nonzero table entries."""
    if spec.is_gauss:
        return factor_over_generators(spec, gauss_div(p.value, q.value))
    pe, qe = p.element, q.element
    exps = tuple(x - y for x, y in zip(pe.exps, qe.exps))
    return FactoredElement(pe.sign * qe.sign, exps)


def enumerate_u25(spec: PartialFieldSpec) -> list[tuple[TableEntry, TableEntry]]:
    """Ordered pairs of distinct nonzero-one fundamentals with fundamental
    ratio."""
    table = fundamental_table(spec)
    pairs = []
    for p in table.nonzero_one:
        for q in table.nonzero_one:
            if p is q:
                continue
            if _ratio_element(spec, p, q) in table.by_element:
                pairs.append((p, q))
    return pairs


def gf5_u25_tuples(width: int) -> list[tuple[GFTuple, GFTuple]]:
    """Width-long ordered selections of the six GF(5) representations,
    transposed into one p-tuple and one q-tuple each."""
    if not 2 <= width <= 5:
        raise ValueError(f"tuple width must be 2..5, not {width}")
    out = []
    for sel in permutations(GF5_REPRESENTATIONS, width):
        p = tuple(r[0] for r in sel)
        q = tuple(r[1] for r in sel)
        out.append((p, q))
    return out


def check_inequivalence(
    tuple_pairs: list[tuple[GFTuple, GFTuple]]
) -> list[tuple[int, int, int]]:
    """(pair index, i, j) for coordinate pairs where both projections
    coincide; empty means all projections are pairwise inequivalent."""
    violations = []
    for idx, (p, q) in enumerate(tuple_pairs):
        for i in range(len(p)):
            for j in range(i + 1, len(p)):
                if p[i] == p[j] and q[i] == q[j]:
                    violations.append((idx, i, j))
    return violations


def build_domain(m: int) -> frozenset[GFTuple]:
    """The width-m cross-ratio domain: the all-0 and all-1 tuples plus
    {2,3,4}^m minus the per-width exclusions."""
    if not 2 <= m <= 5:
        raise ValueError(f"domain width must be 2..5, not {m}")
    members = {(0,) * m, (1,) * m}
    for t in product((2, 3, 4), repeat=m):
        if m == 3 and len(set(t)) == 1:
            continue
        if m >= 4 and any(t.count(c) >= 3 for c in (2, 3, 4)):
            continue
        members.add(t)
    return frozenset(members)


def domain_key(spec: PartialFieldSpec, entry: TableEntry) -> GFTuple:
    """Domain tuple an entry lifts from; the five-variable field lifts
    through the hom with the last coordinate dropped."""
    return entry.gf5_image[: spec.report_index]


@dataclass(eq=False)
class LiftingFn:
    """Bijection from the cross-ratio domain onto the fundamental table."""

    spec: PartialFieldSpec
    width: int
    table: dict

    def entry_for(self, key: GFTuple) -> TableEntry:
        entry = self.table.get(tuple(key))
        if entry is None:
            raise VerificationError(
                f"{self.spec.name}: {tuple(key)} is outside the lifting domain"
            )
        return entry

    def lift(self, key: GFTuple):
        return self.entry_for(key).value


def build_lifting_fn(spec: PartialFieldSpec) -> LiftingFn:
    """Invert the coordinate hom on the fundamentals, verifying that it
    maps them bijectively onto the cross-ratio domain."""
    table = fundamental_table(spec)
    width = spec.report_index
    mapping: dict = {}
    for entry in table.entries:
        key = domain_key(spec, entry)
        if key in mapping:
            raise VerificationError(
                f"{spec.name}: two fundamentals share the domain tuple {key}"
            )
        mapping[key] = entry
    if set(mapping) != build_domain(width):
        raise VerificationError(
            f"{spec.name}: fundamental images differ from the cross-ratio domain"
        )
    return LiftingFn(spec=spec, width=width, table=mapping)


def local_lift_check(
    spec: PartialFieldSpec,
    tuple_pairs: list[tuple[GFTuple, GFTuple]],
    fn: LiftingFn | None = None,
) -> list[tuple[int, GFTuple, GFTuple]]:
    """Lift every tuple pair and report those whose ratio fails to be
    fundamental.  A tuple outside the domain is a usage error, not a lift
    failure, and raises instead."""
    if fn is None:
        fn = build_lifting_fn(spec)
    table = fundamental_table(spec)
    domain = build_domain(fn.width)
    violations = []
    for idx, (p, q) in enumerate(tuple_pairs):
        p, q = tuple(p), tuple(q)
        if p not in domain or q not in domain:
            raise VerificationError(
                f"{spec.name}: pair {idx} leaves the cross-ratio domain"
            )
        ratio = _ratio_element(spec, fn.entry_for(p), fn.entry_for(q))
        if ratio not in table.by_element:
            violations.append((idx, p, q))
    return violations


# ---------------------------------------------------------------------------
# Field reports

EXPECTED_COUNTS = {
    2: (11, 2, 30, 11),
    3: (26, 6, 120, 26),
    4: (56, 24, 360, 56),
    5: (92, 720, 720, 92),
}


class _StageFailure(Exception):
    def __init__(self, stage: str, detail: str) -> None:
        super().__init__(f"{stage}: {detail}")
        self.stage = stage
        self.detail = detail


def _require(ok: bool, stage: str, detail: str) -> None:
    if not ok:
        raise _StageFailure(stage, detail)


def _run_stages(
    spec: PartialFieldSpec, k: int, counts: dict, workers: int
) -> None:
    expect_funs, expect_auts, expect_pairs, expect_domain = EXPECTED_COUNTS[k]

    try:
        table = fundamental_table(spec)
    except (VerificationError, ValueError) as exc:
        raise _StageFailure("fundamentals", str(exc)) from exc
    counts["fundamentals"] = len(table.entries)
    _require(
        len(table.entries) == expect_funs,
        "fundamentals",
        f"expected {expect_funs} fundamentals, found {len(table.entries)}",
    )

    try:
        group = find_automorphisms(spec, workers=workers)
    except (VerificationError, ValueError) as exc:
        raise _StageFailure("automorphisms", str(exc)) from exc
    counts["automorphisms"] = len(group.elements)
    _require(
        len(group.elements) == expect_auts,
        "automorphisms",
        f"expected {expect_auts} symmetries, found {len(group.elements)}",
    )
    perms = {aut.coord_perm for aut in group.elements}
    _require(
        perms == set(permutations(range(spec.gf5_width))),
        "automorphisms",
        "induced permutations do not realize the full symmetric group",
    )

    pairs = enumerate_u25(spec)
    counts["u25_pairs"] = len(pairs)
    _require(
        len(pairs) == expect_pairs,
        "u25_pairs",
        f"expected {expect_pairs} field-side pairs, found {len(pairs)}",
    )
    tuples = gf5_u25_tuples(k)
    _require(
        len(tuples) == expect_pairs,
        "u25_pairs",
        f"expected {expect_pairs} tuple-side pairs, found {len(tuples)}",
    )

    bad = check_inequivalence([(p.gf5_image, q.gf5_image) for p, q in pairs])
    _require(
        not bad,
        "inequivalence",
        f"projections coincide at (pair, i, j) = {bad[0]}" if bad else "",
    )

    domain = build_domain(k)
    counts["domain"] = len(domain)
    _require(
        len(domain) == expect_domain,
        "domain",
        f"expected {expect_domain} domain members, found {len(domain)}",
    )

    try:
        fn = build_lifting_fn(spec)
    except VerificationError as exc:
        raise _StageFailure("lifting", str(exc)) from exc
    for entry in table.entries:
        _require(
            fn.entry_for(domain_key(spec, entry)) is entry,
            "lifting",
            f"round trip fails at {domain_key(spec, entry)}",
        )
    lifted = {
        (fn.entry_for(p).element, fn.entry_for(q).element) for p, q in tuples
    }
    direct = {(p.element, q.element) for p, q in pairs}
    _require(
        lifted == direct,
        "lifting",
        "lifted tuple pairs do not biject with the field-side pairs",
    )

    try:
        bad_lifts = local_lift_check(spec, tuples, fn)
    except VerificationError as exc:
        raise _StageFailure("local_lift", str(exc)) from exc
    _require(
        not bad_lifts,
        "local_lift",
        f"ratio not fundamental at {bad_lifts[0]}" if bad_lifts else "",
    )


def theorem1_report(k: int, spec: PartialFieldSpec | None = None, workers: int = 1) -> dict:
    """Run every verification stage for one field and bundle the verdict.

    Defined for k in 2..5; the k=1 and k=6 cases need no computation and
    are out of scope."""
    if k not in EXPECTED_COUNTS:
        raise ValueError(f"report is defined for k in 2..5, not k={k}")
    if spec is None:
        spec = builtin_specs()[f"H{k}"]
    counts = {"fundamentals": 0, "automorphisms": 0, "u25_pairs": 0, "domain": 0}
    violations: list[dict] = []
    try:
        _run_stages(spec, k, counts, workers)
    except _StageFailure as failure:
        violations.append({"stage": failure.stage, "detail": failure.detail})
    return {
        "field": spec.name,
        "counts": counts,
        "homs": {
            "inequivalence": f"width-{spec.gf5_width}",
            "lifting": f"width-{k}",
        },
        "violations": violations,
        "verdict": "PASS" if not violations else "FAIL",
    }
