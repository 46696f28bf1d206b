"""Exponent-box bounding and the modular fingerprint sieve.

Every unit of a field is sign * prod(generators ** exps).  Mapping the
indeterminates to Gaussian dyadic units turns each generator into a unit
whose log2-norm is an exact half-integer, so every such map yields one
linear row r with |r . exps| <= 1.  Fourier-Motzkin elimination over exact
rationals turns those rows into per-exponent bounds, and rounding outward
gives a finite integer box guaranteed to contain every fundamental element.

The box is then sieved: each candidate gets a fingerprint (its residue
under the spec's modular map, or its exact value for the Gaussian field),
fingerprints are checked to be pairwise distinct (advancing to larger
primes until they are), and a candidate survives iff the fingerprint of
1 - candidate also appears.  Survivors are cross-checked exactly.
"""

from __future__ import annotations

from fractions import Fraction
from math import ceil, floor
from typing import NamedTuple

from .exact import (
    Expr,
    GAUSS_ONE,
    GAUSS_ZERO,
    GaussDyadic,
    ModMap,
    RatFunc,
    gauss_add,
    gauss_div,
    gauss_is_one,
    gauss_is_unit,
    gauss_is_zero,
    gauss_lognorm,
    gauss_make,
    gauss_mul,
    gauss_neg,
    gauss_sub,
    mod_eval,
    next_prime,
    ratfunc_arith,
    ratfunc_const,
    ratfunc_eq,
)
from .pfield import (
    FactoredElement,
    PartialFieldSpec,
    VerificationError,
    element_fingerprint,
    expand_element,
    factor_over_generators,
    fingerprint_sort_key,
)


class CandidateBox(NamedTuple):
    """Integer exponent ranges per generator slot; slot 0 is pinned to 0."""

    ranges: tuple[tuple[int, int], ...]
    include_zero: bool


class SieveResult(NamedTuple):
    """Sieve output: surviving fingerprints mapped to factored elements."""

    mod_map: ModMap | None
    fingerprints: dict
    distinct_count: int
    candidate_count: int


# ---------------------------------------------------------------------------
# Unit-norm rows


def _gauss_eval(expr: Expr, env: dict[str, GaussDyadic]) -> GaussDyadic:
    op = expr[0]
    if op == "num":
        return gauss_make(expr[1], 0, 0)
    if op == "var":
        return env[expr[1]]
    if op == "neg":
        return gauss_neg(_gauss_eval(expr[1], env))
    if op == "pow":
        base = _gauss_eval(expr[1], env)
        acc = GAUSS_ONE
        for _ in range(abs(expr[2])):
            acc = gauss_mul(acc, base) if expr[2] > 0 else gauss_div(acc, base)
        return acc
    lhs = _gauss_eval(expr[1], env)
    rhs = _gauss_eval(expr[2], env)
    if op == "add":
        return gauss_add(lhs, rhs)
    if op == "sub":
        return gauss_sub(lhs, rhs)
    if op == "mul":
        return gauss_mul(lhs, rhs)
    if op == "div":
        return gauss_div(lhs, rhs)
    raise ValueError(f"unknown expression node {op!r}")


def lognorm_rows(spec: PartialFieldSpec) -> list[tuple[Fraction, ...]]:
    """One log2-norm row per Gaussian-unit map of the indeterminates."""
    rows = []
    for images in spec.h2_hom_images:
        env = dict(zip(spec.var_names, images))
        rows.append(
            tuple(gauss_lognorm(_gauss_eval(ast, env)) for ast in spec.generator_asts)
        )
    return rows


# ---------------------------------------------------------------------------
# Fourier-Motzkin bounding


def _normalize(coeffs: tuple[Fraction, ...], rhs: Fraction):
    scale = max((abs(c) for c in coeffs if c), default=Fraction(0))
    if not scale:
        return coeffs, rhs
    return tuple(c / scale for c in coeffs), rhs / scale


def _dedup(ineqs):
    """Keep, per normalized coefficient vector, the tightest right side."""
    best: dict[tuple[Fraction, ...], tuple[Fraction, frozenset]] = {}
    for coeffs, rhs, hist in ineqs:
        coeffs, rhs = _normalize(coeffs, rhs)
        if not any(coeffs):
            if rhs < 0:
                raise VerificationError("exponent constraints are infeasible")
            continue
        cur = best.get(coeffs)
        if cur is None or rhs < cur[0] or (rhs == cur[0] and len(hist) < len(cur[1])):
            best[coeffs] = (rhs, hist)
    return [(c, r, h) for c, (r, h) in best.items()]


def _eliminate(ineqs, j: int, max_hist: int):
    """One Fourier-Motzkin step.  Combinations drawing on more than
    max_hist original rows are redundant (Imbert) and dropped."""
    pos, neg, rest = [], [], []
    for row in ineqs:
        c = row[0][j]
        if c > 0:
            pos.append(row)
        elif c < 0:
            neg.append(row)
        else:
            rest.append(row)
    for pc, pr, ph in pos:
        for nc, nr, nh in neg:
            hist = ph | nh
            if len(hist) > max_hist:
                continue
            ps, ns = pc[j], -nc[j]
            coeffs = tuple(a / ps + b / ns for a, b in zip(pc, nc))
            rest.append((coeffs, pr / ps + nr / ns, hist))
    return _dedup(rest)


def _fm_bounds(ineqs, target: int, width: int) -> tuple[Fraction, Fraction]:
    cur = _dedup(
        [(c, r, frozenset([i])) for i, (c, r) in enumerate(ineqs)]
    )
    remaining = [j for j in range(1, width) if j != target]
    eliminated = 0
    while remaining:
        eliminated += 1

        def fill(j: int) -> int:
            p = sum(1 for row in cur if row[0][j] > 0)
            n = sum(1 for row in cur if row[0][j] < 0)
            return p * n - p - n

        j = min(remaining, key=fill)
        remaining.remove(j)
        cur = _eliminate(cur, j, eliminated + 1)
    lo = hi = None
    for coeffs, rhs, _ in cur:
        c = coeffs[target]
        if c > 0:
            bound = rhs / c
            hi = bound if hi is None else min(hi, bound)
        elif c < 0:
            bound = rhs / c
            lo = bound if lo is None else max(lo, bound)
    if lo is None or hi is None:
        raise VerificationError(f"exponent slot {target} is unbounded")
    return lo, hi


def _slice_feasible(int_rows, ranges, pin_slot: int, pin_value: int) -> bool:
    """True iff some integer point of the box with slot pinned satisfies
    every row.  Rows carry integer coefficients (scaled by 2)."""
    spans = []
    for j, (lo, hi) in enumerate(ranges):
        if j == pin_slot:
            spans.append((pin_value,))
        else:
            spans.append(tuple(sorted(range(lo, hi + 1), key=abs)))
    points = [()]
    for span in spans:
        points = [p + (e,) for p in points for e in span]
    for point in points:
        if all(
            sum(c * e for c, e in zip(coeffs, point)) <= rhs
            for coeffs, rhs in int_rows
        ):
            return True
    return False


def bound_exponents(rows, extra_bounds, include_zero: bool) -> CandidateBox:
    """Integer exponent box from norm rows.

    Fourier-Motzkin over exact rationals bounds each slot in the real
    relaxation; rounding inward to integers can still leave box ends no
    integer point attains, so ends are then shrunk until attainable,
    iterated to a fixpoint.  Extra per-slot bounds join the system."""
    width = len(rows[0])
    ineqs = []
    for row in rows:
        coeffs = tuple(Fraction(c) for c in row)
        ineqs.append((coeffs, Fraction(1)))
        ineqs.append((tuple(-c for c in coeffs), Fraction(1)))
    for slot, lo_extra, hi_extra in extra_bounds:
        unit = [Fraction(0)] * width
        unit[slot] = Fraction(1)
        ineqs.append((tuple(unit), Fraction(hi_extra)))
        ineqs.append((tuple(-u for u in unit), Fraction(-lo_extra)))
    ranges = [(0, 0)]
    for j in range(1, width):
        lo, hi = _fm_bounds(ineqs, j, width)
        ranges.append((ceil(lo), floor(hi)))

    int_rows = []
    for coeffs, rhs in ineqs:
        scaled = tuple(2 * c for c in coeffs)
        assert all(c.denominator == 1 for c in scaled)
        int_rows.append((tuple(int(c) for c in scaled), int(2 * rhs)))
    changed = True
    while changed:
        changed = False
        for j in range(1, width):
            lo, hi = ranges[j]
            while lo < hi and not _slice_feasible(int_rows, ranges, j, lo):
                lo += 1
                changed = True
            while hi > lo and not _slice_feasible(int_rows, ranges, j, hi):
                hi -= 1
                changed = True
            ranges[j] = (lo, hi)
    return CandidateBox(tuple(ranges), include_zero)


_box_cache: dict[str, CandidateBox] = {}


def candidate_box(spec: PartialFieldSpec) -> CandidateBox:
    """Exponent box containing every fundamental element of the field."""
    if spec.is_gauss:
        # Units with |log2 norm| <= 1: 2-exponent in [-1, 1], i-exponent a
        # phase in [0, 3], and (1 - i)-exponent in [0, 1].
        return CandidateBox(((0, 0), (-1, 1), (0, 3), (0, 1)), True)
    key = spec.source_hash
    if key not in _box_cache:
        rows = lognorm_rows(spec)
        _box_cache[key] = bound_exponents(
            rows, spec.extra_bounds, spec.include_zero_candidate
        )
    return _box_cache[key]


# ---------------------------------------------------------------------------
# Candidate enumeration


def enumerate_candidates(box: CandidateBox) -> list[FactoredElement]:
    """All (sign, exponent) tuples in the box, in a fixed order."""
    out = []
    for sign in (1, -1):
        stack = [()]
        for lo, hi in box.ranges:
            stack = [exps + (e,) for exps in stack for e in range(lo, hi + 1)]
        out.extend(FactoredElement(sign, exps) for exps in stack)
    if box.include_zero:
        out.append(FactoredElement(0, (0,) * len(box.ranges)))
    return out


# ---------------------------------------------------------------------------
# Fingerprint sieve


def resolve_mod_map(
    spec: PartialFieldSpec,
    candidates: list[FactoredElement],
    prime_start: int | None = None,
) -> tuple[ModMap, int]:
    """Modular map whose fingerprints separate all candidates and 0.

    Starts at the spec prime (or an override) and advances to the next
    prime whenever a generator residue vanishes or two candidates collide.
    """
    p = spec.mod_prime if prime_start is None else prime_start
    assert p is not None
    expected = len(candidates)
    if all(fe.sign != 0 for fe in candidates):
        expected += 1
    while True:
        try:
            mm = spec.mod_map(p)
        except ValueError:
            p = next_prime(p)
            continue
        assert mm is not None
        residues = {mod_eval(mm, fe.sign, fe.exps) for fe in candidates}
        residues.add(0)
        if len(residues) == expected:
            return mm, expected
        p = next_prime(p)


def _gauss_sieve(spec: PartialFieldSpec, candidates) -> SieveResult:
    values: dict[GaussDyadic, None] = {}
    for fe in candidates:
        values.setdefault(expand_element(spec, fe), None)
    window = []
    for v in values:
        if gauss_is_zero(v):
            window.append(v)
        elif gauss_is_unit(v) and abs(gauss_lognorm(v)) <= 1:
            window.append(v)
    in_window = set(window)
    survivors = [v for v in window if gauss_sub(GAUSS_ONE, v) in in_window]
    survivors.sort(key=fingerprint_sort_key)
    fingerprints = {v: factor_over_generators(spec, v) for v in survivors}
    return SieveResult(None, fingerprints, len(window), len(candidates))


def fingerprint_sieve(
    spec: PartialFieldSpec,
    candidates: list[FactoredElement],
    prime_start: int | None = None,
) -> SieveResult:
    """Keep the candidates c with both c and 1 - c in the fingerprint image."""
    if spec.is_gauss:
        return _gauss_sieve(spec, candidates)
    mm, distinct = resolve_mod_map(spec, candidates, prime_start)
    p = mm.prime
    fps = {mod_eval(mm, fe.sign, fe.exps): fe for fe in candidates}
    fps.setdefault(0, FactoredElement(0, (0,) * len(spec.generators)))
    survivors = {
        fp: fps[fp] for fp in sorted(fps) if (1 - fp) % p in fps
    }
    return SieveResult(mm, survivors, distinct, len(candidates))


# ---------------------------------------------------------------------------
# Exact verification of the survivors


def _exact_complement(spec: PartialFieldSpec, value):
    if isinstance(value, GaussDyadic):
        return gauss_sub(GAUSS_ONE, value)
    return ratfunc_arith(ratfunc_const(spec.arity, 1), value, "sub")


def _values_equal(a, b) -> bool:
    if isinstance(a, GaussDyadic):
        return a == b
    return ratfunc_eq(a, b)


def verify_survivors(
    spec: PartialFieldSpec,
    result: SieveResult,
    elements: list[tuple[FactoredElement, RatFunc | GaussDyadic]],
) -> None:
    """Cross-check sieve survivors against the associate-closure route.

    Checks that the counts match, that 1 - s is exactly the survivor the
    fingerprint arithmetic pairs it with, and that fingerprints put the two
    routes in elementwise bijection.  Raises VerificationError otherwise.
    """
    if len(result.fingerprints) != len(elements):
        raise VerificationError(
            f"{spec.name}: sieve found {len(result.fingerprints)} survivors, "
            f"closure found {len(elements)}"
        )
    mm = result.mod_map
    for fp, fe in result.fingerprints.items():
        value = expand_element(spec, fe)
        if isinstance(fp, GaussDyadic):
            partner_fp = gauss_sub(GAUSS_ONE, fp)
        else:
            assert mm is not None
            partner_fp = (1 - fp) % mm.prime
        partner = result.fingerprints.get(partner_fp)
        if partner is None:
            raise VerificationError(
                f"{spec.name}: survivor {fe} has no partner for 1 - s"
            )
        complement = _exact_complement(spec, value)
        if not _values_equal(complement, expand_element(spec, partner)):
            raise VerificationError(
                f"{spec.name}: 1 - s is not exactly the paired survivor for {fe}"
            )
    for fe, value in elements:
        fp = element_fingerprint(spec, mm, fe, value)
        survivor = result.fingerprints.get(fp)
        if survivor is None:
            raise VerificationError(
                f"{spec.name}: closure element {fe} missing from the sieve"
            )
        if survivor != fe:
            raise VerificationError(
                f"{spec.name}: routes disagree at fingerprint {fp}: "
                f"{survivor} vs {fe}"
            )
