"""Local K1 groups of finite graded rings by exhaustive enumeration and closure."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .algebra import FiniteMatrixAlgebra, apply_entry_map, entry_map
from .dense import (
    Codec,
    DenseGroup,
    DenseQuotient,
    dense_closure,
    dense_eligible,
    dense_gl,
    dense_normal_closure,
    dense_quotient,
    entry_digit_map,
)
from .errors import FamilyError, GradedK1Error, IdealError, WitnessUnavailableError
from .grading import GradeElement
from .groups import (
    DEFAULT_CAP,
    Generator,
    GroupSnapshot,
    Quotient,
    abelian_invariants,
    commutator_code,
    coset_quotient,
    elementary_generator,
    enumerated_snapshot,
    generate_group,
    normal_closure,
)
from .matrices import GradedMatrix, ShiftFamily, embed, matmul, pad_to, suspend_family
from .rings import DoubleRing, GradedIdeal, GradedRing, QuotientRing
from .whitehead import Certificate, conjugate_block_factorization

log = logging.getLogger(__name__)

_ALGEBRAS: dict = {}


def algebra(ring: GradedRing, family: ShiftFamily) -> FiniteMatrixAlgebra:
    """Shared encoded algebra for a (ring, family) pair."""
    key = (ring, family)
    if key not in _ALGEBRAS:
        _ALGEBRAS[key] = FiniteMatrixAlgebra(ring, family)
    return _ALGEBRAS[key]


# hashed-tuple snapshots up to these sizes; larger spaces go to the dense backend
SMALL_SCAN = 1 << 22
SMALL_ELEMENTS = 1 << 18

def _truncated(alg, label, level, reason):
    return enumerated_snapshot(alg, [], True, label, level, reason)


def _closure(alg: FiniteMatrixAlgebra, gens, cap: int, label: str, level: int, workers: int = 1):
    """Generated subgroup: word-tracking BFS first, the dense backend once it outgrows hashing."""
    small_cap = min(cap, SMALL_ELEMENTS) if dense_eligible(alg) else cap
    snap = generate_group(alg, gens, small_cap, label, level, workers)
    if snap.truncated and cap > small_cap:
        log.info("%s outgrew %d elements; switching to the dense backend", label, small_cap)
        return dense_closure(alg, gens, cap, label, level)
    if snap.truncated:
        snap.reason = f"closure exceeded cap {cap}"
    return snap


def _normal_closure(snap, conjugators, cap: int, workers: int = 1):
    if isinstance(snap, DenseGroup):
        return dense_normal_closure(snap, conjugators, cap)
    alg = snap.algebra
    small_cap = min(cap, SMALL_ELEMENTS) if dense_eligible(alg) else cap
    gens = list(snap.generators)
    out = normal_closure(snap, conjugators, small_cap, workers)
    if out.truncated and cap > small_cap:
        return dense_normal_closure(dense_closure(alg, gens, cap, snap.label, snap.level), conjugators, cap)
    return out


def quotient(group, sub):
    """Cosets of ``sub`` in ``group`` with whichever backend holds ``group``."""
    if isinstance(group, DenseGroup):
        return dense_quotient(group, sub)
    if isinstance(sub, DenseGroup):
        raise GradedK1Error(f"{sub.label} is larger than the hashed {group.label}")
    return coset_quotient(group, sub)


def _level_family(family: ShiftFamily, level: int) -> ShiftFamily:
    if level < 1:
        raise FamilyError(f"level must be >= 1, got {level}")
    return family.repeat(level)


# ---------------------------------------------------------------------------
# groups


def gl_group(ring: GradedRing, family: ShiftFamily, level: int = 1, cap: int = DEFAULT_CAP) -> GroupSnapshot:
    """All invertible degree-0 matrices over ``family`` repeated ``level`` times."""
    alg = algebra(ring, _level_family(family, level))
    space = alg.candidate_count()
    if space > SMALL_SCAN:
        if not dense_eligible(alg):
            return _truncated(alg, "GL", level, f"{space} candidate matrices exceed the exhaustive limit")
        return dense_gl(alg, cap, "GL", level)
    codes, truncated = alg.enumerate_invertible(cap=cap)
    reason = f"more than {cap} elements" if truncated else ""
    return enumerated_snapshot(alg, codes, truncated, "GL", level, reason)


def _additive_basis(alg: FiniteMatrixAlgebra, i: int, j: int, members: list[int]) -> list[int]:
    """Greedy additive generators of ``members`` (a subgroup of the (i,j) entry component)."""
    add = alg.add_table(alg.pos_deg[i * alg.n + j])
    span = {0}
    basis = []
    for r in members:
        if r in span:
            continue
        basis.append(r)
        frontier = list(span)
        while frontier:
            nxt = []
            for x in frontier:
                y = add[x][r]
                if y not in span:
                    span.add(y)
                    nxt.append(y)
            frontier = nxt
    return basis


def elementary_generators(
    alg: FiniteMatrixAlgebra, ideal: Optional[GradedIdeal] = None, additive: bool = True
) -> list[Generator]:
    """e_ij(r) for off-diagonal positions and admissible r (in I when given).

    Since e_ij(a) e_ij(b) = e_ij(a + b), additive generators of each entry
    component already generate the group; ``additive=False`` lists every r.
    """
    n = alg.n
    gens = []
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            members = [
                r for r, x in enumerate(alg.entry_component(i, j)) if r and (ideal is None or ideal.contains(x))
            ]
            if additive:
                members = _additive_basis(alg, i, j, members)
            gens.extend(elementary_generator(alg, i, j, r) for r in members)
    return gens


def elementary_group(
    ring: GradedRing, family: ShiftFamily, level: int = 1, cap: int = DEFAULT_CAP, workers: int = 1
) -> GroupSnapshot:
    alg = algebra(ring, _level_family(family, level))
    return _closure(alg, elementary_generators(alg), cap, "E", level, workers)


def congruence_subgroup(
    ring: GradedRing, ideal: GradedIdeal, family: ShiftFamily, level: int = 1, cap: int = DEFAULT_CAP
) -> GroupSnapshot:
    """Invertible matrices congruent to the identity modulo ``ideal``."""
    if ideal.ring != ring:
        raise IdealError("ideal belongs to a different ring")
    alg = algebra(ring, _level_family(family, level))
    one = ring.one()
    allowed = []
    for p in range(alg.n * alg.n):
        comp = alg.components[alg.pos_deg[p]]
        if p // alg.n == p % alg.n:
            allowed.append([k for k, x in enumerate(comp) if ideal.contains(x - one)])
        else:
            allowed.append([k for k, x in enumerate(comp) if ideal.contains(x)])
    space = alg.candidate_count(allowed)
    if space > SMALL_SCAN:
        return _truncated(alg, "GL(A,I)", level, f"{space} candidate matrices exceed the exhaustive limit")
    codes, truncated = alg.enumerate_invertible(allowed, cap=cap)
    reason = f"more than {cap} elements" if truncated else ""
    return enumerated_snapshot(alg, codes, truncated, "GL(A,I)", level, reason)


def relative_elementary(
    ring: GradedRing,
    ideal: GradedIdeal,
    family: ShiftFamily,
    level: int = 1,
    cap: int = DEFAULT_CAP,
    workers: int = 1,
) -> GroupSnapshot:
    """Normal closure in E(A) of the elementary matrices with entries in ``ideal``."""
    alg = algebra(ring, _level_family(family, level))
    snap = _closure(alg, elementary_generators(alg, ideal), cap, "E(A,I)", level, workers)
    if snap.truncated:
        return snap
    return _normal_closure(snap, elementary_generators(alg), cap, workers)


@dataclass
class PerfectnessReport:
    perfect: bool
    e_order: int
    commutator_order: int
    witness: Optional[GeneratorInfo] = None
    abelianization: Optional[list[int]] = None

    def to_dict(self) -> dict:
        return {
            "perfect": self.perfect,
            "e_order": self.e_order,
            "commutator_order": self.commutator_order,
            "witness": self.witness.to_dict() if self.witness else None,
            "abelianization": self.abelianization,
        }


@dataclass
class GeneratorInfo:
    letter: str
    matrix: GradedMatrix

    def to_dict(self) -> dict:
        return {"letter": self.letter, "matrix": self.matrix.to_literal()}


def commutator_subgroup(snap: GroupSnapshot, cap: int = DEFAULT_CAP, workers: int = 1) -> GroupSnapshot:
    """[G, G] as the normal closure of the commutators of generator pairs."""
    snap.require_complete()
    alg = snap.algebra
    gens = snap.generators
    comms, seen = [], {alg.identity}
    for a in range(len(gens)):
        for b in range(a + 1, len(gens)):
            c = commutator_code(alg, gens[a], gens[b])
            if c not in seen:
                seen.add(c)
                comms.append(Generator(c))
    sub = _closure(alg, comms, cap, f"[{snap.label},{snap.label}]", snap.level, workers)
    if sub.truncated:
        return sub
    return _normal_closure(sub, gens, cap, workers)


def perfectness_check(snap: GroupSnapshot, cap: int = DEFAULT_CAP, workers: int = 1) -> PerfectnessReport:
    snap.require_complete()
    comm = commutator_subgroup(snap, cap, workers)
    comm.require_complete()
    if comm.order == snap.order:
        return PerfectnessReport(True, snap.order, comm.order)
    witness = None
    for g in snap.generators:
        if g.code not in comm:
            witness = GeneratorInfo(str(g.letter) if g.letter else "", snap.algebra.decode(g.code))
            break
    q = quotient(snap, comm)
    return PerfectnessReport(False, snap.order, comm.order, witness, q.invariants)


# ---------------------------------------------------------------------------
# K1 reports


@dataclass
class K1Report:
    """GL/E at one family and level; ``invariants`` is set when the quotient is an abelian group."""

    label: str
    ring: dict
    family: list
    level: int
    gl_order: int
    e_order: int
    normal: bool
    abelian: Optional[bool]
    invariants: Optional[list[int]]
    representatives: list[GradedMatrix]
    obstruction: str = ""
    quotient: Optional[Quotient] = field(default=None, repr=False, compare=False)

    @property
    def order(self) -> int:
        return len(self.representatives)

    @property
    def ok(self) -> bool:
        return self.invariants is not None

    def class_index(self, m: GradedMatrix) -> int:
        return self.quotient.class_of(m)

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "ring": self.ring,
            "family": self.family,
            "level": self.level,
            "gl_order": self.gl_order,
            "e_order": self.e_order,
            "quotient_order": self.order,
            "normal": self.normal,
            "abelian": self.abelian,
            "invariants": self.invariants,
            "representatives": [m.to_literal() for m in self.representatives],
            "obstruction": self.obstruction,
        }


def _report(label, ring, family, level, group, sub) -> K1Report:
    q = quotient(group, sub)
    alg = group.algebra
    return K1Report(
        label,
        ring.describe(),
        family.to_list(),
        level,
        group.order,
        sub.order,
        q.normal,
        q.abelian,
        q.invariants,
        [alg.decode(r) for r in q.reps],
        q.obstruction,
        q,
    )


def k1_local(
    ring: GradedRing, family: ShiftFamily, level: int = 1, cap: int = DEFAULT_CAP, workers: int = 1
) -> K1Report:
    """K1(A)(S) at a finite level as GL/E, with E checked to be normal."""
    gl = gl_group(ring, family, level, cap)
    gl.require_complete()
    e = elementary_group(ring, family, level, cap, workers)
    e.require_complete()
    return _report("K1", ring, family, level, gl, e)


def k1_relative_local(
    ring: GradedRing,
    ideal: GradedIdeal,
    family: ShiftFamily,
    level: int = 1,
    cap: int = DEFAULT_CAP,
    workers: int = 1,
) -> K1Report:
    """GL(A,I)/E(A,I) at a finite level."""
    gl = congruence_subgroup(ring, ideal, family, level, cap)
    gl.require_complete()
    e = relative_elementary(ring, ideal, family, level, cap, workers)
    e.require_complete()
    return _report("K1(A,I)", ring, family, level, gl, e)


def relative_containment(
    ring: GradedRing, ideal: GradedIdeal, family: ShiftFamily, level: int = 1, cap: int = DEFAULT_CAP
) -> dict:
    """Check E(A,I) within GL(A,I) and within E(A); violations are findings, not errors."""
    cong = congruence_subgroup(ring, ideal, family, level, cap)
    rel = relative_elementary(ring, ideal, family, level, cap)
    e = elementary_group(ring, family, level, cap)
    for s in (cong, rel, e):
        s.require_complete()
    outside_cong = outside_e = 0
    for digits in rel.digit_chunks():
        outside_cong += int((~cong.contains_digits(digits)).sum())
        outside_e += int((~e.contains_digits(digits)).sum())
    return {
        "in_congruence": not outside_cong,
        "in_elementary": not outside_e,
        "outside_congruence": outside_cong,
        "outside_elementary": outside_e,
    }


def k1_relative_via_double(
    ring: GradedRing, ideal: GradedIdeal, family: ShiftFamily, level: int = 1, cap: int = DEFAULT_CAP
) -> dict:
    """K1(A,I) as the kernel of (p1)_*: K1(D(A,I)) -> K1(A), for cross-checking."""
    d = DoubleRing(ring, ideal)
    kd = k1_local(d, family, level, cap)
    ka = k1_local(ring, family, level, cap)
    if not (kd.ok and ka.ok):
        raise GradedK1Error("K1 of the double or of A is not an abelian quotient at this level")
    src = algebra(d, _level_family(family, level))
    dst = algebra(ring, _level_family(family, level))
    p1 = entry_map(src, dst, d.p1)
    ident = ka.quotient.identity_class()
    kernel = [k for k, r in enumerate(kd.quotient.reps) if ka.quotient.class_of(apply_entry_map(p1, r)) == ident]
    table = kd.quotient.table
    sub = [[kernel.index(table[a][b]) for b in kernel] for a in kernel]
    return {"order": len(kernel), "invariants": abelian_invariants(sub, kernel.index(kd.quotient.identity_class()))}


# ---------------------------------------------------------------------------
# exactness


@dataclass
class ExactnessReport:
    exact: bool
    relative: K1Report
    middle: K1Report
    quotient: K1Report
    image: list[int]
    kernel: list[int]
    well_defined: bool
    homomorphisms: bool

    def to_dict(self) -> dict:
        return {
            "exact": self.exact,
            "well_defined": self.well_defined,
            "homomorphisms": self.homomorphisms,
            "image_p2": self.image,
            "kernel_q": self.kernel,
            "relative": self.relative.to_dict(),
            "middle": self.middle.to_dict(),
            "quotient": self.quotient.to_dict(),
        }


def _class_map(src, dst, maps) -> tuple[list[int], bool]:
    """Induced map on cosets, checked to be constant on every coset element."""
    out = [dst.class_of(apply_entry_map(maps, r) if maps else r) for r in src.reps]
    lookup = np.array(out, dtype=np.int64)
    if isinstance(src, DenseQuotient):
        # packed codes straight through; no digit arrays
        src_codec = src.group.codec
        dmap = entry_digit_map(src_codec, Codec(dst.group.algebra), maps) if maps else None
        for codes, labels in src.labelled_codes():
            image = dmap(codes) if dmap is not None else codes
            if not (dst.classes_of_codes(image) == lookup[labels]).all():
                return out, False
        return out, True
    tables = [np.array(m, dtype=np.int64) for m in maps] if maps else None
    for digits, labels in src.labelled_chunks():
        if tables is not None:
            digits = np.stack([t[digits[:, p]] for p, t in enumerate(tables)], axis=1)
        if not (dst.classes_of(digits) == lookup[labels]).all():
            return out, False
    return out, True


def _is_hom(src: Quotient, dst: Quotient, fmap: list[int]) -> bool:
    n = len(src.reps)
    return all(fmap[src.table[a][b]] == dst.table[fmap[a]][fmap[b]] for a in range(n) for b in range(n))


def check_exactness(
    ring: GradedRing,
    ideal: GradedIdeal,
    family: ShiftFamily,
    level: int = 1,
    cap: int = DEFAULT_CAP,
    workers: int = 1,
) -> ExactnessReport:
    """Verify image((p2)_*) = kernel(q_*) on K1(A,I) -> K1(A) -> K1(A/I) elementwise."""
    quot_ring = QuotientRing(ring, ideal)
    rel = k1_relative_local(ring, ideal, family, level, cap, workers)
    mid = k1_local(ring, family, level, cap, workers)
    low = k1_local(quot_ring, family, level, cap, workers)
    for rep in (rel, mid, low):
        if not rep.ok:
            raise GradedK1Error(f"{rep.label} is not an abelian quotient at level {level}: {rep.obstruction}")
    fam = _level_family(family, level)
    red = entry_map(algebra(ring, fam), algebra(quot_ring, fam), quot_ring.reduce)
    # congruence elements are elements of GL(A): (p2)_* is induced by inclusion
    p2, ok2 = _class_map(rel.quotient, mid.quotient, None)
    q, okq = _class_map(mid.quotient, low.quotient, red)
    image = sorted(set(p2))
    ident = low.quotient.identity_class()
    kernel = [c for c in range(mid.order) if q[c] == ident]
    homs = _is_hom(rel.quotient, mid.quotient, p2) and _is_hom(mid.quotient, low.quotient, q)
    if not (ok2 and okq):
        raise GradedK1Error("induced map is not constant on cosets", p2=ok2, q=okq)
    return ExactnessReport(image == kernel and homs, rel, mid, low, image, kernel, ok2 and okq, homs)


# ---------------------------------------------------------------------------
# classes and maps between families


@dataclass(frozen=True)
class K1Class:
    """The class of an invertible degree-0 matrix in K1(A)(family)."""

    representative: GradedMatrix
    level: int = 1

    def __post_init__(self):
        if not self.representative.degree.is_zero():
            raise GradedK1Error("K1 classes need degree-0 representatives")

    @property
    def family(self) -> ShiftFamily:
        return self.representative.family

    def to_dict(self) -> dict:
        return {"family": self.family.to_list(), "level": self.level, "representative": self.representative.to_literal()}


def inclusion_map(cls: K1Class, target: ShiftFamily) -> K1Class:
    """Image under the inclusion S -> T: block embedding, identity elsewhere."""
    positions = cls.family.embedding_into(target)
    return K1Class(embed(cls.representative, target, positions), cls.level)


def gamma_action(cls: K1Class, lam: GradeElement) -> K1Class:
    return K1Class(suspend_family(cls.representative, lam), cls.level)


def crossed_product_triviality_check(
    ring: GradedRing, family: ShiftFamily, lam: GradeElement, h: GradedMatrix
) -> Certificate:
    """Certify diag(h, r h^-1 r^-1) in E over (alpha, lam + alpha) for a unit r of degree lam.

    Over a commutative ring r h r^-1 = h entrywise, so the certificate shows
    that [h] at alpha and its translate by lam agree stably.
    """
    if h.family != family:
        raise FamilyError(f"matrix family {h.family} differs from {family}")
    try:
        r = ring.invertible_element(lam)
    except WitnessUnavailableError as exc:
        raise WitnessUnavailableError(
            f"not a crossed product: no invertible homogeneous element of degree {lam}", degree=lam
        ) from exc
    cert = conjugate_block_factorization(h, r)
    translated = gamma_action(K1Class(h), lam).representative
    conj = [[r * x * ring.unit_inverse(r) for x in row] for row in h.entries]
    cert.notes["r"] = ring.format_literal(r)
    cert.notes["conjugate_equals_translate"] = conj == [list(row) for row in translated.entries]
    return cert


# ---------------------------------------------------------------------------
# stabilization


@dataclass
class StabilizationReport:
    levels: list[int]
    reports: list[K1Report]
    maps: list[dict]
    stable_from: Optional[int]

    def to_dict(self) -> dict:
        return {
            "levels": self.levels,
            "reports": [r.to_dict() for r in self.reports],
            "maps": self.maps,
            "stable_from": self.stable_from,
        }


def stabilization_map(lower: K1Report, upper: K1Report) -> dict:
    """Induced map g -> diag(g, I) between consecutive levels, on classes."""
    big = _level_family_list(upper)
    images = []
    for m in lower.representatives:
        images.append(upper.quotient.class_of(pad_to(m, big)))
    fmap = images
    hom = _is_hom(lower.quotient, upper.quotient, fmap)
    injective = len(set(fmap)) == len(fmap)
    surjective = len(set(fmap)) == upper.order
    return {
        "from": lower.level,
        "to": upper.level,
        "map": fmap,
        "homomorphism": hom,
        "injective": injective,
        "surjective": surjective,
        "iso": hom and injective and surjective,
    }


def _level_family_list(rep: K1Report) -> ShiftFamily:
    return rep.quotient.group.family


def stabilization_check(
    ring: GradedRing,
    family: ShiftFamily,
    levels: Sequence[int],
    cap: int = DEFAULT_CAP,
    workers: int = 1,
) -> StabilizationReport:
    """k1_local at each level plus the maps induced by stabilization (evidence, not proof)."""
    levels = sorted(set(levels))
    reports = [k1_local(ring, family, lv, cap, workers) for lv in levels]
    maps = []
    for lo, hi in zip(reports, reports[1:]):
        if lo.ok and hi.ok:
            if hi.level != lo.level + 1:
                raise GradedK1Error("stabilization maps need consecutive levels")
            maps.append(stabilization_map(lo, hi))
    stable_from = None
    for k in range(len(reports)):
        tail = reports[k:]
        if all(r.ok for r in tail) and all(r.invariants == tail[0].invariants for r in tail):
            if all(m["iso"] for m in maps[k:]):
                stable_from = reports[k].level
                break
    return StabilizationReport(list(levels), reports, maps, stable_from)


# ---------------------------------------------------------------------------
# suspension


def suspension_check(
    ring: GradedRing, family: ShiftFamily, lam: GradeElement, level: int = 1, cap: int = DEFAULT_CAP
) -> dict:
    """Compare K1 at a family and its translate; check suspension is a bijection on classes."""
    base = k1_local(ring, family, level, cap)
    moved = k1_local(ring, family.shifted(lam), level, cap)
    fmap = [moved.quotient.class_of(suspend_family(m, lam)) for m in base.representatives]
    bijective = sorted(fmap) == list(range(moved.order))
    hom = base.ok and moved.ok and _is_hom(base.quotient, moved.quotient, fmap)
    return {
        "invariants": base.invariants,
        "shifted_invariants": moved.invariants,
        "same_invariants": base.invariants == moved.invariants,
        "bijective": bijective,
        "homomorphism": hom,
    }


def gamma_action_check(ring: GradedRing, family: ShiftFamily, lam: GradeElement, level: int = 1, cap: int = DEFAULT_CAP) -> dict:
    """The Gamma-action on classes respects multiplication of coset representatives."""
    base = k1_local(ring, family, level, cap)
    moved = k1_local(ring, family.shifted(lam), level, cap)
    reps = base.representatives
    ok = True
    for a in reps:
        for b in reps:
            lhs = gamma_action(K1Class(matmul(a, b)), lam).representative
            rhs = matmul(gamma_action(K1Class(a), lam).representative, gamma_action(K1Class(b), lam).representative)
            if moved.quotient.class_of(lhs) != moved.quotient.class_of(rhs):
                ok = False
    return {"compatible": ok, "classes": base.order}

