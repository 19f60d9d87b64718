"""Release criteria, one test each; results are summarised at the end of the run."""

import json
import random
import time
from pathlib import Path

from gradedk1 import k1
from gradedk1.cli import main
from gradedk1.errors import TruncatedError
from gradedk1.grading import cyclic
from gradedk1.matrices import ElementaryGenerator, ShiftFamily, matmul
from gradedk1.rings import GroupRing, LaurentRing, PairRing, TrivialRing, ideal
from gradedk1.sampling import (
    random_family,
    random_generator,
    random_grade,
    random_invertible,
    random_matrix,
    random_unit,
    unit_degrees,
)
from gradedk1.whitehead import (
    commutator_embedding,
    conjugate_block_factorization,
    hyperbolic_factorization,
    rotation_factorization,
    stable_perfectness_witness,
    strongly_graded_perfectness_witness,
)

from conftest import FINITE_RINGS, trivial_family

JOBS = Path(__file__).resolve().parent.parent / "jobs"
ONE = trivial_family(1)

# closed-form group orders, written down before any closure ran
GL3_F3, SL3_F3 = 26 * 24 * 18, 26 * 24 * 18 // 2
GL3_F2 = 7 * 6 * 4
GL2_Z4, SL2_Z4 = 6 * 2**4, 6 * 2**3

# regression fixture for the non-perfect pair ring, from its first computation
PAIR_ORDERS = {"gl": 64, "e": 8, "commutator": 1}
PAIR_WITNESS = "e_{1,3}([0,2])"

# K1 of the degree-zero part: F_3 has units Z/2, F_2 has none besides 1
K1_DEGREE_ZERO = {3: [2], 2: []}


def _all_kinds():
    kinds = {name: make() for name, make in FINITE_RINGS.items()}
    kinds["laurent"] = LaurentRing(3)
    return kinds


def test_criterion_1_degree_law(acceptance):
    rng = random.Random(1)
    kinds = list(_all_kinds().values())
    start = time.perf_counter()
    bad = 0
    for k in range(10**4):
        ring = kinds[k % len(kinds)]
        fam = random_family(ring.grading, 1 + k % 4, rng)
        d1, d2 = random_grade(ring.grading, rng), random_grade(ring.grading, rng)
        p = matmul(random_matrix(ring, fam, d1, rng), random_matrix(ring, fam, d2, rng))
        want = d1 + d2
        if p.degree != want or any(
            p[i, j].degree != want + fam[i] - fam[j] for i in range(p.n) for j in range(p.n)
        ):
            bad += 1
    elapsed = time.perf_counter() - start
    ok = bad == 0 and elapsed < 10
    acceptance(1, ok, f"10000 products, {bad} violations, {elapsed:.1f}s")
    assert ok


def _certificates(ring, rng, size):
    fam = random_family(ring.grading, size, rng)
    big = random_family(ring.grading, max(size, 2), rng)
    r = random_unit(ring, unit_degrees(ring, rng), rng)
    return [
        hyperbolic_factorization(random_invertible(ring, fam, rng)),
        commutator_embedding(random_invertible(ring, fam, rng), random_invertible(ring, fam, rng)),
        stable_perfectness_witness(random_generator(ring, big, rng)),
        rotation_factorization(r, size, fam),
        conjugate_block_factorization(random_invertible(ring, fam, rng), r),
    ]


def test_criterion_2_whitehead_certificates(acceptance):
    rng = random.Random(2)
    start = time.perf_counter()
    counts, failures = {}, 0
    for name, ring in _all_kinds().items():
        runs = 10 if name == "laurent" else 100
        for k in range(runs):
            certs = _certificates(ring, rng, 1 + k % 3)
            failures += sum(not c.verified for c in certs)
        counts[name] = runs
    elapsed = time.perf_counter() - start
    ok = failures == 0 and elapsed < 30
    acceptance(2, ok, f"instances {counts}, {failures} failures, {elapsed:.1f}s")
    assert ok


def test_criterion_3_pair_ring_is_not_perfect(acceptance):
    start = time.perf_counter()
    A = PairRing(4, 2)
    fam = ShiftFamily.of(A.grading, [0, 1, 2])
    gl, e = k1.gl_group(A, fam), k1.elementary_group(A, fam)
    rep = k1.perfectness_check(e)
    elapsed = time.perf_counter() - start
    orders = {"gl": gl.order, "e": e.order, "commutator": rep.commutator_order}
    witness = rep.witness.letter if rep.witness else None
    ok = not rep.perfect and orders == PAIR_ORDERS and witness == PAIR_WITNESS and elapsed < 60
    acceptance(3, ok, f"orders {orders}, witness {witness}, {elapsed:.1f}s")
    assert ok


def test_criterion_4_crossed_product_is_perfect(acceptance):
    start = time.perf_counter()
    A = GroupRing(3, cyclic(2))
    fam = ShiftFamily.of(A.grading, [0, 1, 0])
    rep = k1.perfectness_check(k1.elementary_group(A, fam))
    gens = [
        ElementaryGenerator(fam, i, j, x)
        for i in range(3)
        for j in range(3)
        if i != j
        for x in A.component(fam.entry_degree(i, j))
        if not x.is_zero()
    ]
    witnessed = sum(strongly_graded_perfectness_witness(g).verified for g in gens)
    elapsed = time.perf_counter() - start
    ok = rep.perfect and witnessed == len(gens) and elapsed < 60
    acceptance(4, ok, f"|E| = |[E,E]| = {rep.commutator_order}, {witnessed}/{len(gens)} generators, {elapsed:.1f}s")
    assert ok


def test_criterion_5_k1_oracles(acceptance):
    cases = [
        (TrivialRing(3), 3, [2], GL3_F3, SL3_F3),
        (TrivialRing(2), 3, [], GL3_F2, GL3_F2),
        (TrivialRing(4), 2, [2], GL2_Z4, SL2_Z4),
    ]
    got = []
    for ring, level, want, gl_order, e_order in cases:
        rep = k1.k1_local(ring, ONE, level)
        got.append(rep.invariants)
        if (rep.invariants, rep.gl_order, rep.e_order) != (want, gl_order, e_order):
            break
    ok = got == [c[2] for c in cases]
    acceptance(5, ok, f"invariants {got}")
    assert ok


def test_criterion_6_crossed_products_match_degree_zero(acceptance):
    cap = 10**8
    failures, checked = [], 0
    for p in (3, 2):
        A = GroupRing(p, cyclic(2))
        lam = A.grading.element(1)
        for shifts in ([0], [0, 1], [1, 1]):
            fam = ShiftFamily.of(A.grading, shifts)
            for level in (1, 2, 3):
                where = f"F_{p}[Z/2] {tuple(shifts)} level {level}"
                try:
                    rep = k1.k1_local(A, fam, level, cap)
                except TruncatedError as exc:
                    failures.append(f"{where}: {exc}")
                    continue
                checked += 1
                if rep.invariants != K1_DEGREE_ZERO[p]:
                    failures.append(f"{where}: {rep.invariants}")
                for h in rep.representatives:
                    cert = k1.crossed_product_triviality_check(A, h.family, lam, h)
                    if not (cert.verified and cert.notes["conjugate_equals_translate"]):
                        failures.append(f"{where}: gamma action not trivial")
    ok = not failures
    acceptance(6, ok, f"{checked}/18 cases computed; " + ("; ".join(failures) if failures else "all match K1(A_0)"))
    assert ok, failures


def test_criterion_7_exact_sequence(acceptance):
    start = time.perf_counter()
    F2G = TrivialRing(2, (2,))
    pairs = [
        ("Z/4", TrivialRing(4), [TrivialRing(4).element(2)], 10**6),
        ("Z/9", TrivialRing(9), [TrivialRing(9).element(3)], 3 * 10**8),
        ("F_2[Z/2]", F2G, [F2G.parse({"0": 1, "1": 1})], 10**6),
    ]
    failures = []
    for name, A, gens, cap in pairs:
        for level in (1, 2, 3):
            try:
                rep = k1.check_exactness(A, ideal(A, gens), ONE, level, cap)
            except TruncatedError as exc:
                failures.append(f"{name} level {level}: {exc}")
                continue
            if not (rep.exact and rep.image == rep.kernel):
                failures.append(f"{name} level {level}: image {rep.image} kernel {rep.kernel}")
    elapsed = time.perf_counter() - start
    ok = not failures and elapsed < 300
    acceptance(7, ok, f"9 cases, {elapsed:.0f}s; " + ("; ".join(failures) if failures else "all exact"))
    assert ok, failures


def test_criterion_8_suspension(acceptance):
    cases = [
        (TrivialRing(4), ONE, 2),
        (TrivialRing(2, (2,)), trivial_family(2), 1),
        (GroupRing(3, cyclic(2)), ShiftFamily.of(cyclic(2), [0, 1]), 1),
        (GroupRing(2, cyclic(2)), ShiftFamily.of(cyclic(2), [0, 1, 1]), 1),
        (PairRing(4, 2), ShiftFamily.of(cyclic(3), [0, 1, 2]), 1),
        (PairRing(4, 2), ShiftFamily.of(cyclic(3), [0, 0]), 1),
    ]
    failures = []
    for ring, fam, level in cases:
        for lam in ring.grading.elements():
            out = k1.suspension_check(ring, fam, lam, level)
            if not (out["same_invariants"] and out["bijective"]):
                failures.append(f"{ring} {fam} + {lam}")
    ok = not failures
    acceptance(8, ok, f"{len(cases)} ring/family pairs over every shift; {len(failures)} failures")
    assert ok, failures


def _structured(capsys, path, *extra):
    main(["run", str(path), "--format", "structured", *extra])
    return capsys.readouterr().out


def test_criterion_9_determinism(capsys, acceptance):
    differing = []
    for path in sorted(JOBS.glob("*.toml")):
        serial = [_structured(capsys, path) for _ in range(2)]
        threaded = [_structured(capsys, path, "--workers", "4") for _ in range(2)]
        same = serial[0] == serial[1] and threaded[0] == threaded[1]
        # the job echo records the worker count; the results must not depend on it
        a, b = json.loads(serial[0]), json.loads(threaded[0])
        if not same or a.get("result") != b.get("result") or a.get("error") != b.get("error"):
            differing.append(path.name)
    ok = not differing
    acceptance(9, ok, f"{len(list(JOBS.glob('*.toml')))} jobs, differing: {differing or 'none'}")
    assert ok
