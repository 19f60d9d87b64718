import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gradedk1 import k1
from gradedk1.algebra import FiniteMatrixAlgebra, apply_entry_map, entry_map, monomial_elements
from gradedk1.dense import (
    Codec,
    dense_closure,
    dense_gl,
    dense_normal_closure,
    dense_quotient,
    entry_digit_map,
    left_monomial_map,
)
from gradedk1.grading import cyclic
from gradedk1.groups import coset_quotient, enumerated_snapshot, generate_group, normal_closure
from gradedk1.matrices import ShiftFamily
from gradedk1.rings import GroupRing, PairRing, TrivialRing, ideal, quotient_ring

from conftest import trivial_family

CASES = [
    (TrivialRing(9), trivial_family(2)),
    (TrivialRing(2), trivial_family(4)),
    (TrivialRing(4), trivial_family(3)),
    (GroupRing(3, cyclic(2)), ShiftFamily.of(cyclic(2), [0, 1])),
    (GroupRing(2, cyclic(2)), ShiftFamily.of(cyclic(2), [0, 1, 1])),
    (PairRing(4, 2), ShiftFamily.of(cyclic(3), [0, 1, 2])),
]


def _both(ring, fam):
    alg = FiniteMatrixAlgebra(ring, fam)
    gl_small = enumerated_snapshot(alg, alg.enumerate_invertible()[0], False, "GL", 1)
    gens = k1.elementary_generators(alg)
    e_small = generate_group(alg, gens, cap=10**7)
    gl_dense = dense_gl(alg, 10**7)
    e_dense = dense_closure(alg, gens, 10**7, "E")
    return alg, (gl_small, e_small), (gl_dense, e_dense)


@pytest.mark.parametrize("ring, fam", CASES)
def test_dense_and_hashed_engines_agree(ring, fam):
    alg, (gl_s, e_s), (gl_d, e_d) = _both(ring, fam)
    codec = Codec(alg)
    assert gl_d.order == gl_s.order and e_d.order == e_s.order
    assert np.array_equal(gl_d.codes.astype(np.int64), np.sort(codec.pack(gl_s.as_array())))
    assert np.array_equal(e_d.codes.astype(np.int64), np.sort(codec.pack(e_s.as_array())))
    q_s, q_d = coset_quotient(gl_s, e_s), dense_quotient(gl_d, e_d)
    assert (q_s.normal, q_s.abelian, q_s.invariants) == (q_d.normal, q_d.abelian, q_d.invariants)
    # both backends choose the same coset representatives
    assert q_s.reps == q_d.reps and q_s.table == q_d.table
    if q_s.normal:
        # same partition: the class maps are bijections onto each other
        pairs = set()
        for digits, labels in q_s.labelled_chunks():
            pairs |= set(zip(labels.tolist(), q_d.classes_of(digits).tolist()))
        assert len(pairs) == q_s.index == q_d.index


def test_dense_normal_closure_matches():
    alg = FiniteMatrixAlgebra(TrivialRing(3), trivial_family(3))
    gens = k1.elementary_generators(alg)
    small = normal_closure(generate_group(alg, gens[:1], cap=10**6), gens, cap=10**6)
    dense = dense_normal_closure(dense_closure(alg, gens[:1], 10**6), gens, 10**6)
    assert small.order == dense.order == 5616  # SL_3(F_3)


def test_dense_truncation():
    alg = FiniteMatrixAlgebra(TrivialRing(3), trivial_family(3))
    assert dense_gl(alg, 100).truncated
    assert dense_closure(alg, k1.elementary_generators(alg), 100).truncated


@given(st.integers(0, 2**32 - 1))
def test_entry_digit_map_matches_digitwise(seed):
    rng = random.Random(seed)
    A = TrivialRing(9)
    Q = quotient_ring(A, ideal(A, [A.element(3)]))
    src, dst = FiniteMatrixAlgebra(A, trivial_family(3)), FiniteMatrixAlgebra(Q, trivial_family(3))
    maps = entry_map(src, dst, Q.reduce)
    cs, cd = Codec(src), Codec(dst)
    codes = [tuple(rng.randrange(s) for s in src.sizes) for _ in range(20)]
    got = entry_digit_map(cs, cd, maps)(cs.pack(np.array(codes)))
    want = cd.pack(np.array([apply_entry_map(maps, c) for c in codes]))
    assert np.array_equal(got, want)


@pytest.mark.parametrize("ring, fam", CASES)
def test_monomial_left_multiplication(ring, fam):
    alg = FiniteMatrixAlgebra(ring, fam)
    codec = Codec(alg)
    rng = random.Random(7)
    monos = monomial_elements(alg)
    assert monos and all(alg.is_invertible(code) for code, _ in monos)
    xs = np.array([tuple(rng.randrange(s) for s in alg.sizes) for _ in range(30)], dtype=np.int64)
    for t, perm in monos[:: max(1, len(monos) // 5)]:
        got = left_monomial_map(codec, t, perm)(codec.pack(xs))
        assert np.array_equal(got, codec.pack(alg.batch_mul_left(t, xs)))
