import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gradedk1.algebra import FiniteMatrixAlgebra, apply_entry_map, entry_map
from gradedk1.errors import UnsupportedOperationError
from gradedk1.grading import cyclic
from gradedk1.matrices import ShiftFamily, invert, matmul
from gradedk1.rings import GroupRing, PairRing, TrivialRing, ideal, quotient_ring
from gradedk1.sampling import random_family, random_invertible, random_matrix

from conftest import trivial_family

ALGEBRAS = [
    FiniteMatrixAlgebra(TrivialRing(4), trivial_family(2)),
    FiniteMatrixAlgebra(GroupRing(3, cyclic(2)), ShiftFamily.of(cyclic(2), [0, 1, 1])),
    FiniteMatrixAlgebra(PairRing(4, 2), ShiftFamily.of(cyclic(3), [0, 1, 2])),
]


def _random_code(alg, rng):
    return tuple(rng.randrange(s) for s in alg.sizes)


@given(st.sampled_from(ALGEBRAS), st.integers(0, 2**32 - 1))
def test_encode_decode_and_multiplication(alg, seed):
    rng = random.Random(seed)
    a, b = _random_code(alg, rng), _random_code(alg, rng)
    assert alg.encode(alg.decode(a)) == a
    assert alg.mul(a, b) == alg.encode(matmul(alg.decode(a), alg.decode(b)))
    batch = np.array([b, a], dtype=np.int64)
    assert [tuple(r) for r in alg.batch_mul_left(a, batch).tolist()] == [alg.mul(a, b), alg.mul(a, a)]


@given(st.sampled_from(ALGEBRAS), st.integers(0, 2**32 - 1))
def test_determinant_and_inverse(alg, seed):
    rng = random.Random(seed)
    m = random_invertible(alg.ring, alg.family, rng)
    code = alg.encode(m)
    assert alg.is_invertible(code)
    assert alg.inverse(code) == alg.encode(invert(m))
    assert alg.mul(code, alg.inverse(code)) == alg.identity
    x = _random_code(alg, rng)
    assert alg.decode(x).det() == alg.components[alg.d0][alg.det(x)]


@given(st.sampled_from(ALGEBRAS), st.integers(0, 2**32 - 1), st.data())
def test_elementary_actions(alg, seed, data):
    rng = random.Random(seed)
    a = _random_code(alg, rng)
    i, j = data.draw(st.sampled_from([(i, j) for i in range(alg.n) for j in range(alg.n) if i != j]))
    r = data.draw(st.integers(0, alg.sizes[i * alg.n + j] - 1))
    e = alg.mul_elementary_right(alg.identity, i, j, r)
    assert alg.mul_elementary_right(a, i, j, r) == alg.mul(a, e)
    assert alg.mul_elementary_left(a, i, j, r) == alg.mul(e, a)


@pytest.mark.parametrize(
    "ring, size, order",
    [
        (TrivialRing(2), 2, 6),
        (TrivialRing(2), 3, 168),
        (TrivialRing(3), 2, 48),
        (TrivialRing(4), 2, 96),  # |GL_2(F_2)| * 2^4
        (TrivialRing(9), 2, 3888),  # |GL_2(F_3)| * 3^4
    ],
)
def test_enumeration_matches_closed_forms(ring, size, order):
    alg = FiniteMatrixAlgebra(ring, trivial_family(size))
    codes, truncated = alg.enumerate_invertible()
    assert not truncated and len(codes) == order
    assert codes == sorted(codes)


def test_enumeration_truncates_at_cap():
    alg = FiniteMatrixAlgebra(TrivialRing(3), trivial_family(2))
    codes, truncated = alg.enumerate_invertible(cap=10)
    assert truncated and len(codes) == 11


def test_entry_map_is_reduction():
    A = TrivialRing(4)
    Q = quotient_ring(A, ideal(A, [A.element(2)]))
    src, dst = FiniteMatrixAlgebra(A, trivial_family(2)), FiniteMatrixAlgebra(Q, trivial_family(2))
    maps = entry_map(src, dst, Q.reduce)
    for code in src.enumerate_invertible()[0]:
        assert dst.is_invertible(apply_entry_map(maps, code))


def test_infinite_components_are_refused(laurent2):
    with pytest.raises(UnsupportedOperationError):
        FiniteMatrixAlgebra(laurent2, random_family(laurent2.grading, 2, random.Random(0)))


def test_random_matrix_round_trip():
    rng = random.Random(3)
    alg = ALGEBRAS[2]
    m = random_matrix(alg.ring, alg.family, alg.family.grading.zero(), rng)
    assert alg.decode(alg.encode(m)) == m
