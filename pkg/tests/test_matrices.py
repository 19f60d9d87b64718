import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gradedk1.errors import DegreeError, FamilyError, NotInvertibleError
from gradedk1.grading import INTEGERS, cyclic
from gradedk1.matrices import (
    ElementaryGenerator,
    ShiftFamily,
    block_diag,
    commutator,
    elementary_matrix,
    embed,
    identity,
    invert,
    is_invertible,
    matmul,
    matrix_from_entries,
    pad_to,
    reduce_mod_ideal,
    stabilize,
    suspend_family,
)
from gradedk1.rings import GroupRing, LaurentRing, PairRing, TrivialRing, ideal
from gradedk1.sampling import random_family, random_grade, random_invertible, random_matrix

RINGS = [TrivialRing(4), GroupRing(3, cyclic(2)), PairRing(4, 2), LaurentRing(3)]


def _law_holds(m):
    return all(m[i, j].degree == m.degree + m.family[i] - m.family[j] or m[i, j].is_zero() for i in range(m.n) for j in range(m.n))


@given(st.sampled_from(RINGS), st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_products_obey_the_degree_law(ring, size, seed):
    rng = random.Random(seed)
    fam = random_family(ring.grading, size, rng)
    d1, d2 = random_grade(ring.grading, rng), random_grade(ring.grading, rng)
    p = matmul(random_matrix(ring, fam, d1, rng), random_matrix(ring, fam, d2, rng))
    assert p.degree == d1 + d2
    assert _law_holds(p)


@given(st.sampled_from(RINGS), st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_inverse_of_random_invertible(ring, size, seed):
    rng = random.Random(seed)
    fam = random_family(ring.grading, size, rng)
    m = random_invertible(ring, fam, rng)
    assert is_invertible(m)
    assert matmul(m, invert(m)).is_identity()
    assert matmul(invert(m), m).is_identity()


@given(st.sampled_from(RINGS[:3]), st.integers(0, 2**32 - 1))
def test_matmul_is_associative(ring, seed):
    rng = random.Random(seed)
    fam = random_family(ring.grading, 3, rng)
    a, b, c = (random_matrix(ring, fam, ring.grading.zero(), rng) for _ in range(3))
    assert matmul(matmul(a, b), c) == matmul(a, matmul(b, c))


def test_entry_of_wrong_degree_is_rejected(laurent2):
    fam = ShiftFamily.of(INTEGERS, [0, 1])
    with pytest.raises(DegreeError):
        matrix_from_entries(laurent2, fam, None, [[laurent2.one(), laurent2.x(1)], [None, laurent2.one()]])


def test_elementary_generator_checks_indices(laurent2):
    fam = ShiftFamily.of(INTEGERS, [0, 1])
    with pytest.raises(FamilyError):
        ElementaryGenerator(fam, 0, 0, laurent2.one())
    with pytest.raises(DegreeError):
        ElementaryGenerator(fam, 0, 1, laurent2.x(1))
    assert ElementaryGenerator(fam, 0, 1, laurent2.x(-1)).inverse().r == -laurent2.x(-1)


def test_empty_family_is_rejected():
    with pytest.raises(FamilyError):
        ShiftFamily.of(INTEGERS, [])


def test_singular_matrix_has_no_inverse(z4):
    fam = ShiftFamily.of(z4.grading, [(), ()])
    two = z4.element(2)
    m = matrix_from_entries(z4, fam, None, [[two, None], [None, z4.one()]])
    assert not is_invertible(m)
    with pytest.raises(NotInvertibleError):
        invert(m)


def test_stabilize_pad_and_embed_agree(f3_z2):
    fam = ShiftFamily.of(f3_z2.grading, [0, 1])
    e = elementary_matrix(f3_z2, fam, 0, 1, {"1": 2})
    big = fam.repeat(2)
    assert stabilize(e, 2) == pad_to(e, big) == embed(e, big, [0, 1])
    assert block_diag(e, identity(f3_z2, fam)) == stabilize(e, 2)


def test_suspension_keeps_entries(f3_z2):
    fam = ShiftFamily.of(f3_z2.grading, [0, 1])
    e = elementary_matrix(f3_z2, fam, 1, 0, {"1": 1})
    lam = f3_z2.grading.element(1)
    s = suspend_family(e, lam)
    assert s.family == fam.shifted(lam)
    assert s.entries == e.entries


def test_reduction_mod_ideal(z4):
    fam = ShiftFamily.of(z4.grading, [(), ()])
    m = elementary_matrix(z4, fam, 0, 1, 2)
    assert reduce_mod_ideal(m, ideal(z4, [z4.element(2)])).is_identity()


def test_commutator_of_commuting_elementaries(z4):
    fam = ShiftFamily.of(z4.grading, [(), (), ()])
    a = elementary_matrix(z4, fam, 0, 1, 1)
    b = elementary_matrix(z4, fam, 0, 2, 3)
    assert commutator(a, b).is_identity()
    # [e_12(1), e_23(1)] = e_13(1)
    c = commutator(a, elementary_matrix(z4, fam, 1, 2, 1))
    assert c == elementary_matrix(z4, fam, 0, 2, 1)
