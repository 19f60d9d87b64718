import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gradedk1.algebra import FiniteMatrixAlgebra
from gradedk1.errors import TruncatedError
from gradedk1.groups import (
    abelian_invariants,
    commutator_code,
    coset_quotient,
    element_orders,
    elementary_generator,
    enumerated_snapshot,
    generate_group,
    normal_closure,
)
from gradedk1.rings import TrivialRing
from gradedk1.whitehead import evaluate_word

from conftest import trivial_family


def _elementary_gens(alg, values=None):
    n = alg.n
    out = []
    for i, j in itertools.permutations(range(n), 2):
        for r in values or range(1, alg.sizes[i * n + j]):
            out.append(elementary_generator(alg, i, j, r))
    return out


def _cyclic_product_table(orders):
    elts = list(itertools.product(*[range(n) for n in orders]))
    index = {g: k for k, g in enumerate(elts)}
    table = [[index[tuple((a + b) % n for a, b, n in zip(g, h, orders))] for h in elts] for g in elts]
    return table, index[(0,) * len(orders)]


@pytest.mark.parametrize(
    "orders, invariants",
    [((2,), [2]), ((2, 3), [6]), ((4, 2), [2, 4]), ((2, 2, 2), [2, 2, 2]), ((6, 4), [2, 12]), ((9, 3, 3), [3, 3, 9])],
)
def test_abelian_invariants_oracles(orders, invariants):
    table, ident = _cyclic_product_table(orders)
    assert abelian_invariants(table, ident) == invariants


@given(st.lists(st.integers(2, 6), min_size=1, max_size=3))
def test_invariant_factors_divide_and_multiply_out(orders):
    table, ident = _cyclic_product_table(orders)
    inv = abelian_invariants(table, ident)
    total = 1
    for n in orders:
        total *= n
    prod = 1
    for n in inv:
        prod *= n
    assert prod == total
    assert all(b % a == 0 for a, b in zip(inv, inv[1:]))
    assert max(element_orders(table, ident)) == (inv[-1] if inv else 1)


def test_trivial_group_has_no_invariants():
    assert abelian_invariants([[0]], 0) == []


@pytest.mark.parametrize("modulus, size, order", [(2, 2, 6), (2, 3, 168), (3, 2, 24), (4, 2, 48)])
def test_elementary_closure_is_sl(modulus, size, order):
    # over local rings E_n = SL_n
    alg = FiniteMatrixAlgebra(TrivialRing(modulus), trivial_family(size))
    snap = generate_group(alg, _elementary_gens(alg), cap=10**6)
    assert not snap.truncated and snap.order == order
    assert all(alg.components[alg.d0][alg.det(c)].is_one() for c in snap.elements)


def test_words_evaluate_to_their_elements():
    alg = FiniteMatrixAlgebra(TrivialRing(3), trivial_family(2))
    snap = generate_group(alg, _elementary_gens(alg), cap=10**6)
    for k in range(0, snap.order, 5):
        m = snap.matrix(k)
        assert evaluate_word(snap.word(m), alg.ring) == m


def test_parallel_closure_is_identical():
    alg = FiniteMatrixAlgebra(TrivialRing(4), trivial_family(2))
    one = generate_group(alg, _elementary_gens(alg), cap=10**6)
    many = generate_group(alg, _elementary_gens(alg), cap=10**6, workers=4)
    assert one.elements == many.elements and one.parent == many.parent and one.via == many.via


def test_truncation_is_reported():
    alg = FiniteMatrixAlgebra(TrivialRing(3), trivial_family(2))
    snap = generate_group(alg, _elementary_gens(alg), cap=5)
    assert snap.truncated
    with pytest.raises(TruncatedError):
        snap.require_complete()


def test_normal_closure_of_one_transvection():
    # SL_3(F_2) is simple, so a single transvection normally generates it
    alg = FiniteMatrixAlgebra(TrivialRing(2), trivial_family(3))
    gens = _elementary_gens(alg)
    seed = generate_group(alg, gens[:1], cap=10**6)
    assert seed.order == 2
    closed = normal_closure(seed, gens, cap=10**6)
    assert closed.order == 168
    for g in closed.generators:
        assert evaluate_word(closed.word(alg.decode(g.code)), alg.ring) == alg.decode(g.code)


def test_gl_mod_sl_over_f3():
    alg = FiniteMatrixAlgebra(TrivialRing(3), trivial_family(2))
    gl = enumerated_snapshot(alg, alg.enumerate_invertible()[0], False, "GL", 1)
    e = generate_group(alg, _elementary_gens(alg), cap=10**6)
    q = coset_quotient(gl, e)
    assert q.normal and q.abelian and q.invariants == [2]
    assert q.class_of(alg.identity) == q.identity_class()
    labels = [lab for _, chunk in q.labelled_chunks() for lab in chunk.tolist()]
    assert sorted(set(labels)) == [0, 1] and labels.count(0) == e.order


def test_non_normal_subgroup_is_flagged():
    alg = FiniteMatrixAlgebra(TrivialRing(2), trivial_family(2))
    gl = enumerated_snapshot(alg, alg.enumerate_invertible()[0], False, "GL", 1)
    sub = generate_group(alg, _elementary_gens(alg)[:1], cap=10)
    q = coset_quotient(gl, sub)
    assert not q.normal and q.invariants is None and q.obstruction


def test_commutator_of_transvections():
    alg = FiniteMatrixAlgebra(TrivialRing(4), trivial_family(3))
    a = elementary_generator(alg, 0, 1, 1)
    b = elementary_generator(alg, 1, 2, 1)
    assert commutator_code(alg, a, b) == elementary_generator(alg, 0, 2, 1).code
