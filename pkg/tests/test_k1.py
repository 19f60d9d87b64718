import pytest

from gradedk1 import k1
from gradedk1.errors import FamilyError, TruncatedError, WitnessUnavailableError
from gradedk1.groups import generate_group
from gradedk1.grading import cyclic
from gradedk1.matrices import ShiftFamily, diagonal
from gradedk1.rings import GroupRing, TrivialRing, ideal

from conftest import trivial_family

ONE = trivial_family(1)


@pytest.mark.parametrize(
    "modulus, level, invariants",
    [(2, 2, []), (3, 2, [2]), (4, 2, [2]), (5, 2, [4]), (9, 2, [6]), (3, 3, [2]), (8, 2, [2, 2])],
)
def test_k1_of_local_rings_is_the_unit_group(modulus, level, invariants):
    # for a commutative local ring, det identifies K1 with the units
    rep = k1.k1_local(TrivialRing(modulus), ONE, level)
    assert rep.ok and rep.normal and rep.invariants == invariants
    assert rep.gl_order == rep.e_order * rep.order


def test_report_round_trips_to_plain_data(z4):
    d = k1.k1_local(z4, ONE, 2).to_dict()
    assert d["gl_order"] == 96 and d["e_order"] == 48 and d["quotient_order"] == 2
    assert d["representatives"][0] == [[1, 0], [0, 1]]


def test_level_one_has_no_elementary_matrices(z4):
    rep = k1.k1_local(z4, ONE, 1)
    assert rep.e_order == 1 and rep.invariants == [2]


def test_pair_ring_fixture(pair_z4):
    # regression fixture for the non-perfect Z/3-graded example
    fam = ShiftFamily.of(pair_z4.grading, [0, 1, 2])
    gl = k1.gl_group(pair_z4, fam)
    e = k1.elementary_group(pair_z4, fam)
    rep = k1.perfectness_check(e)
    assert (gl.order, e.order, rep.commutator_order) == (64, 8, 1)
    assert not rep.perfect and rep.abelianization == [2, 2, 2]
    assert rep.witness.letter == "e_{1,3}([0,2])"


def test_crossed_product_e3_is_perfect(f3_z2):
    fam = ShiftFamily.of(f3_z2.grading, [0, 1, 0])
    rep = k1.perfectness_check(k1.elementary_group(f3_z2, fam))
    assert rep.perfect and rep.witness is None and rep.e_order == rep.commutator_order


def test_relative_k1_of_f2_group_ring():
    A = TrivialRing(2, (2,))
    aug = ideal(A, [A.parse({"0": 1, "1": 1})])
    rep = k1.k1_relative_local(A, aug, ONE, 2)
    assert rep.invariants == [2]
    contain = k1.relative_containment(A, aug, ONE, 2)
    assert contain["in_congruence"] and contain["in_elementary"]


@pytest.mark.parametrize("modulus, gen, level", [(4, 2, 1), (4, 2, 2), (9, 3, 2), (8, 2, 2)])
def test_relative_k1_agrees_with_double(modulus, gen, level):
    A = TrivialRing(modulus)
    I = ideal(A, [A.element(gen)])
    direct = k1.k1_relative_local(A, I, ONE, level)
    via = k1.k1_relative_via_double(A, I, ONE, level)
    assert direct.invariants == via["invariants"] and direct.order == via["order"]


@pytest.mark.parametrize("modulus, gen, level", [(4, 2, 1), (4, 2, 2), (4, 2, 3), (9, 3, 1), (9, 3, 2), (8, 4, 2)])
def test_exactness_on_truncated_rings(modulus, gen, level):
    A = TrivialRing(modulus)
    rep = k1.check_exactness(A, ideal(A, [A.element(gen)]), ONE, level)
    assert rep.exact and rep.well_defined and rep.homomorphisms
    assert rep.image == rep.kernel


def test_stabilization_of_z4(z4):
    rep = k1.stabilization_check(z4, ONE, [1, 2, 3])
    assert [r.invariants for r in rep.reports] == [[2], [2], [2]]
    assert all(m["iso"] for m in rep.maps) and rep.stable_from == 1


def test_suspension_and_gamma_action(f3_z2):
    fam = ShiftFamily.of(f3_z2.grading, [0, 1])
    lam = f3_z2.grading.element(1)
    out = k1.suspension_check(f3_z2, fam, lam)
    assert out["same_invariants"] and out["bijective"] and out["homomorphism"]
    assert k1.gamma_action_check(f3_z2, fam, lam)["compatible"]


def test_crossed_product_certificate(f3_z2):
    fam = ShiftFamily.of(f3_z2.grading, [0, 1])
    lam = f3_z2.grading.element(1)
    h = diagonal(f3_z2, fam, [f3_z2.element(2, f3_z2.grading.zero()), f3_z2.one()])
    cert = k1.crossed_product_triviality_check(f3_z2, fam, lam, h)
    assert cert.verified and cert.notes["conjugate_equals_translate"]
    with pytest.raises(FamilyError):
        k1.crossed_product_triviality_check(f3_z2, fam.repeat(2), lam, h)


def test_pair_ring_is_not_a_crossed_product(pair_z4):
    fam = ShiftFamily.of(pair_z4.grading, [0])
    h = diagonal(pair_z4, fam, [pair_z4.one()])
    with pytest.raises(WitnessUnavailableError):
        k1.crossed_product_triviality_check(pair_z4, fam, pair_z4.grading.element(1), h)


def test_inclusion_and_gamma_classes(f3_z2):
    small = ShiftFamily.of(f3_z2.grading, [1])
    big = ShiftFamily.of(f3_z2.grading, [0, 1])
    cls = k1.K1Class(diagonal(f3_z2, small, [f3_z2.element(2, f3_z2.grading.zero())]))
    moved = k1.inclusion_map(cls, big)
    assert moved.family == big and moved.representative[1, 1] == f3_z2.element(2, f3_z2.grading.zero())
    assert k1.gamma_action(cls, f3_z2.grading.element(1)).family == ShiftFamily.of(f3_z2.grading, [0])


def test_truncation_is_raised(z4):
    with pytest.raises(TruncatedError):
        k1.k1_local(TrivialRing(3), trivial_family(1), 3, cap=100)


def test_huge_spaces_are_truncated_not_attempted():
    A = GroupRing(3, cyclic(2))
    gl = k1.gl_group(A, ShiftFamily.of(A.grading, [0, 1]), level=3)
    assert gl.truncated and "exhaustive limit" in gl.reason


def test_dense_backend_route():
    # 3^16 candidates: enumerated and closed densely, no words
    A = TrivialRing(3)
    gl = k1.gl_group(A, ONE, 4, cap=10**8)
    assert getattr(gl, "dense", False) and gl.order == 24261120


@pytest.mark.parametrize("modulus, size", [(9, 2), (4, 3), (8, 2)])
def test_additive_generators_span_the_same_group(modulus, size):
    alg = k1.algebra(TrivialRing(modulus), trivial_family(size))
    full = k1.elementary_generators(alg, additive=False)
    short = k1.elementary_generators(alg)
    assert len(short) < len(full)
    # e_ij(a) e_ij(b) = e_ij(a + b), so an additive basis per entry suffices
    assert set(generate_group(alg, short, cap=10**6).elements) == set(generate_group(alg, full, cap=10**6).elements)
