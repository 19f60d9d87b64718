"""Random well-typed instances for fuzzing certificates and degree laws."""

from __future__ import annotations

import random

from .errors import WitnessUnavailableError
from .grading import GradeElement, GradeGroup
from .matrices import ElementaryGenerator, GradedMatrix, ShiftFamily, diagonal, elementary, identity, matmul
from .rings import GradedRing, HomogeneousElement

# exponent window for laurent samples
LAURENT_SPAN = 3


def random_grade(group: GradeGroup, rng: random.Random, span: int = 2) -> GradeElement:
    free = [rng.randint(-span, span) for _ in range(group.free_rank)]
    tors = [rng.randrange(n) for n in group.torsion_orders]
    return group.element(*free, *tors)


def random_element(ring: GradedRing, degree: GradeElement, rng: random.Random) -> HomogeneousElement:
    if ring.component_is_finite:
        return rng.choice(ring.component(degree))
    return ring.element(rng.randrange(ring.modulus), degree)


def random_nonzero(ring: GradedRing, degree: GradeElement, rng: random.Random) -> HomogeneousElement:
    if ring.component_is_finite:
        comp = [x for x in ring.component(degree) if not x.is_zero()]
        if not comp:
            return ring.zero(degree)
        return rng.choice(comp)
    return ring.element(rng.randrange(1, ring.modulus), degree)


def random_unit(ring: GradedRing, degree: GradeElement, rng: random.Random) -> HomogeneousElement:
    """A random invertible element of the given degree, or WitnessUnavailableError."""
    if ring.component_is_finite:
        units = ring.units(degree)
        if not units:
            raise WitnessUnavailableError(f"no unit of degree {degree}")
        return rng.choice(units)
    return ring.element(rng.randrange(1, ring.modulus), degree)


def unit_degrees(ring: GradedRing, rng: random.Random, tries: int = 8) -> GradeElement:
    """A random degree that carries a unit (degree 0 always does)."""
    for _ in range(tries):
        d = random_grade(ring.grading, rng)
        try:
            random_unit(ring, d, rng)
            return d
        except WitnessUnavailableError:
            continue
    return ring.grading.zero()


def random_family(grading: GradeGroup, size: int, rng: random.Random) -> ShiftFamily:
    return ShiftFamily(grading, tuple(random_grade(grading, rng) for _ in range(size)))


def random_generator(ring: GradedRing, family: ShiftFamily, rng: random.Random) -> ElementaryGenerator:
    n = len(family)
    i, j = rng.sample(range(n), 2)
    return ElementaryGenerator(family, i, j, random_element(ring, family.entry_degree(i, j), rng))


def random_matrix(ring: GradedRing, family: ShiftFamily, degree: GradeElement, rng: random.Random) -> GradedMatrix:
    """Any matrix obeying the degree law (not necessarily invertible)."""
    n = len(family)
    rows = [[random_element(ring, degree + family[i] - family[j], rng) for j in range(n)] for i in range(n)]
    return GradedMatrix(ring, family, degree, rows)


def random_invertible(ring: GradedRing, family: ShiftFamily, rng: random.Random, length: int = 6) -> GradedMatrix:
    """A diagonal unit matrix times a random elementary word."""
    m = diagonal(ring, family, [random_unit(ring, ring.grading.zero(), rng) for _ in family])
    if len(family) < 2:
        return m
    for _ in range(length):
        m = matmul(m, elementary(random_generator(ring, family, rng)))
    return m


def random_invertible_or_identity(ring: GradedRing, family: ShiftFamily, rng: random.Random) -> GradedMatrix:
    try:
        return random_invertible(ring, family, rng)
    except WitnessUnavailableError:
        return identity(ring, family)
