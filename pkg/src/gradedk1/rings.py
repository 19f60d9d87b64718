"""Graded rings with exact homogeneous arithmetic.

Every ring here is commutative and unital. A ring element is always
homogeneous: a :class:`HomogeneousElement` carries its degree and a
kind-specific payload that is canonical within its component, so equality is
structural.

Payloads by kind:

* ``trivial``: residue ``int`` (or a coefficient tuple indexed by the elements
  of an ungraded coefficient group when one is given)
* ``laurent`` / ``group-ring``: the coefficient ``c`` of ``c * u_degree``
* ``pair``: the pair ``(r, a)``
* ``quotient``: the least representative of the coset, as a base payload
* ``double``: the pair ``(x, y)`` of base payloads
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Any, Iterable

from .errors import (
    DegreeError,
    IdealError,
    RingMismatchError,
    UnsupportedOperationError,
    WitnessUnavailableError,
)
from .grading import INTEGERS, TRIVIAL, GradeElement, GradeGroup, cyclic


class HomogeneousElement:
    """A ring element living in a single graded component."""

    __slots__ = ("ring", "degree", "payload")

    def __init__(self, ring: GradedRing, degree: GradeElement, payload: Any):
        self.ring = ring
        self.degree = degree
        self.payload = payload

    def _same_ring(self, other: HomogeneousElement):
        if self.ring is not other.ring and self.ring != other.ring:
            raise RingMismatchError(f"elements of different rings: {self.ring} vs {other.ring}")

    def __add__(self, other: HomogeneousElement) -> HomogeneousElement:
        self._same_ring(other)
        if self.degree != other.degree:
            if self.is_zero():
                return other
            if other.is_zero():
                return self
            raise DegreeError(
                f"cannot add elements of degree {self.degree} and {other.degree}",
                left=self.degree,
                right=other.degree,
            )
        return HomogeneousElement(
            self.ring, self.degree, self.ring._add(self.degree, self.payload, other.payload)
        )

    def __neg__(self) -> HomogeneousElement:
        return HomogeneousElement(self.ring, self.degree, self.ring._neg(self.degree, self.payload))

    def __sub__(self, other: HomogeneousElement) -> HomogeneousElement:
        return self + (-other)

    def __mul__(self, other: HomogeneousElement) -> HomogeneousElement:
        self._same_ring(other)
        deg = self.degree + other.degree
        return HomogeneousElement(
            self.ring, deg, self.ring._mul(self.degree, self.payload, other.degree, other.payload, deg)
        )

    def is_zero(self) -> bool:
        return self.payload == self.ring._zero_payload(self.degree)

    def is_one(self) -> bool:
        return self.degree.is_zero() and self.payload == self.ring._one_payload()

    def inverse(self) -> HomogeneousElement:
        return self.ring.unit_inverse(self)

    def literal(self):
        return self.ring.format_literal(self)

    def __eq__(self, other):
        if not isinstance(other, HomogeneousElement):
            return NotImplemented
        return (
            self.payload == other.payload
            and self.degree == other.degree
            and (self.ring is other.ring or self.ring == other.ring)
        )

    def __hash__(self):
        return hash((self.degree, self.payload))

    def __repr__(self):
        return f"<{self.ring.kind} deg={self.degree} {self.payload!r}>"

    def __str__(self):
        return self.ring.format_str(self)


def _cache_field():
    return field(default_factory=dict, init=False, repr=False, compare=False, hash=False)


class GradedRing:
    """Common interface; subclasses implement the payload-level hooks."""

    kind: str = ""
    component_is_finite: bool = True
    is_commutative: bool = True

    # payload hooks -------------------------------------------------------
    def _zero_payload(self, deg: GradeElement):
        raise NotImplementedError

    def _one_payload(self):
        raise NotImplementedError

    def _add(self, deg, a, b):
        raise NotImplementedError

    def _neg(self, deg, a):
        raise NotImplementedError

    def _mul(self, d1, a, d2, b, d):
        raise NotImplementedError

    def _component_payloads(self, deg: GradeElement) -> list:
        raise NotImplementedError

    def _member(self, deg: GradeElement, payload) -> bool:
        raise NotImplementedError

    def _parse(self, literal) -> tuple[GradeElement | None, Any]:
        raise NotImplementedError

    def _format(self, deg, payload):
        raise NotImplementedError

    # public API ----------------------------------------------------------
    def element(self, payload, degree: GradeElement | None = None) -> HomogeneousElement:
        if degree is None:
            degree = self.grading.zero()
        if degree.group != self.grading:
            raise DegreeError(f"degree {degree} is not in the grading group {self.grading}")
        payload = self._normalize(degree, payload)
        if not self._member(degree, payload):
            raise DegreeError(
                f"{payload!r} is not an element of the degree {degree} component of {self}",
                degree=degree,
            )
        return HomogeneousElement(self, degree, payload)

    def _normalize(self, deg, payload):
        return payload

    def zero(self, degree: GradeElement | None = None) -> HomogeneousElement:
        if degree is None:
            degree = self.grading.zero()
        return HomogeneousElement(self, degree, self._zero_payload(degree))

    def one(self) -> HomogeneousElement:
        return HomogeneousElement(self, self.grading.zero(), self._one_payload())

    def component(self, degree: GradeElement) -> list[HomogeneousElement]:
        """Every element of the degree-``degree`` component, zero first."""
        if not self.component_is_finite:
            raise UnsupportedOperationError(f"{self.kind} ring has infinite components")
        cache = self._cache.setdefault("component", {})
        if degree not in cache:
            cache[degree] = [
                HomogeneousElement(self, degree, p) for p in self._component_payloads(degree)
            ]
        return cache[degree]

    def component_size(self, degree: GradeElement) -> int:
        return len(self.component(degree))

    def units(self, degree: GradeElement | None = None) -> list[HomogeneousElement]:
        if degree is None:
            degree = self.grading.zero()
        return [x for x in self.component(degree) if self.is_unit(x)]

    def is_unit(self, x: HomogeneousElement) -> bool:
        try:
            self.unit_inverse(x)
        except UnsupportedOperationError:
            return False
        return True

    def unit_inverse(self, x: HomogeneousElement) -> HomogeneousElement:
        """Inverse of a homogeneous unit; it lives in degree ``-deg x``."""
        cache = self._cache.setdefault("inverse", {})
        key = (x.degree, x.payload)
        if key not in cache:
            one = self.one()
            inv = None
            if self.component_is_finite:
                for y in self.component(-x.degree):
                    if x * y == one:
                        inv = y
                        break
            else:
                inv = self._direct_inverse(x)
            cache[key] = inv
        inv = cache[key]
        if inv is None:
            raise UnsupportedOperationError(f"{x} is not invertible")
        return inv

    def _direct_inverse(self, x):
        return None

    def invertible_element(self, degree: GradeElement) -> HomogeneousElement:
        """Some invertible homogeneous element of the given degree."""
        if self.component_is_finite:
            for x in self.component(degree):
                if not x.is_zero() and self.is_unit(x):
                    return x
        raise WitnessUnavailableError(f"no invertible homogeneous element of degree {degree}")

    def parse(self, literal, degree: GradeElement | None = None) -> HomogeneousElement:
        """Parse an element literal; a degree carried by the literal must match ``degree``."""
        inferred, payload = self._parse(literal)
        if inferred is None:
            if degree is None:
                degree = self.grading.zero()
        elif degree is not None and inferred != degree:
            raise DegreeError(
                f"literal {literal!r} has degree {inferred}, expected {degree}",
                expected=degree,
                actual=inferred,
            )
        else:
            degree = inferred
        return self.element(payload, degree)

    def format_literal(self, x: HomogeneousElement):
        return self._format(x.degree, x.payload)

    def format_str(self, x: HomogeneousElement) -> str:
        return str(self._format(x.degree, x.payload)).replace(" ", "")

    def describe(self) -> dict:
        raise NotImplementedError

    def __str__(self):
        return self.name()

    def name(self) -> str:
        return self.kind


# ---------------------------------------------------------------------------
# concrete kinds


def _group_elements(orders: tuple[int, ...]) -> list[tuple[int, ...]]:
    return list(itertools.product(*(range(n) for n in orders)))


@dataclass(frozen=True, eq=True)
class TrivialRing(GradedRing):
    """Z/m, or the ungraded group ring Z/m[G] for a finite abelian G, sitting in degree 0."""

    modulus: int
    coefficient_group: tuple[int, ...] = ()
    grading: GradeGroup = TRIVIAL
    _cache: dict = _cache_field()

    kind = "trivial"

    def __post_init__(self):
        if self.modulus < 2:
            raise ValueError("modulus must be >= 2")
        object.__setattr__(self, "coefficient_group", tuple(self.coefficient_group))
        if self.coefficient_group:
            elts = _group_elements(self.coefficient_group)
            index = {g: k for k, g in enumerate(elts)}
            add = [
                [index[tuple((a + b) % n for a, b, n in zip(g, h, self.coefficient_group))] for h in elts]
                for g in elts
            ]
            self._cache["group"] = (elts, index, add)

    @property
    def _plain(self) -> bool:
        return not self.coefficient_group

    def _zero_payload(self, deg):
        return 0 if self._plain else (0,) * len(self._cache["group"][0])

    def _one_payload(self):
        if self._plain:
            return 1 % self.modulus
        return (1,) + (0,) * (len(self._cache["group"][0]) - 1)

    def _normalize(self, deg, payload):
        m = self.modulus
        if self._plain:
            return int(payload) % m
        return tuple(int(c) % m for c in payload)

    def _member(self, deg, payload):
        if deg.is_zero():
            if self._plain:
                return isinstance(payload, int)
            return len(payload) == len(self._cache["group"][0])
        return payload == self._zero_payload(deg)

    def _add(self, deg, a, b):
        m = self.modulus
        if self._plain:
            return (a + b) % m
        return tuple((x + y) % m for x, y in zip(a, b))

    def _neg(self, deg, a):
        m = self.modulus
        if self._plain:
            return -a % m
        return tuple(-x % m for x in a)

    def _mul(self, d1, a, d2, b, d):
        m = self.modulus
        if not d.is_zero():
            return self._zero_payload(d)
        if not (d1.is_zero() and d2.is_zero()):
            return self._zero_payload(d)
        if self._plain:
            return a * b % m
        _, _, add = self._cache["group"]
        out = [0] * len(a)
        for i, x in enumerate(a):
            if x:
                row = add[i]
                for j, y in enumerate(b):
                    if y:
                        out[row[j]] += x * y
        return tuple(c % m for c in out)

    def _component_payloads(self, deg):
        if not deg.is_zero():
            return [self._zero_payload(deg)]
        if self._plain:
            return list(range(self.modulus))
        size = len(self._cache["group"][0])
        return list(itertools.product(range(self.modulus), repeat=size))

    def _parse(self, literal):
        if self._plain:
            if not isinstance(literal, int) or isinstance(literal, bool):
                raise DegreeError(f"expected an integer residue, got {literal!r}")
            v = literal % self.modulus
            return (self.grading.zero() if v else None), v
        elts, index, _ = self._cache["group"]
        coeffs = [0] * len(elts)
        if isinstance(literal, int) and not isinstance(literal, bool):
            coeffs[0] = literal
        elif isinstance(literal, dict):
            for key, c in literal.items():
                g = _parse_group_key(key, len(self.coefficient_group))
                g = tuple(a % n for a, n in zip(g, self.coefficient_group))
                coeffs[index[g]] += int(c)
        else:
            raise DegreeError(f"expected a coefficient table, got {literal!r}")
        payload = tuple(c % self.modulus for c in coeffs)
        return (self.grading.zero() if any(payload) else None), payload

    def _format(self, deg, payload):
        if self._plain:
            return payload
        elts = self._cache["group"][0]
        return {_group_key(g): c for g, c in zip(elts, payload) if c}

    def describe(self):
        out = {"kind": self.kind, "modulus": self.modulus}
        if self.coefficient_group:
            out["coefficient_group"] = list(self.coefficient_group)
        if not self.grading.is_trivial:
            out["grading"] = self.grading.describe()
        return out

    def name(self):
        base = f"Z/{self.modulus}"
        if self.coefficient_group:
            base += "[" + "x".join(f"Z/{n}" for n in self.coefficient_group) + "]"
        return base


def _group_key(g: tuple[int, ...]) -> str:
    return ",".join(str(c) for c in g)


def _parse_group_key(key, rank: int) -> tuple[int, ...]:
    if isinstance(key, int):
        parts = (key,)
    else:
        parts = tuple(int(p) for p in str(key).strip("[]() ").split(",") if p.strip())
    if len(parts) != rank:
        raise DegreeError(f"group element key {key!r} needs {rank} components")
    return parts


@dataclass(frozen=True, eq=True)
class GroupRing(GradedRing):
    """Crossed product Z/m[Gamma] with trivial action and cocycle, graded by Gamma.

    The degree-gamma component is ``Z/m * u_gamma``; ``u_gamma`` is invertible
    for every gamma, so the ring is a crossed product.
    """

    modulus: int
    grading: GradeGroup = field(default_factory=lambda: cyclic(2))
    _cache: dict = _cache_field()

    kind = "group-ring"

    def __post_init__(self):
        if self.modulus < 2:
            raise ValueError("modulus must be >= 2")

    def _zero_payload(self, deg):
        return 0

    def _one_payload(self):
        return 1 % self.modulus

    def _normalize(self, deg, payload):
        return int(payload) % self.modulus

    def _member(self, deg, payload):
        return isinstance(payload, int)

    def _add(self, deg, a, b):
        return (a + b) % self.modulus

    def _neg(self, deg, a):
        return -a % self.modulus

    def _mul(self, d1, a, d2, b, d):
        return a * b % self.modulus

    def _component_payloads(self, deg):
        return list(range(self.modulus))

    def _direct_inverse(self, x):
        if math.gcd(x.payload, self.modulus) != 1:
            return None
        return HomogeneousElement(self, -x.degree, pow(x.payload, -1, self.modulus))

    def unit_inverse(self, x):
        inv = self._direct_inverse(x)
        if inv is None:
            raise UnsupportedOperationError(f"{x} is not invertible")
        return inv

    def invertible_element(self, degree):
        return HomogeneousElement(self, degree, 1 % self.modulus)

    def unit(self, degree: GradeElement) -> HomogeneousElement:
        """The group element ``u_degree``."""
        return HomogeneousElement(self, degree, 1 % self.modulus)

    def _parse(self, literal):
        if isinstance(literal, int) and not isinstance(literal, bool):
            v = literal % self.modulus
            return (self.grading.zero() if v else None), v
        if isinstance(literal, dict):
            items = [(k, int(c) % self.modulus) for k, c in literal.items()]
            items = [(k, c) for k, c in items if c]
            if not items:
                return None, 0
            if len(items) > 1:
                raise DegreeError(f"literal {literal!r} is not homogeneous")
            key, c = items[0]
            return self.grading.element(*_parse_group_key(key, self.grading.rank)), c
        raise DegreeError(f"expected a coefficient table, got {literal!r}")

    def _format(self, deg, payload):
        return {_group_key(deg.components): payload} if payload else {}

    def format_str(self, x):
        if not x.payload:
            return "0"
        if x.degree.is_zero():
            return str(x.payload)
        return f"{x.payload}*u{list(x.degree.components)}".replace(" ", "")

    def describe(self):
        return {"kind": self.kind, "modulus": self.modulus, "grading": self.grading.describe()}

    def name(self):
        return f"Z/{self.modulus}[{self.grading}]"


@dataclass(frozen=True, eq=True)
class LaurentRing(GroupRing):
    """F_q[x, x^-1] graded by Z with ``deg x = 1``; q must be prime."""

    modulus: int = 2
    grading: GradeGroup = INTEGERS
    _cache: dict = _cache_field()

    kind = "laurent"
    component_is_finite = False

    def __post_init__(self):
        q = self.modulus
        if q < 2 or any(q % p == 0 for p in range(2, math.isqrt(q) + 1)):
            raise ValueError(f"laurent coefficients need a prime field order, got {q}")
        if self.grading != INTEGERS:
            raise ValueError("laurent rings are graded by Z")

    @property
    def field_order(self) -> int:
        return self.modulus

    def x(self, exponent: int = 1, coefficient: int = 1) -> HomogeneousElement:
        return self.element(coefficient, self.grading.element(exponent))

    def _parse(self, literal):
        if isinstance(literal, (list, tuple)) and len(literal) == 2:
            c, e = int(literal[0]) % self.modulus, int(literal[1])
            return (self.grading.element(e) if c else None), c
        if isinstance(literal, int) and not isinstance(literal, bool):
            v = literal % self.modulus
            return (self.grading.zero() if v else None), v
        raise DegreeError(f"expected [coefficient, exponent], got {literal!r}")

    def _format(self, deg, payload):
        return [payload, deg.free[0]]

    def format_str(self, x):
        c, e = x.payload, x.degree.free[0]
        if c == 0:
            return "0"
        if e == 0:
            return str(c)
        mono = "x" if e == 1 else f"x^{e}"
        return mono if c == 1 else f"{c}{mono}"

    def describe(self):
        return {"kind": self.kind, "field": self.modulus}

    def name(self):
        return f"F_{self.modulus}[x,x^-1]"


@dataclass(frozen=True, eq=True)
class PairRing(GradedRing):
    """The ring (R, I) with R = Z/m, I = dZ/m and (r1,a1)(r2,a2) = (r1r2, r1a2 + r2a1).

    Z/3-graded: (R, 0) in degree 0, (0, I) in degree 1, zero in degree 2.
    """

    modulus: int
    ideal_generator: int
    grading: GradeGroup = field(default_factory=lambda: cyclic(3), init=False)
    _cache: dict = _cache_field()

    kind = "pair"

    def __post_init__(self):
        m, d = self.modulus, self.ideal_generator
        if m < 2 or d < 0 or (d and m % d):
            raise ValueError(f"need d | m for the pair ring, got m={m}, d={d}")

    @property
    def ideal_step(self) -> int:
        return math.gcd(self.ideal_generator, self.modulus) or self.modulus

    def _level(self, deg) -> int:
        return deg.torsion[0]

    def _zero_payload(self, deg):
        return (0, 0)

    def _one_payload(self):
        return (1 % self.modulus, 0)

    def _normalize(self, deg, payload):
        r, a = payload
        return (int(r) % self.modulus, int(a) % self.modulus)

    def _member(self, deg, payload):
        r, a = payload
        lvl = self._level(deg)
        if lvl == 0:
            return a == 0
        if lvl == 1:
            return r == 0 and a % self.ideal_step == 0
        return payload == (0, 0)

    def _add(self, deg, p, q):
        m = self.modulus
        return ((p[0] + q[0]) % m, (p[1] + q[1]) % m)

    def _neg(self, deg, p):
        m = self.modulus
        return (-p[0] % m, -p[1] % m)

    def _mul(self, d1, p, d2, q, d):
        m = self.modulus
        return (p[0] * q[0] % m, (p[0] * q[1] + q[0] * p[1]) % m)

    def _component_payloads(self, deg):
        lvl = self._level(deg)
        m = self.modulus
        if lvl == 0:
            return [(r, 0) for r in range(m)]
        if lvl == 1:
            return [(0, a) for a in range(0, m, self.ideal_step)]
        return [(0, 0)]

    def _parse(self, literal):
        if not (isinstance(literal, (list, tuple)) and len(literal) == 2):
            raise DegreeError(f"expected a pair [r, a], got {literal!r}")
        r, a = int(literal[0]) % self.modulus, int(literal[1]) % self.modulus
        if r and a:
            raise DegreeError(f"pair {literal!r} is not homogeneous")
        if r:
            return self.grading.element(0), (r, 0)
        if a:
            if a % self.ideal_step:
                raise DegreeError(f"{a} is not in the ideal {self.ideal_step}Z/{self.modulus}")
            return self.grading.element(1), (0, a)
        return None, (0, 0)

    def _format(self, deg, payload):
        return list(payload)

    def describe(self):
        return {"kind": self.kind, "modulus": self.modulus, "ideal": self.ideal_generator}

    def name(self):
        return f"(Z/{self.modulus}, {self.ideal_step}Z/{self.modulus})"


# ---------------------------------------------------------------------------
# ideals, quotients, doubles


@dataclass(frozen=True, eq=True)
class GradedIdeal:
    """Two-sided ideal generated by homogeneous elements."""

    ring: GradedRing
    generators: tuple[HomogeneousElement, ...] = ()
    _cache: dict = _cache_field()

    def __post_init__(self):
        gens = tuple(self.generators)
        for g in gens:
            if not isinstance(g, HomogeneousElement):
                raise IdealError(f"ideal generators must be homogeneous, got {g!r}")
            if g.ring != self.ring:
                raise IdealError("ideal generator from another ring")
        object.__setattr__(self, "generators", gens)

    def _laurent_whole(self) -> bool:
        # every nonzero homogeneous element of F_q[x, x^-1] is a unit
        return any(not g.is_zero() for g in self.generators)

    def component(self, degree: GradeElement) -> frozenset:
        """Payloads of I_degree (finite rings only)."""
        cache = self._cache.setdefault("component", {})
        if degree in cache:
            return cache[degree]
        ring = self.ring
        if not ring.component_is_finite:
            raise UnsupportedOperationError("ideal components of an infinite ring")
        spanning = set()
        for g in self.generators:
            # commutative rings: A g A = A g
            for a in ring.component(degree - g.degree):
                spanning.add((a * g).payload)
        zero = ring._zero_payload(degree)
        members = {zero}
        frontier = [zero]
        span = sorted(spanning)
        while frontier:
            nxt = []
            for x in frontier:
                for s in span:
                    y = ring._add(degree, x, s)
                    if y not in members:
                        members.add(y)
                        nxt.append(y)
            frontier = nxt
        cache[degree] = frozenset(members)
        return cache[degree]

    def contains(self, x: HomogeneousElement) -> bool:
        if x.ring != self.ring:
            raise RingMismatchError("element from another ring")
        if x.is_zero():
            return True
        if not self.ring.component_is_finite:
            return self._laurent_whole()
        return x.payload in self.component(x.degree)

    __contains__ = contains

    def is_zero_ideal(self) -> bool:
        return all(g.is_zero() for g in self.generators)

    def is_whole_ring(self) -> bool:
        return self.contains(self.ring.one())

    def describe(self) -> dict:
        return {
            "generators": [
                {"degree": list(g.degree.components), "value": g.literal()} for g in self.generators
            ]
        }


def zero_ideal(ring: GradedRing) -> GradedIdeal:
    return GradedIdeal(ring, ())


def unit_ideal(ring: GradedRing) -> GradedIdeal:
    return GradedIdeal(ring, (ring.one(),))


@dataclass(frozen=True, eq=True)
class QuotientRing(GradedRing):
    """A/I with components A_lambda / I_lambda; elements are least coset representatives."""

    base: GradedRing
    ideal: GradedIdeal
    _cache: dict = _cache_field()

    kind = "quotient"

    def __post_init__(self):
        if self.ideal.ring != self.base:
            raise IdealError("ideal does not belong to the base ring")

    @property
    def grading(self) -> GradeGroup:
        return self.base.grading

    @property
    def component_is_finite(self) -> bool:
        return self.base.component_is_finite

    def _reduce_payload(self, deg, payload):
        base = self.base
        if not base.component_is_finite:
            return base._zero_payload(deg) if self.ideal._laurent_whole() else payload
        cache = self._cache.setdefault("reduce", {})
        key = (deg, payload)
        if key not in cache:
            cache[key] = min(base._add(deg, payload, i) for i in self.ideal.component(deg))
        return cache[key]

    def reduce(self, x: HomogeneousElement) -> HomogeneousElement:
        """The canonical graded surjection A -> A/I."""
        if x.ring != self.base:
            raise RingMismatchError("element is not in the base ring")
        return HomogeneousElement(self, x.degree, self._reduce_payload(x.degree, x.payload))

    def lift(self, x: HomogeneousElement) -> HomogeneousElement:
        return HomogeneousElement(self.base, x.degree, x.payload)

    def _zero_payload(self, deg):
        return self._reduce_payload(deg, self.base._zero_payload(deg))

    def _one_payload(self):
        deg = self.grading.zero()
        return self._reduce_payload(deg, self.base._one_payload())

    def _normalize(self, deg, payload):
        payload = self.base._normalize(deg, payload)
        if not self.base._member(deg, payload):
            return payload
        return self._reduce_payload(deg, payload)

    def _member(self, deg, payload):
        return self.base._member(deg, payload) and self._reduce_payload(deg, payload) == payload

    def _add(self, deg, a, b):
        return self._reduce_payload(deg, self.base._add(deg, a, b))

    def _neg(self, deg, a):
        return self._reduce_payload(deg, self.base._neg(deg, a))

    def _mul(self, d1, a, d2, b, d):
        return self._reduce_payload(d, self.base._mul(d1, a, d2, b, d))

    def _component_payloads(self, deg):
        return sorted({self._reduce_payload(deg, x.payload) for x in self.base.component(deg)})

    def _direct_inverse(self, x):
        if self.ideal._laurent_whole():
            return None
        inv = self.base._direct_inverse(self.lift(x))
        return None if inv is None else self.reduce(inv)

    def _parse(self, literal):
        deg, payload = self.base._parse(literal)
        return deg, payload

    def _format(self, deg, payload):
        return self.base._format(deg, payload)

    def format_str(self, x):
        return self.base.format_str(self.lift(x))

    def describe(self):
        return {"kind": self.kind, "base": self.base.describe(), "ideal": self.ideal.describe()}

    def name(self):
        gens = ",".join(str(g) for g in self.ideal.generators) or "0"
        return f"{self.base.name()}/({gens})"


@dataclass(frozen=True, eq=True)
class DoubleRing(GradedRing):
    """D(A, I) = {(x, y) in A x A : x - y in I} with componentwise operations."""

    base: GradedRing
    ideal: GradedIdeal
    _cache: dict = _cache_field()

    kind = "double"

    def __post_init__(self):
        if self.ideal.ring != self.base:
            raise IdealError("ideal does not belong to the base ring")

    @property
    def grading(self) -> GradeGroup:
        return self.base.grading

    @property
    def component_is_finite(self) -> bool:
        return self.base.component_is_finite

    def _zero_payload(self, deg):
        z = self.base._zero_payload(deg)
        return (z, z)

    def _one_payload(self):
        o = self.base._one_payload()
        return (o, o)

    def _normalize(self, deg, payload):
        x, y = payload
        return (self.base._normalize(deg, x), self.base._normalize(deg, y))

    def _member(self, deg, payload):
        x, y = payload
        b = self.base
        if not (b._member(deg, x) and b._member(deg, y)):
            return False
        diff = HomogeneousElement(b, deg, b._add(deg, x, b._neg(deg, y)))
        return self.ideal.contains(diff)

    def _add(self, deg, p, q):
        b = self.base
        return (b._add(deg, p[0], q[0]), b._add(deg, p[1], q[1]))

    def _neg(self, deg, p):
        b = self.base
        return (b._neg(deg, p[0]), b._neg(deg, p[1]))

    def _mul(self, d1, p, d2, q, d):
        b = self.base
        return (b._mul(d1, p[0], d2, q[0], d), b._mul(d1, p[1], d2, q[1], d))

    def _component_payloads(self, deg):
        comp = self.base.component(deg)
        out = []
        for x in comp:
            for y in comp:
                if self.ideal.contains(x - y):
                    out.append((x.payload, y.payload))
        return out

    def _direct_inverse(self, x):
        b = self.base
        u = b._direct_inverse(self.p1(x))
        v = b._direct_inverse(self.p2(x))
        if u is None or v is None:
            return None
        return HomogeneousElement(self, -x.degree, (u.payload, v.payload))

    def pair(self, x: HomogeneousElement, y: HomogeneousElement) -> HomogeneousElement:
        deg = x.degree if not x.is_zero() else y.degree
        return self.element((x.payload, y.payload), deg)

    def diagonal(self, x: HomogeneousElement) -> HomogeneousElement:
        return HomogeneousElement(self, x.degree, (x.payload, x.payload))

    def p1(self, x: HomogeneousElement) -> HomogeneousElement:
        return HomogeneousElement(self.base, x.degree, x.payload[0])

    def p2(self, x: HomogeneousElement) -> HomogeneousElement:
        return HomogeneousElement(self.base, x.degree, x.payload[1])

    def _parse(self, literal):
        if not (isinstance(literal, (list, tuple)) and len(literal) == 2):
            raise DegreeError(f"expected a pair of base literals, got {literal!r}")
        d1, x = self.base._parse(literal[0])
        d2, y = self.base._parse(literal[1])
        if d1 is not None and d2 is not None and d1 != d2:
            raise DegreeError(f"components of {literal!r} have different degrees")
        deg = d1 if d1 is not None else d2
        return deg, (x, y)

    def _format(self, deg, payload):
        return [self.base._format(deg, payload[0]), self.base._format(deg, payload[1])]

    def format_str(self, x):
        return f"({self.base.format_str(self.p1(x))},{self.base.format_str(self.p2(x))})"

    def describe(self):
        return {"kind": self.kind, "base": self.base.describe(), "ideal": self.ideal.describe()}

    def name(self):
        gens = ",".join(str(g) for g in self.ideal.generators) or "0"
        return f"D({self.base.name()}, ({gens}))"


# ---------------------------------------------------------------------------
# module-level operations


def homogeneous_add(x: HomogeneousElement, y: HomogeneousElement) -> HomogeneousElement:
    return x + y


def homogeneous_mul(x: HomogeneousElement, y: HomogeneousElement) -> HomogeneousElement:
    return x * y


def component_enumerate(ring: GradedRing, degree: GradeElement) -> list[HomogeneousElement]:
    return list(ring.component(degree))


def quotient_ring(ring: GradedRing, ideal: GradedIdeal) -> QuotientRing:
    return QuotientRing(ring, ideal)


def double_ring(ring: GradedRing, ideal: GradedIdeal) -> DoubleRing:
    return DoubleRing(ring, ideal)


def ideal(ring: GradedRing, generators: Iterable[HomogeneousElement]) -> GradedIdeal:
    return GradedIdeal(ring, tuple(generators))


def strong_grading_witness(
    ring: GradedRing, degree: GradeElement
) -> list[tuple[HomogeneousElement, HomogeneousElement]]:
    """Pairs (s_i, t_i) with deg s_i = -degree, deg t_i = degree and sum s_i t_i = 1."""
    one = ring.one()
    if degree.is_zero():
        pairs = [(one, one)]
    elif isinstance(ring, GroupRing):
        u = ring.unit(degree)
        pairs = [(ring.unit_inverse(u), u)]
    elif ring.component_is_finite:
        pairs = _search_witness(ring, degree)
    else:
        raise WitnessUnavailableError(f"no witness search for {ring.kind} rings")
    total = ring.zero()
    for s, t in pairs:
        total = total + s * t
    if total != one:
        raise WitnessUnavailableError("witness failed verification")
    return pairs


def _search_witness(ring, degree):
    one = ring.one()
    products = {}
    for s in ring.component(-degree):
        for t in ring.component(degree):
            p = s * t
            if p == one:
                return [(s, t)]
            if not p.is_zero():
                products.setdefault(p.payload, (s, t))
    # breadth-first search over sums of products
    zero = ring.zero()
    seen = {zero.payload: []}
    frontier = [zero]
    order = sorted(products)
    while frontier:
        nxt = []
        for x in frontier:
            for key in order:
                s, t = products[key]
                y = x + s * t
                if y.payload not in seen:
                    seen[y.payload] = seen[x.payload] + [(s, t)]
                    if y == one:
                        return seen[y.payload]
                    nxt.append(y)
        frontier = nxt
    raise WitnessUnavailableError(f"{ring} is not strongly graded in degree {degree}")
