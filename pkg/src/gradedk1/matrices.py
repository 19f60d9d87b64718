"""Grading-constrained matrices M_n(A)(alpha_1, ..., alpha_n)_delta.

Entry (i, j) of a degree-``delta`` matrix over the shift family
``(alpha_1, ..., alpha_n)`` lives in ``A_{delta + alpha_i - alpha_j}``. Indices
are 0-based throughout the Python API.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import DegreeError, FamilyError, NotInvertibleError, RingMismatchError, UnsupportedOperationError
from .grading import GradeElement, GradeGroup
from .rings import GradedIdeal, GradedRing, HomogeneousElement, QuotientRing


@dataclass(frozen=True)
class ShiftFamily:
    """Ordered family of shifts; repeats are allowed."""

    grading: GradeGroup
    shifts: tuple[GradeElement, ...]

    def __post_init__(self):
        shifts = tuple(self.shifts)
        if not shifts:
            raise FamilyError("shift family must be nonempty")
        for s in shifts:
            if s.group != self.grading:
                raise FamilyError(f"shift {s} is not in {self.grading}")
        object.__setattr__(self, "shifts", shifts)

    @classmethod
    def of(cls, grading: GradeGroup, values: Iterable) -> ShiftFamily:
        """Build from integers (one-component gradings) or component lists."""
        shifts = []
        for v in values:
            if isinstance(v, GradeElement):
                shifts.append(v)
            elif isinstance(v, (list, tuple)):
                shifts.append(grading.element(*v))
            else:
                shifts.append(grading.element(v))
        return cls(grading, tuple(shifts))

    def __len__(self):
        return len(self.shifts)

    def __getitem__(self, i) -> GradeElement:
        return self.shifts[i]

    def __iter__(self):
        return iter(self.shifts)

    def repeat(self, copies: int) -> ShiftFamily:
        if copies < 1:
            raise FamilyError(f"copies must be >= 1, got {copies}")
        return ShiftFamily(self.grading, self.shifts * copies)

    def shifted(self, lam: GradeElement) -> ShiftFamily:
        return ShiftFamily(self.grading, tuple(s + lam for s in self.shifts))

    def __add__(self, other: ShiftFamily) -> ShiftFamily:
        if other.grading != self.grading:
            raise FamilyError("cannot concatenate families over different gradings")
        return ShiftFamily(self.grading, self.shifts + other.shifts)

    def entry_degree(self, i: int, j: int) -> GradeElement:
        return self.shifts[i] - self.shifts[j]

    def embedding_into(self, other: ShiftFamily) -> list[int]:
        """Positions of ``self`` inside ``other``, first free match for each shift."""
        used = set()
        positions = []
        for s in self.shifts:
            for k, t in enumerate(other.shifts):
                if k not in used and t == s:
                    used.add(k)
                    positions.append(k)
                    break
            else:
                raise FamilyError(f"family {self} is not contained in {other}")
        return positions

    def to_list(self) -> list:
        return [list(s.components) if len(s.components) != 1 else s.components[0] for s in self.shifts]

    def __str__(self):
        return "(" + ",".join(str(s) for s in self.shifts) + ")"


class GradedMatrix:
    """Dense n x n matrix of homogeneous elements obeying the degree law."""

    __slots__ = ("ring", "family", "degree", "entries", "_hash")

    def __init__(self, ring: GradedRing, family: ShiftFamily, degree: GradeElement, entries, check=True):
        self.ring = ring
        self.family = family
        self.degree = degree
        self.entries = tuple(tuple(row) for row in entries)
        self._hash = None
        if check:
            self.check_degree_law()

    @property
    def n(self) -> int:
        return len(self.family)

    def expected_degree(self, i: int, j: int) -> GradeElement:
        return self.degree + self.family[i] - self.family[j]

    def check_degree_law(self):
        n = len(self.family)
        if len(self.entries) != n or any(len(row) != n for row in self.entries):
            raise FamilyError(f"expected a {n}x{n} entry array for family {self.family}")
        for i, row in enumerate(self.entries):
            for j, x in enumerate(row):
                if x.ring is not self.ring and x.ring != self.ring:
                    raise RingMismatchError(f"entry ({i},{j}) is over another ring")
                want = self.expected_degree(i, j)
                if x.degree != want:
                    raise DegreeError(
                        f"entry ({i + 1},{j + 1}) has degree {x.degree}, expected {want}",
                        position=(i + 1, j + 1),
                        expected=want,
                        actual=x.degree,
                    )

    def __getitem__(self, ij) -> HomogeneousElement:
        i, j = ij
        return self.entries[i][j]

    def __matmul__(self, other: GradedMatrix) -> GradedMatrix:
        return matmul(self, other)

    def __eq__(self, other):
        if not isinstance(other, GradedMatrix):
            return NotImplemented
        return (
            self.family == other.family
            and self.degree == other.degree
            and self.key() == other.key()
            and self.ring == other.ring
        )

    def key(self) -> tuple:
        """Canonical entry serialization."""
        return tuple(x.payload for row in self.entries for x in row)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.family, self.key()))
        return self._hash

    def is_identity(self) -> bool:
        return self.degree.is_zero() and all(
            (x.is_one() if i == j else x.is_zero())
            for i, row in enumerate(self.entries)
            for j, x in enumerate(row)
        )

    def det(self) -> HomogeneousElement:
        if not self.ring.is_commutative:
            raise UnsupportedOperationError("determinant needs a commutative ring")
        return _det(self.entries, self.ring)

    def to_literal(self) -> list:
        return [[x.literal() for x in row] for row in self.entries]

    def rows_str(self) -> list[str]:
        cells = [[str(x) for x in row] for row in self.entries]
        width = max(len(c) for row in cells for c in row)
        return ["[" + " ".join(c.rjust(width) for c in row) + "]" for row in cells]

    def __str__(self):
        return "\n".join(self.rows_str())

    def __repr__(self):
        body = "; ".join(",".join(str(x) for x in row) for row in self.entries)
        return f"GradedMatrix({self.family}, deg={self.degree}, [{body}])"


def _det(entries: Sequence[Sequence[HomogeneousElement]], ring: GradedRing) -> HomogeneousElement:
    """Leibniz sum organised as a dynamic programme over chosen column sets."""
    n = len(entries)
    if n == 0:
        return ring.one()
    dp = {0: ring.one()}
    for k in range(n):
        row = entries[k]
        nxt = {}
        for mask, acc in dp.items():
            for c in range(n):
                bit = 1 << c
                if mask & bit:
                    continue
                a = row[c]
                if a.is_zero():
                    continue
                term = acc * a
                if bin(mask >> (c + 1)).count("1") % 2:
                    term = -term
                new = mask | bit
                nxt[new] = term if new not in nxt else nxt[new] + term
        dp = nxt
        if not dp:
            break
    full = (1 << n) - 1
    if full in dp:
        return dp[full]
    # all terms vanish; report zero in the degree the determinant would have
    deg = ring.grading.zero()
    for k in range(n):
        deg = deg + entries[k][k].degree
    return ring.zero(deg)


# ---------------------------------------------------------------------------
# constructors


def matrix_from_entries(
    ring: GradedRing, family: ShiftFamily, degree: GradeElement | None, entries
) -> GradedMatrix:
    """Validated constructor; ``None`` entries become the zero of the forced degree."""
    if degree is None:
        degree = family.grading.zero()
    rows = []
    for i, row in enumerate(entries):
        out = []
        for j, x in enumerate(row):
            if x is None:
                x = ring.zero(degree + family[i] - family[j])
            out.append(x)
        rows.append(out)
    return GradedMatrix(ring, family, degree, rows)


def zero_matrix(ring: GradedRing, family: ShiftFamily, degree: GradeElement | None = None) -> GradedMatrix:
    if degree is None:
        degree = family.grading.zero()
    n = len(family)
    return GradedMatrix(
        ring,
        family,
        degree,
        [[ring.zero(degree + family[i] - family[j]) for j in range(n)] for i in range(n)],
        check=False,
    )


def identity(ring: GradedRing, family: ShiftFamily) -> GradedMatrix:
    n = len(family)
    one = ring.one()
    rows = [
        [one if i == j else ring.zero(family[i] - family[j]) for j in range(n)] for i in range(n)
    ]
    return GradedMatrix(ring, family, family.grading.zero(), rows, check=False)


def diagonal(ring: GradedRing, family: ShiftFamily, units: Sequence[HomogeneousElement]) -> GradedMatrix:
    m = identity(ring, family)
    rows = [list(r) for r in m.entries]
    for i, u in enumerate(units):
        rows[i][i] = u
    return GradedMatrix(ring, family, m.degree, rows)


@dataclass(frozen=True)
class ElementaryGenerator:
    """The transvection e_{i,j}(r) with r in A_{alpha_i - alpha_j}."""

    family: ShiftFamily
    i: int
    j: int
    r: HomogeneousElement

    def __post_init__(self):
        n = len(self.family)
        if not (0 <= self.i < n and 0 <= self.j < n):
            raise FamilyError(f"index ({self.i + 1},{self.j + 1}) outside a family of size {n}")
        if self.i == self.j:
            raise FamilyError("elementary generator needs i != j")
        want = self.family.entry_degree(self.i, self.j)
        if self.r.degree != want:
            raise DegreeError(
                f"e_{{{self.i + 1},{self.j + 1}}} needs an entry of degree {want}, "
                f"got {self.r} of degree {self.r.degree}",
                position=(self.i + 1, self.j + 1),
                expected=want,
                actual=self.r.degree,
            )

    @property
    def ring(self) -> GradedRing:
        return self.r.ring

    def inverse(self) -> ElementaryGenerator:
        return ElementaryGenerator(self.family, self.i, self.j, -self.r)

    def matrix(self) -> GradedMatrix:
        return elementary(self)

    def __str__(self):
        return f"e_{{{self.i + 1},{self.j + 1}}}({self.r})"


def elementary(gen: ElementaryGenerator) -> GradedMatrix:
    m = identity(gen.ring, gen.family)
    rows = [list(r) for r in m.entries]
    rows[gen.i][gen.j] = gen.r
    return GradedMatrix(gen.ring, gen.family, m.degree, rows, check=__debug__)


def elementary_matrix(ring: GradedRing, family: ShiftFamily, i: int, j: int, r) -> GradedMatrix:
    if not isinstance(r, HomogeneousElement):
        r = ring.parse(r, family.entry_degree(i, j))
    return elementary(ElementaryGenerator(family, i, j, r))


# ---------------------------------------------------------------------------
# arithmetic


def _check_compatible(m: GradedMatrix, n: GradedMatrix):
    if m.ring is not n.ring and m.ring != n.ring:
        raise RingMismatchError("matrices over different rings")
    if m.family != n.family:
        raise FamilyError(f"matrices over different families: {m.family} vs {n.family}")


def matmul(m: GradedMatrix, n: GradedMatrix) -> GradedMatrix:
    _check_compatible(m, n)
    size = m.n
    deg = m.degree + n.degree
    fam = m.family
    ring = m.ring
    a, b = m.entries, n.entries
    rows = []
    for i in range(size):
        ai = a[i]
        row = []
        for j in range(size):
            acc = None
            for k in range(size):
                x, y = ai[k], b[k][j]
                if x.is_zero() or y.is_zero():
                    continue
                p = x * y
                acc = p if acc is None else acc + p
            if acc is None:
                acc = ring.zero(deg + fam[i] - fam[j])
            row.append(acc)
        rows.append(row)
    return GradedMatrix(ring, fam, deg, rows, check=__debug__)


def add(m: GradedMatrix, n: GradedMatrix) -> GradedMatrix:
    _check_compatible(m, n)
    if m.degree != n.degree:
        raise DegreeError("cannot add matrices of different degree")
    rows = [[x + y for x, y in zip(r, s)] for r, s in zip(m.entries, n.entries)]
    return GradedMatrix(m.ring, m.family, m.degree, rows, check=False)


def neg(m: GradedMatrix) -> GradedMatrix:
    return GradedMatrix(m.ring, m.family, m.degree, [[-x for x in r] for r in m.entries], check=False)


def scale(m: GradedMatrix, r: HomogeneousElement, side: str = "left") -> GradedMatrix:
    """r * M or M * r entrywise; the result has degree deg M + deg r."""
    if side == "left":
        rows = [[r * x for x in row] for row in m.entries]
    else:
        rows = [[x * r for x in row] for row in m.entries]
    return GradedMatrix(m.ring, m.family, m.degree + r.degree, rows, check=__debug__)


def is_invertible(m: GradedMatrix) -> bool:
    if not m.degree.is_zero():
        return False
    return m.ring.is_unit(m.det())


def invert(m: GradedMatrix) -> GradedMatrix:
    """Inverse of a degree-0 matrix via the adjugate; raises NotInvertibleError."""
    if not m.degree.is_zero():
        raise UnsupportedOperationError("only degree-0 matrices are inverted")
    ring = m.ring
    d = m.det()
    try:
        d_inv = ring.unit_inverse(d)
    except UnsupportedOperationError:
        raise NotInvertibleError(f"determinant {d} is not a unit") from None
    n = m.n
    a = m.entries
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            minor = [[a[r][c] for c in range(n) if c != i] for r in range(n) if r != j]
            cof = _det(minor, ring) if n > 1 else ring.one()
            if cof.is_zero():
                row.append(ring.zero(m.family[i] - m.family[j]))
                continue
            if (i + j) % 2:
                cof = -cof
            row.append(d_inv * cof)
        rows.append(row)
    out = GradedMatrix(ring, m.family, m.degree, rows, check=__debug__)
    if __debug__ and not matmul(m, out).is_identity():
        raise NotInvertibleError("adjugate inverse failed verification")
    return out


def block_diag(*blocks: GradedMatrix) -> GradedMatrix:
    """Block-diagonal sum over the concatenated family."""
    ring = blocks[0].ring
    degree = blocks[0].degree
    family = blocks[0].family
    for b in blocks[1:]:
        if b.degree != degree:
            raise DegreeError("blocks must share a degree")
        family = family + b.family
    n = len(family)
    rows = [[None] * n for _ in range(n)]
    off = 0
    for b in blocks:
        for i in range(b.n):
            for j in range(b.n):
                rows[off + i][off + j] = b.entries[i][j]
        off += b.n
    for i in range(n):
        for j in range(n):
            if rows[i][j] is None:
                rows[i][j] = ring.zero(degree + family[i] - family[j])
    return GradedMatrix(ring, family, degree, rows, check=__debug__)


def block_matrix(top_left, top_right, bottom_left, bottom_right, family: ShiftFamily) -> GradedMatrix:
    """Assemble a 2x2 block matrix; blocks are entry arrays (lists of rows)."""
    rows = [list(a) + list(b) for a, b in zip(top_left, top_right)]
    rows += [list(a) + list(b) for a, b in zip(bottom_left, bottom_right)]
    ring = rows[0][0].ring
    return GradedMatrix(ring, family, family.grading.zero(), rows)


def stabilize(m: GradedMatrix, copies: int) -> GradedMatrix:
    """(M 0; 0 I) over the family of M repeated ``copies`` times."""
    if copies < 1:
        raise FamilyError(f"copies must be >= 1, got {copies}")
    if not m.degree.is_zero():
        raise UnsupportedOperationError("only degree-0 matrices are stabilized")
    if copies == 1:
        return m
    return block_diag(m, identity(m.ring, m.family.repeat(copies - 1)))


def pad_to(m: GradedMatrix, family: ShiftFamily) -> GradedMatrix:
    """(M 0; 0 I) where ``family`` extends M's family as a prefix."""
    k = m.n
    if family.shifts[:k] != m.family.shifts:
        raise FamilyError(f"{m.family} is not a prefix of {family}")
    if len(family) == k:
        return m
    rest = ShiftFamily(family.grading, family.shifts[k:])
    return block_diag(m, identity(m.ring, rest))


def embed(m: GradedMatrix, family: ShiftFamily, positions: Sequence[int]) -> GradedMatrix:
    """Place M at the given positions of a larger family, identity elsewhere."""
    for k, p in enumerate(positions):
        if family[p] != m.family[k]:
            raise FamilyError(f"position {p} carries shift {family[p]}, need {m.family[k]}")
    big = identity(m.ring, family)
    rows = [list(r) for r in big.entries]
    for a, p in enumerate(positions):
        for b, q in enumerate(positions):
            rows[p][q] = m.entries[a][b]
    return GradedMatrix(m.ring, family, m.degree, rows, check=__debug__)


def suspend_family(m: GradedMatrix, lam: GradeElement) -> GradedMatrix:
    """Same entries over the family (alpha_1 + lam, ..., alpha_n + lam)."""
    if not m.degree.is_zero():
        raise UnsupportedOperationError("only degree-0 matrices are suspended")
    return GradedMatrix(m.ring, m.family.shifted(lam), m.degree, m.entries, check=__debug__)


def map_entries(m: GradedMatrix, fn, ring: GradedRing) -> GradedMatrix:
    rows = [[fn(x) for x in row] for row in m.entries]
    return GradedMatrix(ring, m.family, m.degree, rows, check=__debug__)


def reduce_mod_ideal(m: GradedMatrix, ideal: GradedIdeal | QuotientRing) -> GradedMatrix:
    """Entrywise image under A -> A/I."""
    q = ideal if isinstance(ideal, QuotientRing) else QuotientRing(ideal.ring, ideal)
    if q.base != m.ring:
        raise RingMismatchError("ideal is not an ideal of the matrix ring")
    return map_entries(m, q.reduce, q)


def commutator(g: GradedMatrix, h: GradedMatrix) -> GradedMatrix:
    """g h g^-1 h^-1."""
    return g @ h @ invert(g) @ invert(h)
