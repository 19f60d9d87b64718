"""Table-driven encoding of degree-0 graded matrices over finite rings.

A matrix over the family (alpha_1, ..., alpha_n) is stored as a flat
row-major tuple of component indices: entry (i, j) is the position of the
entry in ``ring.component(alpha_i - alpha_j)``. Index 0 is always the zero
element, so ``if x:`` tests for a nonzero entry. Multiplication, addition and
negation go through precomputed lookup tables; a numpy mirror of the tables
drives vectorized enumeration and batch products.
"""

from __future__ import annotations

import itertools
from typing import Iterator, Sequence

import numpy as np

from .errors import FamilyError, UnsupportedOperationError
from .grading import GradeElement
from .matrices import GradedMatrix, ShiftFamily, invert
from .rings import GradedRing, HomogeneousElement

CHUNK = 1 << 16
# coset seeds are drawn from the monomial matrices only when there are at most this many
MONOMIAL_LIMIT = 1 << 16


class FiniteMatrixAlgebra:
    """Degree-0 matrices of one (ring, family) pair, encoded for speed."""

    def __init__(self, ring: GradedRing, family: ShiftFamily):
        if not ring.component_is_finite:
            raise UnsupportedOperationError(f"{ring.kind} rings have infinite components")
        self.ring = ring
        self.family = family
        n = self.n = len(family)
        self._deg_ids: dict[GradeElement, int] = {}
        self._degs: list[GradeElement] = []
        self.components: list[list[HomogeneousElement]] = []
        self._payload_index: list[dict] = []
        self.pos_deg = [self._deg_id(family[i] - family[j]) for i in range(n) for j in range(n)]
        self.sizes = [len(self.components[d]) for d in self.pos_deg]
        self.d0 = self._deg_id(family.grading.zero())
        self.one = self._payload_index[self.d0][ring.one().payload]
        self.identity = tuple(self.one if i == j else 0 for i in range(n) for j in range(n))
        self._mul: dict[tuple[int, int], list[list[int]]] = {}
        self._mul_np: dict[tuple[int, int], np.ndarray] = {}
        self._add: dict[int, list[list[int]]] = {}
        self._neg: dict[int, list[int]] = {}
        for i, k, j in itertools.product(range(n), repeat=3):
            self.mul_table(self.pos_deg[i * n + k], self.pos_deg[k * n + j])
        for d in set(self.pos_deg):
            self.add_table(d)
            self.neg_table(d)
        units = ring.units(family.grading.zero())
        self.unit_mask0 = np.zeros(len(self.components[self.d0]), dtype=bool)
        for u in units:
            self.unit_mask0[self._payload_index[self.d0][u.payload]] = True

    # -- tables -------------------------------------------------------------
    def _deg_id(self, d: GradeElement) -> int:
        if d not in self._deg_ids:
            comp = list(self.ring.component(d))
            zero = self.ring.zero(d)
            if comp[0] != zero:
                comp.remove(zero)
                comp.insert(0, zero)
            self._deg_ids[d] = len(self._degs)
            self._degs.append(d)
            self.components.append(comp)
            self._payload_index.append({x.payload: k for k, x in enumerate(comp)})
        return self._deg_ids[d]

    def mul_table(self, d1: int, d2: int) -> list[list[int]]:
        key = (d1, d2)
        if key not in self._mul:
            d = self._deg_id(self._degs[d1] + self._degs[d2])
            idx = self._payload_index[d]
            self._mul[key] = [[idx[(x * y).payload] for y in self.components[d2]] for x in self.components[d1]]
            self._mul_np[key] = np.array(self._mul[key], dtype=np.int64)
        return self._mul[key]

    def mul_np(self, d1: int, d2: int) -> np.ndarray:
        self.mul_table(d1, d2)
        return self._mul_np[(d1, d2)]

    def sum_deg(self, d1: int, d2: int) -> int:
        return self._deg_id(self._degs[d1] + self._degs[d2])

    def add_table(self, d: int) -> list[list[int]]:
        if d not in self._add:
            idx = self._payload_index[d]
            comp = self.components[d]
            self._add[d] = [[idx[(x + y).payload] for y in comp] for x in comp]
        return self._add[d]

    def neg_table(self, d: int) -> list[int]:
        if d not in self._neg:
            idx = self._payload_index[d]
            self._neg[d] = [idx[(-x).payload] for x in self.components[d]]
        return self._neg[d]

    # -- conversion ---------------------------------------------------------
    def encode(self, m: GradedMatrix) -> tuple[int, ...]:
        if m.family != self.family:
            raise FamilyError(f"matrix family {m.family} differs from {self.family}")
        n = self.n
        out = []
        for i in range(n):
            for j in range(n):
                out.append(self._payload_index[self.pos_deg[i * n + j]][m.entries[i][j].payload])
        return tuple(out)

    def decode(self, code: Sequence[int]) -> GradedMatrix:
        n = self.n
        rows = [
            [self.components[self.pos_deg[i * n + j]][code[i * n + j]] for j in range(n)]
            for i in range(n)
        ]
        return GradedMatrix(self.ring, self.family, self.family.grading.zero(), rows, check=False)

    def element_index(self, i: int, j: int, x: HomogeneousElement) -> int:
        return self._payload_index[self.pos_deg[i * self.n + j]][x.payload]

    def entry_component(self, i: int, j: int) -> list[HomogeneousElement]:
        return self.components[self.pos_deg[i * self.n + j]]

    # -- arithmetic ---------------------------------------------------------
    def mul(self, a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
        n = self.n
        pd = self.pos_deg
        out = []
        for i in range(n):
            base_i = i * n
            for j in range(n):
                dij = pd[base_i + j]
                add = self._add[dij]
                acc = 0
                for k in range(n):
                    x = a[base_i + k]
                    if x:
                        y = b[k * n + j]
                        if y:
                            acc = add[acc][self._mul[(pd[base_i + k], pd[k * n + j])][x][y]]
                out.append(acc)
        return tuple(out)

    def mul_elementary_right(self, a: Sequence[int], i: int, j: int, r: int) -> tuple[int, ...]:
        """a * e_{i,j}(r): column j += column i * r."""
        n = self.n
        pd = self.pos_deg
        out = list(a)
        dij = pd[i * n + j]
        for k in range(n):
            x = a[k * n + i]
            if x:
                p = k * n + j
                out[p] = self._add[pd[p]][out[p]][self._mul[(pd[k * n + i], dij)][x][r]]
        return tuple(out)

    def mul_elementary_left(self, a: Sequence[int], i: int, j: int, r: int) -> tuple[int, ...]:
        """e_{i,j}(r) * a: row i += r * row j."""
        n = self.n
        pd = self.pos_deg
        out = list(a)
        dij = pd[i * n + j]
        for k in range(n):
            y = a[j * n + k]
            if y:
                p = i * n + k
                out[p] = self._add[pd[p]][out[p]][self._mul[(dij, pd[j * n + k])][r][y]]
        return tuple(out)

    def neg_index(self, i: int, j: int, r: int) -> int:
        return self._neg[self.pos_deg[i * self.n + j]][r]

    def inverse(self, a: Sequence[int]) -> tuple[int, ...]:
        return self.encode(invert(self.decode(a)))

    def batch_mul_left(self, g: Sequence[int], arr: np.ndarray) -> np.ndarray:
        """Rows of ``g * X`` for every encoded X in ``arr`` (shape (N, n*n))."""
        n = self.n
        pd = self.pos_deg
        out = np.zeros_like(arr)
        for i in range(n):
            for j in range(n):
                dij = pd[i * n + j]
                add = np.array(self._add[dij], dtype=np.int64)
                acc = np.zeros(arr.shape[0], dtype=np.int64)
                for k in range(n):
                    x = g[i * n + k]
                    if x:
                        row = self._mul_np[(pd[i * n + k], pd[k * n + j])][x]
                        acc = add[acc, row[arr[:, k * n + j]]]
                out[:, i * n + j] = acc
        return out

    # -- determinants and enumeration -----------------------------------------
    def det_np(self, digits: np.ndarray) -> np.ndarray:
        """Degree-0 determinants of a batch of encoded matrices (Leibniz expansion)."""
        n = self.n
        pd = self.pos_deg
        add0 = np.array(self.add_table(self.d0), dtype=np.int64)
        neg0 = np.array(self.neg_table(self.d0), dtype=np.int64)
        total = np.zeros(digits.shape[0], dtype=np.int64)
        for perm in itertools.permutations(range(n)):
            inversions = sum(1 for a in range(n) for b in range(a + 1, n) if perm[a] > perm[b])
            acc = digits[:, perm[0]]
            deg = pd[perm[0]]
            for row in range(1, n):
                p = row * n + perm[row]
                table = self.mul_np(deg, pd[p])
                acc = table[acc, digits[:, p]]
                deg = self.sum_deg(deg, pd[p])
            if inversions % 2:
                acc = neg0[acc]
            total = add0[total, acc]
        return total

    def det(self, code: Sequence[int]) -> int:
        return int(self.det_np(np.array([code], dtype=np.int64))[0])

    def is_invertible(self, code: Sequence[int]) -> bool:
        return bool(self.unit_mask0[self.det(code)])

    def enumerate_invertible(
        self, allowed: Sequence[Sequence[int]] | None = None, cap: int | None = None, scan_limit: int | None = None
    ) -> tuple[list[tuple[int, ...]], bool]:
        """Invertible matrices with entry p drawn from ``allowed[p]``, in code order.

        Returns ``(elements, truncated)``; truncation happens when more than
        ``cap`` elements are found or the candidate space exceeds ``scan_limit``.
        """
        if allowed is None:
            allowed = [range(s) for s in self.sizes]
        allowed_np = [np.array(sorted(a), dtype=np.int64) for a in allowed]
        radices = [len(a) for a in allowed_np]
        total = 1
        for r in radices:
            total *= r
        if scan_limit is not None and total > scan_limit:
            return [], True
        found: list[tuple[int, ...]] = []
        for start in range(0, total, CHUNK):
            codes = np.arange(start, min(total, start + CHUNK), dtype=np.int64)
            digits = np.empty((codes.shape[0], len(radices)), dtype=np.int64)
            rest = codes
            for p in range(len(radices) - 1, -1, -1):
                rest, d = np.divmod(rest, radices[p])
                digits[:, p] = allowed_np[p][d]
            mask = self.unit_mask0[self.det_np(digits)]
            found.extend(map(tuple, digits[mask].tolist()))
            if cap is not None and len(found) > cap:
                return found[: cap + 1], True
        return found, False

    def candidate_count(self, allowed: Sequence[Sequence[int]] | None = None) -> int:
        out = 1
        for p in range(self.n * self.n):
            out *= len(allowed[p]) if allowed is not None else self.sizes[p]
        return out


def monomial_elements(alg: FiniteMatrixAlgebra) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Invertible monomial matrices as (code, permutation) in code order; [] if there are too many."""
    n = alg.n
    units = [
        [[r for r, x in enumerate(alg.entry_component(i, j)) if alg.ring.is_unit(x)] for j in range(n)]
        for i in range(n)
    ]
    perms = []
    total = 0
    for perm in itertools.permutations(range(n)):
        count = 1
        for i in range(n):
            count *= len(units[i][perm[i]])
        if count:
            perms.append(perm)
            total += count
    if total > MONOMIAL_LIMIT:
        return []
    out = []
    for perm in perms:
        for choice in itertools.product(*[units[i][perm[i]] for i in range(n)]):
            code = [0] * (n * n)
            for i, r in enumerate(choice):
                code[i * n + perm[i]] = r
            out.append((tuple(code), perm))
    out.sort()
    return out


def entry_map(source: FiniteMatrixAlgebra, target: FiniteMatrixAlgebra, fn) -> list[list[int]]:
    """Per-position index maps induced by an entrywise ring map ``fn``."""
    if source.n != target.n:
        raise FamilyError("entry maps need families of the same size")
    maps = []
    for p in range(source.n * source.n):
        src = source.components[source.pos_deg[p]]
        idx = target._payload_index[target.pos_deg[p]]
        maps.append([idx[fn(x).payload] for x in src])
    return maps


def apply_entry_map(maps: list[list[int]], code: Sequence[int]) -> tuple[int, ...]:
    return tuple(m[x] for m, x in zip(maps, code))


def iter_matrices(alg: FiniteMatrixAlgebra, codes) -> Iterator[GradedMatrix]:
    for c in codes:
        yield alg.decode(c)
