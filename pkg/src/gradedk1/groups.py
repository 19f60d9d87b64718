"""Finite matrix groups by breadth-first closure, normal closures and coset quotients."""

from __future__ import annotations

import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .algebra import FiniteMatrixAlgebra, monomial_elements
from .errors import GradedK1Error, TruncatedError
from .matrices import ElementaryGenerator, GradedMatrix
from .whitehead import AnyLetter, ConjugateLetter, ElementaryWord, Letter

log = logging.getLogger(__name__)

DEFAULT_CAP = 1_000_000
# code spaces up to this size get an array-backed class lookup
LOOKUP_LIMIT = 1 << 24
# frontier elements expanded per batch in the hashed BFS
FRONTIER_BLOCK = 1 << 12

Code = tuple


@dataclass
class Generator:
    """A group generator in encoded form, with its letter for word tracking."""

    code: Code
    letter: Optional[AnyLetter] = None
    elementary: Optional[tuple[int, int, int]] = None  # (i, j, r index)

    def apply(self, alg: FiniteMatrixAlgebra, a: Code) -> Code:
        if self.elementary is not None:
            i, j, r = self.elementary
            return alg.mul_elementary_right(a, i, j, r)
        return alg.mul(a, self.code)


def elementary_generator(alg: FiniteMatrixAlgebra, i: int, j: int, r: int) -> Generator:
    x = alg.entry_component(i, j)[r]
    letter = Letter(ElementaryGenerator(alg.family, i, j, x))
    code = alg.mul_elementary_right(alg.identity, i, j, r)
    return Generator(code, letter, (i, j, r))


def matrix_generator(alg: FiniteMatrixAlgebra, m: GradedMatrix | Code, letter=None) -> Generator:
    code = m if isinstance(m, tuple) else alg.encode(m)
    return Generator(code, letter)


@dataclass
class GroupSnapshot:
    """A finite group of encoded matrices.

    ``parent``/``via`` record, for generated snapshots, the BFS tree: element
    k equals element ``parent[k]`` times generator ``via[k]``.
    """

    algebra: FiniteMatrixAlgebra
    label: str
    level: int
    elements: list[Code]
    index: dict[Code, int]
    truncated: bool = False
    generators: list[Generator] = field(default_factory=list)
    parent: Optional[list[int]] = None
    via: Optional[list[int]] = None
    reason: str = ""

    @property
    def ring(self):
        return self.algebra.ring

    @property
    def family(self):
        return self.algebra.family

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self):
        return len(self.elements)

    def __contains__(self, m) -> bool:
        code = m if isinstance(m, tuple) else self.algebra.encode(m)
        return code in self.index

    def require_complete(self):
        if self.truncated:
            raise TruncatedError(
                f"{self.label} snapshot is truncated ({self.reason or 'cap exceeded'})",
                label=self.label,
            )

    def matrix(self, k: int) -> GradedMatrix:
        return self.algebra.decode(self.elements[k])

    def matrices(self) -> list[GradedMatrix]:
        return [self.algebra.decode(c) for c in self.elements]

    def word_indices(self, m) -> list[int]:
        if self.parent is None:
            raise GradedK1Error(f"{self.label} was enumerated, not generated; no words")
        code = m if isinstance(m, tuple) else self.algebra.encode(m)
        k = self.index[code]
        out = []
        while self.parent[k] >= 0:
            out.append(self.via[k])
            k = self.parent[k]
        return out[::-1]

    def word(self, m) -> ElementaryWord:
        letters = []
        for g in self.word_indices(m):
            letter = self.generators[g].letter
            if letter is None:
                raise GradedK1Error("generator without an elementary letter")
            letters.append(letter)
        return ElementaryWord(self.family, tuple(letters))

    def as_array(self) -> np.ndarray:
        return np.array(self.elements, dtype=np.int64).reshape(len(self.elements), -1)

    def digit_chunks(self, size: int = 1 << 16):
        for s in range(0, self.order, size):
            part = self.elements[s : s + size]
            yield np.array(part, dtype=np.int64).reshape(len(part), -1)

    def contains_digits(self, digits: np.ndarray) -> np.ndarray:
        return np.array([tuple(row) in self.index for row in digits.tolist()], dtype=bool)


# ---------------------------------------------------------------------------
# closure


def _expand(alg, gens, chunk):
    out = []
    for k, a in chunk:
        for g_idx, g in enumerate(gens):
            out.append((g.apply(alg, a), k, g_idx))
    return out


def _bfs(snap: GroupSnapshot, frontier: list[int], cap: int, workers: int, first_gens=None):
    """Extend ``snap`` in place until closed under right multiplication by its generators.

    Frontier order and generator order fix the discovery order, so the
    result is the same for any number of workers.
    """
    alg = snap.algebra
    gens = snap.generators
    elements, index, parent, via = snap.elements, snap.index, snap.parent, snap.via
    pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        layer_gens = first_gens
        while frontier:
            nxt = []
            # fixed-size blocks keep the product lists small; merge order is unchanged
            for s in range(0, len(frontier), FRONTIER_BLOCK):
                items = [(k, elements[k]) for k in frontier[s : s + FRONTIER_BLOCK]]
                if layer_gens is not None:
                    # first layer of an extension: only the new generators are needed
                    products = [(g.apply(alg, a), k, gi) for k, a in items for gi, g in layer_gens]
                elif pool is not None:
                    size = max(1, -(-len(items) // workers))
                    chunks = [items[c : c + size] for c in range(0, len(items), size)]
                    products = [p for part in pool.map(lambda c: _expand(alg, gens, c), chunks) for p in part]
                else:
                    products = _expand(alg, gens, items)
                for code, k, gi in products:
                    if code not in index:
                        index[code] = len(elements)
                        elements.append(code)
                        parent.append(k)
                        via.append(gi)
                        nxt.append(len(elements) - 1)
                        if len(elements) > cap:
                            snap.truncated = True
                            snap.reason = f"closure exceeded cap {cap}"
                            return
            layer_gens = None
            frontier = nxt
    finally:
        if pool is not None:
            pool.shutdown()


def generate_group(
    alg: FiniteMatrixAlgebra,
    gens: Sequence[Generator],
    cap: int = DEFAULT_CAP,
    label: str = "group",
    level: int = 1,
    workers: int = 1,
) -> GroupSnapshot:
    """Breadth-first closure of ``gens`` with shortlex-minimal word tracking."""
    ident = alg.identity
    snap = GroupSnapshot(alg, label, level, [ident], {ident: 0}, False, list(gens), [-1], [-1])
    _bfs(snap, [0], cap, workers)
    return snap


def extend_group(snap: GroupSnapshot, new: Sequence[Generator], cap: int, workers: int = 1):
    """Add generators to a closed snapshot and re-close it."""
    if snap.truncated:
        return
    start = len(snap.generators)
    snap.generators.extend(new)
    first = [(start + t, g) for t, g in enumerate(new)]
    _bfs(snap, list(range(len(snap.elements))), cap, workers, first_gens=first)


def normal_closure(
    snap: GroupSnapshot,
    conjugators: Sequence[Generator],
    cap: int = DEFAULT_CAP,
    workers: int = 1,
    conjugator_words: Optional[Sequence[ElementaryWord]] = None,
) -> GroupSnapshot:
    """Close ``snap`` under conjugation by ``conjugators`` (in place, returned).

    Every generator x of the snapshot is tested with s x s^-1 for each
    conjugator s; conjugates outside the snapshot become new generators.
    """
    alg = snap.algebra
    inverses = [_inverse_generator(alg, s) for s in conjugators]
    queue = list(range(len(snap.generators)))
    while queue and not snap.truncated:
        x = snap.generators[queue.pop(0)]
        for s_idx, (s, s_inv) in enumerate(zip(conjugators, inverses)):
            y = _conjugate(alg, s, x.code, s_inv)
            if y in snap.index:
                continue
            letter = None
            if conjugator_words is not None and isinstance(x.letter, Letter):
                letter = ConjugateLetter(conjugator_words[s_idx], x.letter)
            elif isinstance(x.letter, ConjugateLetter) and s.letter is not None and isinstance(s.letter, Letter):
                w = ElementaryWord(alg.family, (s.letter,)) + x.letter.conjugator
                letter = ConjugateLetter(w, x.letter.letter)
            elif isinstance(x.letter, Letter) and isinstance(s.letter, Letter):
                letter = ConjugateLetter(ElementaryWord(alg.family, (s.letter,)), x.letter)
            g = Generator(y, letter)
            extend_group(snap, [g], cap, workers)
            queue.append(len(snap.generators) - 1)
    return snap


def _inverse_generator(alg: FiniteMatrixAlgebra, s: Generator) -> Generator:
    if s.elementary is not None:
        i, j, r = s.elementary
        return Generator(alg.mul_elementary_right(alg.identity, i, j, alg.neg_index(i, j, r)), None, (i, j, alg.neg_index(i, j, r)))
    return Generator(alg.inverse(s.code))


def _conjugate(alg: FiniteMatrixAlgebra, s: Generator, x: Code, s_inv: Generator) -> Code:
    if s.elementary is not None:
        i, j, r = s.elementary
        y = alg.mul_elementary_right(x, i, j, s_inv.elementary[2])
        return alg.mul_elementary_left(y, i, j, r)
    return alg.mul(alg.mul(s.code, x), s_inv.code)


def commutator_code(alg: FiniteMatrixAlgebra, a: Generator, b: Generator) -> Code:
    a_inv = _inverse_generator(alg, a)
    b_inv = _inverse_generator(alg, b)
    out = a.apply(alg, alg.identity)
    out = b.apply(alg, out)
    out = a_inv.apply(alg, out)
    return b_inv.apply(alg, out)


def enumerated_snapshot(
    alg: FiniteMatrixAlgebra, codes: list[Code], truncated: bool, label: str, level: int, reason: str = ""
) -> GroupSnapshot:
    return GroupSnapshot(alg, label, level, codes, {c: k for k, c in enumerate(codes)}, truncated, reason=reason)


# ---------------------------------------------------------------------------
# quotients


@dataclass
class Quotient:
    """Left cosets gN of a subgroup N in a finite group G."""

    group: GroupSnapshot
    subgroup: GroupSnapshot
    reps: list[Code]
    coset_of: dict[Code, int]
    normal: bool
    table: Optional[list[list[int]]] = None
    abelian: Optional[bool] = None
    invariants: Optional[list[int]] = None
    obstruction: str = ""
    _labels: object = field(default=None, repr=False, compare=False)

    @property
    def index(self) -> int:
        return len(self.reps)

    def class_of(self, m) -> int:
        code = m if isinstance(m, tuple) else self.group.algebra.encode(m)
        return self.coset_of[code]

    def identity_class(self) -> int:
        return self.coset_of[self.group.algebra.identity]

    def classes_of(self, digits: np.ndarray) -> np.ndarray:
        """Vectorized class lookup; unknown rows raise KeyError."""
        lookup = self._lookup()
        if lookup is None:
            return np.array([self.coset_of[tuple(row)] for row in digits.tolist()], dtype=np.int64)
        strides, labels = lookup
        out = labels[digits.astype(np.int64) @ strides]
        if (out < 0).any():
            raise KeyError("matrix outside the quotiented group")
        return out

    def classes_of_codes(self, codes: np.ndarray) -> np.ndarray:
        """Classes of packed codes (row-major mixed radix, last position least significant)."""
        lookup = self._lookup()
        if lookup is not None:
            out = lookup[1][codes]
            if (out < 0).any():
                raise KeyError("matrix outside the quotiented group")
            return out
        sizes = self.group.algebra.sizes
        digits = np.empty((codes.shape[0], len(sizes)), dtype=np.int64)
        rest = codes.astype(np.int64)
        for p in range(len(sizes) - 1, -1, -1):
            rest, digits[:, p] = np.divmod(rest, sizes[p])
        return self.classes_of(digits)

    def _lookup(self):
        # label array over the whole code space, when that space is small
        if self._labels is None:
            sizes = self.group.algebra.sizes
            total = 1
            for s in sizes:
                total *= s
            if total > LOOKUP_LIMIT:
                self._labels = False
                return None
            strides = np.ones(len(sizes), dtype=np.int64)
            for p in range(len(sizes) - 2, -1, -1):
                strides[p] = strides[p + 1] * sizes[p + 1]
            labels = np.full(total, -1, dtype=np.int64)
            codes = np.array(list(self.coset_of), dtype=np.int64).reshape(len(self.coset_of), -1)
            labels[codes @ strides] = list(self.coset_of.values())
            self._labels = (strides, labels)
        return self._labels or None

    def labelled_chunks(self):
        for digits in self.group.digit_chunks():
            yield digits, self.classes_of(digits)


def coset_quotient(group: GroupSnapshot, sub: GroupSnapshot) -> Quotient:
    group.require_complete()
    sub.require_complete()
    alg = group.algebra
    missing = [c for c in sub.elements if c not in group.index]
    if missing:
        raise GradedK1Error(f"{sub.label} is not contained in {group.label}")
    sub_arr = sub.as_array()
    reps: list[Code] = []
    coset_of: dict[Code, int] = {}
    # identity coset first, then monomial seeds, then the smallest free element
    monos = [code for code, _ in monomial_elements(alg) if code in group.index]
    for g in itertools.chain([alg.identity], monos, group.elements):
        if g in coset_of:
            continue
        c = len(reps)
        reps.append(g)
        for x in map(tuple, alg.batch_mul_left(g, sub_arr).tolist()):
            if x not in group.index:
                raise GradedK1Error("coset left the ambient group; closure is inconsistent")
            coset_of[x] = c
    if len(coset_of) != group.order or group.order != len(reps) * sub.order:
        raise GradedK1Error("cosets do not partition the group")
    normal = True
    for t in reps:
        t_inv = alg.inverse(t)
        for g in sub.generators or [Generator(c) for c in sub.elements]:
            if alg.mul(alg.mul(t, g.code), t_inv) not in sub.index:
                normal = False
                break
        if not normal:
            break
    q = Quotient(group, sub, reps, coset_of, normal)
    if normal:
        q.table = [[coset_of[alg.mul(a, b)] for b in reps] for a in reps]
        q.abelian = all(q.table[a][b] == q.table[b][a] for a in range(len(reps)) for b in range(a))
        if q.abelian:
            q.invariants = abelian_invariants(q.table, q.identity_class())
        else:
            q.obstruction = "quotient is not abelian at this level; raise the level"
    else:
        q.obstruction = f"{sub.label} is not normal in {group.label} at this level; raise the level"
    return q


# ---------------------------------------------------------------------------
# abelian invariants


def _prime_factors(n: int) -> dict[int, int]:
    out = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def element_orders(table: list[list[int]], identity: int) -> list[int]:
    orders = []
    for x in range(len(table)):
        k, y = 1, x
        while y != identity:
            y = table[y][x]
            k += 1
        orders.append(k)
    return orders


def abelian_invariants(table: list[list[int]], identity: int) -> list[int]:
    """Invariant factors d_1 | d_2 | ... of a finite abelian group given by its table.

    For each prime p, #{x : x^(p^k) = 1} = p^(sum_i min(k, e_i)) fixes the
    exponents e_i of the p-primary cyclic factors.
    """
    orders = element_orders(table, identity)
    n = len(table)
    primary: dict[int, list[int]] = {}
    for p, top in _prime_factors(n).items():
        logs = [0]
        for k in range(1, top + 1):
            count = sum(1 for o in orders if (p**k) % o == 0)
            e = 0
            while p**e < count:
                e += 1
            if p**e != count:
                raise GradedK1Error("element-order statistics are not those of an abelian group")
            logs.append(e)
        # number of cyclic factors of exponent >= k is logs[k] - logs[k-1]
        at_least = [logs[k] - logs[k - 1] for k in range(1, top + 1)] + [0]
        exps = []
        for k in range(1, top + 1):
            exps += [k] * (at_least[k - 1] - at_least[k])
        primary[p] = sorted(exps, reverse=True)
    width = max((len(v) for v in primary.values()), default=0)
    factors = [1] * width
    for p, exps in primary.items():
        for t, e in enumerate(exps):
            factors[t] *= p**e
    return sorted(f for f in factors if f > 1)

