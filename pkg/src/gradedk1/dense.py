"""Bitmap-backed groups for matrix spaces too large for hashed tuples.

A degree-0 matrix is a mixed-radix integer: position p contributes
``digit_p * stride_p`` with row-major order and the last position least
significant. Groups are sorted ``uint32`` code arrays, closures run over a
visited bitmap, and cosets are labelled in a ``uint16`` array over the whole
code space. Nothing here tracks words.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

import numpy as np

from .algebra import FiniteMatrixAlgebra, monomial_elements
from .errors import GradedK1Error, TruncatedError
from .groups import Generator, abelian_invariants

log = logging.getLogger(__name__)

# largest code space handled densely; the coset labels alone take 2 bytes per code
DENSE_LIMIT = 1 << 29
CHUNK = 1 << 20
INNER_CHUNK = 1 << 22
UNSET = np.uint16(0xFFFF)
# lookup tables of a DigitMap cover at most this many codes each
GROUP_LIMIT = 1 << 16


class Codec:
    """Mixed-radix packing of encoded matrices."""

    def __init__(self, alg: FiniteMatrixAlgebra):
        self.alg = alg
        self.sizes = list(alg.sizes)
        self.P = len(self.sizes)
        strides = [1] * self.P
        for p in range(self.P - 2, -1, -1):
            strides[p] = strides[p + 1] * self.sizes[p + 1]
        self.strides = np.array(strides, dtype=np.int64)
        self.total = int(np.prod(self.sizes, dtype=object))

    def pack(self, digits: np.ndarray) -> np.ndarray:
        return digits.astype(np.int64) @ self.strides

    def pack_one(self, code: Sequence[int]) -> int:
        return int(sum(int(d) * int(s) for d, s in zip(code, self.strides)))

    def unpack(self, codes: np.ndarray) -> np.ndarray:
        rest = codes.astype(np.int64)
        out = np.empty((rest.shape[0], self.P), dtype=np.int64)
        for p in range(self.P - 1, -1, -1):
            rest, out[:, p] = np.divmod(rest, self.sizes[p])
        return out

    def unpack_one(self, code: int) -> tuple[int, ...]:
        return tuple(int(x) for x in self.unpack(np.array([code]))[0])


class DigitMap:
    """A position-wise map on packed codes: code -> sum_p F_p[digit_p].

    Positions are grouped from the least significant end so each group's
    table stays small; applying the map costs one divmod per group.
    """

    def __init__(self, sizes: Sequence[int], tables: Sequence[np.ndarray]):
        self.groups: list[tuple[int, int, np.ndarray]] = []
        div = 1
        end = len(sizes)
        while end > 0:
            start, size = end - 1, sizes[end - 1]
            while start > 0 and size * sizes[start - 1] <= GROUP_LIMIT:
                start -= 1
                size *= sizes[start]
            table = np.asarray(tables[start], dtype=np.int64)
            for q in range(start + 1, end):
                table = np.add.outer(table, np.asarray(tables[q], dtype=np.int64)).ravel()
            self.groups.append((div, size, table))
            div *= size
            end = start

    def __call__(self, codes: np.ndarray) -> np.ndarray:
        codes = codes.astype(np.int64)
        out = np.zeros(codes.shape[0], dtype=np.int64)
        for div, size, table in self.groups:
            out += table[(codes // div) % size]
        return out


def entry_digit_map(source: Codec, target: Codec, maps: Sequence[Sequence[int]]) -> DigitMap:
    """Code-level version of an entrywise map between two algebras."""
    tables = [np.asarray(m, dtype=np.int64) * target.strides[p] for p, m in enumerate(maps)]
    return DigitMap(source.sizes, tables)


def left_monomial_map(codec: Codec, t: Sequence[int], perm: Sequence[int]) -> DigitMap:
    """x -> t x for a monomial t with its nonzero entries at (i, perm[i])."""
    alg = codec.alg
    n, pd = alg.n, alg.pos_deg
    tables: list = [None] * codec.P
    for i in range(n):
        k = perm[i]
        for j in range(n):
            # (t x)_ij = t_{i,k} x_{k,j}
            prod = alg.mul_np(pd[i * n + k], pd[k * n + j])[t[i * n + k]]
            tables[k * n + j] = prod.astype(np.int64) * codec.strides[i * n + j]
    return DigitMap(codec.sizes, tables)


def dense_eligible(alg: FiniteMatrixAlgebra) -> bool:
    return alg.candidate_count() <= DENSE_LIMIT


# ---------------------------------------------------------------------------
# right multiplication on batches


class RightAction:
    """x -> x * g on batches of (codes, digits), table driven."""

    def __init__(self, codec: Codec, gen: Generator):
        alg = codec.alg
        n = alg.n
        pd = alg.pos_deg
        self.strides = codec.strides
        # each step rewrites one position: new = sum of prod_table[digit of source]
        self.steps: list[tuple[int, list[tuple[int, np.ndarray]], np.ndarray, bool]] = []
        if gen.elementary is not None:
            i, j, r = gen.elementary
            for k in range(n):
                src, dst = k * n + i, k * n + j
                prod = alg.mul_np(pd[src], pd[i * n + j])[:, r]
                # column j of row k picks up x_ki * r on top of its old value
                self.steps.append((dst, [(src, prod)], np.array(alg.add_table(pd[dst]), dtype=np.int64), True))
        else:
            b = gen.code
            for k in range(n):
                for j in range(n):
                    dst = k * n + j
                    terms = [
                        (k * n + l, alg.mul_np(pd[k * n + l], pd[l * n + j])[:, b[l * n + j]])
                        for l in range(n)
                        if b[l * n + j]
                    ]
                    self.steps.append((dst, terms, np.array(alg.add_table(pd[dst]), dtype=np.int64), False))

    def apply(self, codes: np.ndarray, digits: np.ndarray) -> np.ndarray:
        out = codes.astype(np.int64, copy=True)
        for dst, terms, add, accumulate in self.steps:
            old = digits[:, dst]
            new = old if accumulate else np.zeros(codes.shape[0], dtype=np.int64)
            for src, prod in terms:
                new = add[new, prod[digits[:, src]]]
            out += (new - old) * self.strides[dst]
        return out


# ---------------------------------------------------------------------------
# groups


@dataclass
class DenseGroup:
    algebra: FiniteMatrixAlgebra
    label: str
    level: int
    codes: np.ndarray  # sorted uint32 / int64 packed codes
    truncated: bool = False
    generators: list[Generator] = field(default_factory=list)
    reason: str = ""
    dense: bool = True

    def __post_init__(self):
        self.codec = Codec(self.algebra)

    @property
    def order(self) -> int:
        return int(self.codes.shape[0])

    def __len__(self):
        return self.order

    @property
    def family(self):
        return self.algebra.family

    @property
    def ring(self):
        return self.algebra.ring

    def require_complete(self):
        if self.truncated:
            raise TruncatedError(
                f"{self.label} snapshot is truncated ({self.reason or 'cap exceeded'})", label=self.label
            )

    def contains_codes(self, packed: np.ndarray) -> np.ndarray:
        pos = np.searchsorted(self.codes, packed)
        pos = np.minimum(pos, max(self.order - 1, 0))
        return self.codes[pos].astype(np.int64) == packed

    def contains_digits(self, digits: np.ndarray) -> np.ndarray:
        return self.contains_codes(self.codec.pack(digits))

    def __contains__(self, m) -> bool:
        code = m if isinstance(m, tuple) else self.algebra.encode(m)
        return bool(self.contains_codes(np.array([self.codec.pack_one(code)]))[0])

    def digit_chunks(self, size: int = CHUNK) -> Iterator[np.ndarray]:
        for s in range(0, self.order, size):
            yield self.codec.unpack(self.codes[s : s + size])

    def element(self, k: int) -> tuple[int, ...]:
        return self.codec.unpack_one(int(self.codes[k]))

    def matrix(self, k: int):
        return self.algebra.decode(self.element(k))


def _store(codes: np.ndarray, total: int) -> np.ndarray:
    return codes.astype(np.uint32 if total <= 1 << 32 else np.int64)


def _leibniz(alg, digits_of, rows: Sequence[int], cols: Sequence[int]):
    """Determinant of the minor (rows x cols) over batches; returns (values, degree id)."""
    n = alg.n
    pd = alg.pos_deg
    total = None
    total_deg = None
    for perm in itertools.permutations(range(len(cols))):
        inv = sum(1 for a in range(len(perm)) for b in range(a + 1, len(perm)) if perm[a] > perm[b])
        p = rows[0] * n + cols[perm[0]]
        acc, deg = digits_of(p), pd[p]
        for t in range(1, len(rows)):
            p = rows[t] * n + cols[perm[t]]
            acc = alg.mul_np(deg, pd[p])[acc, digits_of(p)]
            deg = alg.sum_deg(deg, pd[p])
        if inv % 2:
            acc = np.array(alg.neg_table(deg), dtype=np.int64)[acc]
        if total is None:
            total, total_deg = acc, deg
        else:
            if deg != total_deg:
                raise GradedK1Error("inhomogeneous minor; degree law broken")
            total = np.array(alg.add_table(deg), dtype=np.int64)[total, acc]
    return total, total_deg


def dense_gl(alg: FiniteMatrixAlgebra, cap: int, label: str = "GL", level: int = 1) -> DenseGroup:
    """All invertible matrices, by Laplace expansion along the first row."""
    codec = Codec(alg)
    n = alg.n
    if n < 2:
        raise GradedK1Error("dense enumeration needs at least two rows")
    if codec.total > DENSE_LIMIT:
        return DenseGroup(alg, label, level, np.empty(0, np.uint32), True, reason=f"code space {codec.total} too large")
    row_sizes = codec.sizes[:n]
    inner_total = codec.total // int(np.prod(row_sizes, dtype=object))
    inner_codec_sizes = codec.sizes[n:]
    found, count = [], 0
    add0 = np.array(alg.add_table(alg.d0), dtype=np.int64)
    for start in range(0, inner_total, INNER_CHUNK):
        inner = np.arange(start, min(inner_total, start + INNER_CHUNK), dtype=np.int64)
        digits = np.empty((inner.shape[0], len(inner_codec_sizes)), dtype=np.int64)
        rest = inner
        for p in range(len(inner_codec_sizes) - 1, -1, -1):
            rest, digits[:, p] = np.divmod(rest, inner_codec_sizes[p])
        cof = []
        for j in range(n):
            cols = [c for c in range(n) if c != j]
            vals, deg = _leibniz(alg, lambda p: digits[:, p - n], list(range(1, n)), cols)
            if j % 2:
                vals = np.array(alg.neg_table(deg), dtype=np.int64)[vals]
            cof.append((alg.mul_np(alg.pos_deg[j], deg), vals))
        for combo in itertools.product(*[range(s) for s in row_sizes]):
            det = None
            for j, a in enumerate(combo):
                if a == 0:
                    continue
                table, vals = cof[j]
                term = table[a][vals]
                det = term if det is None else add0[det, term]
            if det is None:
                continue
            idx = np.flatnonzero(alg.unit_mask0[det])
            if idx.size:
                head = sum(a * int(codec.strides[j]) for j, a in enumerate(combo))
                found.append(_store(head + start + idx, codec.total))
                count += idx.size
                if count > cap:
                    return DenseGroup(alg, label, level, np.empty(0, np.uint32), True, reason=f"more than {cap} elements")
    codes = np.concatenate(found) if found else np.empty(0, np.uint32)
    codes.sort()
    log.info("dense %s: %d invertible matrices", label, len(codes))
    return DenseGroup(alg, label, level, codes)


def _bfs(codec: Codec, actions: list[RightAction], visited: np.ndarray, frontier: np.ndarray, cap: int, count: int):
    """Breadth-first closure over ``visited``; returns (count, truncated)."""
    while frontier.size:
        nxt = []
        for s in range(0, frontier.size, CHUNK):
            fc = frontier[s : s + CHUNK].astype(np.int64)
            dg = codec.unpack(fc)
            for act in actions:
                out = act.apply(fc, dg)
                out = np.unique(out[~visited[out]])
                if out.size:
                    visited[out] = True
                    count += out.size
                    nxt.append(_store(out, codec.total))
                    if count > cap:
                        return count, True
        frontier = np.concatenate(nxt) if nxt else np.empty(0, np.uint32)
    return count, False


def dense_closure(
    alg: FiniteMatrixAlgebra, gens: Sequence[Generator], cap: int, label: str = "group", level: int = 1
) -> DenseGroup:
    codec = Codec(alg)
    if codec.total > DENSE_LIMIT:
        return DenseGroup(alg, label, level, np.empty(0, np.uint32), True, list(gens), f"code space {codec.total} too large")
    visited = np.zeros(codec.total, dtype=bool)
    ident = codec.pack_one(alg.identity)
    visited[ident] = True
    actions = [RightAction(codec, g) for g in gens]
    count, truncated = _bfs(codec, actions, visited, np.array([ident], dtype=np.int64), cap, 1)
    if truncated:
        return DenseGroup(alg, label, level, np.empty(0, np.uint32), True, list(gens), f"closure exceeded cap {cap}")
    codes = _store(np.flatnonzero(visited), codec.total)
    log.info("dense closure %s: %d elements", label, len(codes))
    return DenseGroup(alg, label, level, codes, False, list(gens))


def dense_extend(group: DenseGroup, new: Generator, cap: int) -> DenseGroup:
    """Close ``group`` again after adding a generator."""
    codec = group.codec
    visited = np.zeros(codec.total, dtype=bool)
    visited[group.codes.astype(np.int64)] = True
    act = RightAction(codec, new)
    first = []
    for s in range(0, group.order, CHUNK):
        fc = group.codes[s : s + CHUNK].astype(np.int64)
        out = act.apply(fc, codec.unpack(fc))
        out = np.unique(out[~visited[out]])
        visited[out] = True
        first.append(out)
    frontier = np.unique(np.concatenate(first)) if first else np.empty(0, np.int64)
    gens = group.generators + [new]
    actions = [RightAction(codec, g) for g in gens]
    count = group.order + frontier.size
    if count > cap:
        return DenseGroup(group.algebra, group.label, group.level, np.empty(0, np.uint32), True, gens, f"closure exceeded cap {cap}")
    count, truncated = _bfs(codec, actions, visited, frontier, cap, count)
    if truncated:
        return DenseGroup(group.algebra, group.label, group.level, np.empty(0, np.uint32), True, gens, f"closure exceeded cap {cap}")
    return DenseGroup(group.algebra, group.label, group.level, _store(np.flatnonzero(visited), codec.total), False, gens)


def dense_normal_closure(group: DenseGroup, conjugators: Sequence[Generator], cap: int) -> DenseGroup:
    alg = group.algebra
    inverses = [alg.inverse(s.code) for s in conjugators]
    queue = list(range(len(group.generators)))
    while queue and not group.truncated:
        x = group.generators[queue.pop(0)]
        for s, s_inv in zip(conjugators, inverses):
            y = alg.mul(alg.mul(s.code, x.code), s_inv)
            if y in group:
                continue
            group = dense_extend(group, Generator(y), cap)
            if group.truncated:
                break
            queue.append(len(group.generators) - 1)
    return group


# ---------------------------------------------------------------------------
# quotients


@dataclass
class DenseQuotient:
    group: DenseGroup
    subgroup: object
    reps: list[tuple[int, ...]]
    labels: np.ndarray = field(repr=False)
    normal: bool
    table: Optional[list[list[int]]] = None
    abelian: Optional[bool] = None
    invariants: Optional[list[int]] = None
    obstruction: str = ""

    @property
    def index(self) -> int:
        return len(self.reps)

    def identity_class(self) -> int:
        return 0

    def class_of(self, m) -> int:
        code = m if isinstance(m, tuple) else self.group.algebra.encode(m)
        return int(self.labels[self.group.codec.pack_one(code)])

    def classes_of(self, digits: np.ndarray) -> np.ndarray:
        return self.labels[self.group.codec.pack(digits)].astype(np.int64)

    def classes_of_codes(self, codes: np.ndarray) -> np.ndarray:
        return self.labels[codes].astype(np.int64)

    def labelled_codes(self) -> Iterator[tuple[np.ndarray, np.ndarray]]:
        for s in range(0, self.group.order, CHUNK):
            codes = self.group.codes[s : s + CHUNK].astype(np.int64)
            yield codes, self.labels[codes].astype(np.int64)

    def labelled_chunks(self) -> Iterator[tuple[np.ndarray, np.ndarray]]:
        for codes, labels in self.labelled_codes():
            yield self.group.codec.unpack(codes), labels


def dense_quotient(group: DenseGroup, sub) -> DenseQuotient:
    """Left cosets t*sub, labelled by multiplying the whole subgroup by each new seed t.

    Seeds are monomial matrices while unlabelled ones remain (left
    multiplication by those is position-wise); otherwise the smallest
    unlabelled group element.
    """
    group.require_complete()
    sub.require_complete()
    alg = group.algebra
    codec = group.codec
    if not sub.generators and sub.order > 1:
        raise GradedK1Error("dense quotients need a generated subgroup")
    labels = np.full(codec.total, UNSET, dtype=np.uint16)
    if getattr(sub, "dense", False):
        sub_codes = sub.codes
    else:
        sub_codes = codec.pack(np.array(sub.elements, dtype=np.int64).reshape(sub.order, -1))
    for s in range(0, sub.order, CHUNK):
        labels[sub_codes[s : s + CHUNK].astype(np.int64)] = 0
    reps = [alg.identity]
    seen = sub.order
    monos = monomial_elements(alg)
    if monos:
        packed = codec.pack(np.array([code for code, _ in monos], dtype=np.int64))
        inside = group.contains_codes(packed)
        monos = [(int(k), code, perm) for k, (code, perm), ok in zip(packed, monos, inside) if ok]
    monomials = iter(monos)
    cursor = 0
    while seen < group.order:
        c = len(reps)
        if c >= int(UNSET):
            raise TruncatedError("too many cosets for dense labels", label=group.label)
        seed, perm = None, None
        for packed, code, p in monomials:
            if labels[packed] == UNSET:
                seed, perm = code, p
                break
        while seed is None and cursor < group.order:
            block = group.codes[cursor : cursor + CHUNK].astype(np.int64)
            free = np.flatnonzero(labels[block] == UNSET)
            if free.size:
                seed = codec.unpack_one(int(block[free[0]]))
            else:
                cursor += CHUNK
        if seed is None:
            raise GradedK1Error(f"{sub.label} is not contained in {group.label}")
        left = left_monomial_map(codec, seed, perm) if perm is not None else None
        for s in range(0, sub.order, CHUNK):
            part = sub_codes[s : s + CHUNK]
            if left is not None:
                out = left(part)
            else:
                out = codec.pack(alg.batch_mul_left(seed, codec.unpack(part)))
            if (labels[out] != UNSET).any():
                raise GradedK1Error("cosets overlap", coset=c)
            labels[out] = c
        reps.append(seed)
        seen += sub.order
    # every group element labelled and nothing else: the cosets partition the group
    if seen != group.order or int(np.count_nonzero(labels != UNSET)) != group.order:
        raise GradedK1Error(f"cosets of {sub.label} do not partition {group.label}")
    for s in range(0, group.order, CHUNK):
        if (labels[group.codes[s : s + CHUNK].astype(np.int64)] == UNSET).any():
            raise GradedK1Error(f"cosets of {sub.label} do not partition {group.label}")
    log.info("dense quotient %s/%s: %d cosets", group.label, sub.label, len(reps))
    normal = True
    for t in reps:
        t_inv = alg.inverse(t)
        for g in sub.generators:
            y = alg.mul(alg.mul(t, g.code), t_inv)
            if labels[codec.pack_one(y)] != 0:
                normal = False
                break
        if not normal:
            break
    q = DenseQuotient(group, sub, reps, labels, normal)
    if normal:
        q.table = [[int(labels[codec.pack_one(alg.mul(a, b))]) for b in reps] for a in reps]
        q.abelian = all(q.table[a][b] == q.table[b][a] for a in range(len(reps)) for b in range(a))
        if q.abelian:
            q.invariants = abelian_invariants(q.table, 0)
        else:
            q.obstruction = "quotient is not abelian at this level; raise the level"
    else:
        q.obstruction = f"{sub.label} is not normal in {group.label} at this level; raise the level"
    return q
