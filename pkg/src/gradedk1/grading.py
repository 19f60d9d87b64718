"""Finitely generated abelian grading groups Z^r x Z/n_1 x ... x Z/n_k."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence

from .errors import GroupMismatchError, UnsupportedOperationError


@dataclass(frozen=True)
class GradeGroup:
    free_rank: int = 0
    torsion_orders: tuple[int, ...] = ()

    def __post_init__(self):
        if self.free_rank < 0:
            raise ValueError(f"free_rank must be non-negative, got {self.free_rank}")
        object.__setattr__(self, "torsion_orders", tuple(int(n) for n in self.torsion_orders))
        for n in self.torsion_orders:
            if n < 2:
                raise ValueError(f"torsion orders must be >= 2, got {n}")

    @property
    def rank(self) -> int:
        """Number of stored integer components of an element."""
        return self.free_rank + len(self.torsion_orders)

    @property
    def is_finite(self) -> bool:
        return self.free_rank == 0

    @property
    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion_orders

    def order(self) -> int:
        if not self.is_finite:
            raise UnsupportedOperationError("infinite grading group has no finite order")
        out = 1
        for n in self.torsion_orders:
            out *= n
        return out

    def zero(self) -> GradeElement:
        return GradeElement(self, (0,) * self.free_rank, (0,) * len(self.torsion_orders))

    def element(self, *components: int) -> GradeElement:
        """Build an element from ``[free..., torsion...]`` integer components."""
        if len(components) == 1 and isinstance(components[0], (list, tuple)):
            components = tuple(components[0])
        if len(components) != self.rank:
            raise ValueError(
                f"grade element needs {self.rank} components, got {len(components)}"
            )
        comps = [int(c) for c in components]
        return GradeElement(self, tuple(comps[: self.free_rank]), tuple(comps[self.free_rank :]))

    def elements(self) -> Iterator[GradeElement]:
        """All elements of a finite grading group, in lexicographic order."""
        if not self.is_finite:
            raise UnsupportedOperationError("cannot enumerate an infinite grading group")
        for t in itertools.product(*(range(n) for n in self.torsion_orders)):
            yield GradeElement(self, (), t)

    def describe(self) -> dict:
        return {"free_rank": self.free_rank, "torsion": list(self.torsion_orders)}

    def __str__(self):
        parts = ["Z"] * self.free_rank + [f"Z/{n}" for n in self.torsion_orders]
        return " x ".join(parts) if parts else "0"


class GradeElement:
    """Element of a :class:`GradeGroup`; torsion parts are kept reduced."""

    __slots__ = ("group", "free", "torsion", "_hash")

    def __init__(self, group: GradeGroup, free: Sequence[int] = (), torsion: Sequence[int] = ()):
        free = tuple(free)
        torsion = tuple(t % n for t, n in zip(torsion, group.torsion_orders))
        if len(free) != group.free_rank or len(torsion) != len(group.torsion_orders):
            raise ValueError(f"wrong number of components for grading group {group}")
        self.group = group
        self.free = free
        self.torsion = torsion
        self._hash = hash((free, torsion))

    @property
    def components(self) -> tuple[int, ...]:
        return self.free + self.torsion

    def is_zero(self) -> bool:
        return not any(self.free) and not any(self.torsion)

    def _check(self, other: GradeElement):
        if self.group is not other.group and self.group != other.group:
            raise GroupMismatchError(
                f"grade elements from different groups: {self.group} vs {other.group}"
            )

    def __add__(self, other: GradeElement) -> GradeElement:
        self._check(other)
        return GradeElement(
            self.group,
            tuple(a + b for a, b in zip(self.free, other.free)),
            tuple(a + b for a, b in zip(self.torsion, other.torsion)),
        )

    def __neg__(self) -> GradeElement:
        return GradeElement(self.group, tuple(-a for a in self.free), tuple(-a for a in self.torsion))

    def __sub__(self, other: GradeElement) -> GradeElement:
        return self + (-other)

    def __eq__(self, other):
        if not isinstance(other, GradeElement):
            return NotImplemented
        return (
            self.free == other.free
            and self.torsion == other.torsion
            and (self.group is other.group or self.group == other.group)
        )

    def __hash__(self):
        return self._hash

    def __lt__(self, other: GradeElement):
        return self.components < other.components

    def __repr__(self):
        return f"GradeElement({list(self.components)})"

    def __str__(self):
        c = self.components
        return str(c[0]) if len(c) == 1 else str(list(c))


def grade_add(a: GradeElement, b: GradeElement) -> GradeElement:
    return a + b


def grade_neg(a: GradeElement) -> GradeElement:
    return -a


def grade_zero(g: GradeGroup) -> GradeElement:
    return g.zero()


TRIVIAL = GradeGroup()
INTEGERS = GradeGroup(free_rank=1)


def cyclic(n: int) -> GradeGroup:
    return GradeGroup(torsion_orders=(n,))
