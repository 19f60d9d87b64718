"""Constructive factorization certificates in elementary generators.

Every constructor returns a :class:`Certificate` whose word is evaluated by
exact matrix arithmetic and compared with an independently computed claim.
Block unipotent factors (I X; 0 I) are expanded into one letter
e_{i, n+j}(X_ij) per nonzero entry.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from .errors import CertificateError, FamilyError, IdealError, NotInvertibleError
from .matrices import (
    ElementaryGenerator,
    GradedMatrix,
    ShiftFamily,
    block_diag,
    block_matrix,
    commutator,
    elementary,
    identity,
    invert,
    map_entries,
    matmul,
    stabilize,
)
from .rings import DoubleRing, GradedIdeal, HomogeneousElement, strong_grading_witness


@dataclass(frozen=True)
class Letter:
    gen: ElementaryGenerator
    exponent: int = 1

    def __post_init__(self):
        if self.exponent not in (1, -1):
            raise ValueError("exponent must be +1 or -1")

    @property
    def family(self) -> ShiftFamily:
        return self.gen.family

    def inverse(self) -> Letter:
        return Letter(self.gen, -self.exponent)

    def to_dict(self) -> dict:
        g = self.gen
        return {
            "i": g.i + 1,
            "j": g.j + 1,
            "r": g.r.literal(),
            "degree": list(g.r.degree.components),
            "exponent": self.exponent,
        }

    def __str__(self):
        s = str(self.gen)
        return s if self.exponent == 1 else s + "^-1"


@dataclass(frozen=True)
class ConjugateLetter:
    """S * T * S^-1 with S a word and T a single letter."""

    conjugator: ElementaryWord
    letter: Letter

    @property
    def family(self) -> ShiftFamily:
        return self.letter.family

    def inverse(self) -> ConjugateLetter:
        return ConjugateLetter(self.conjugator, self.letter.inverse())

    def to_dict(self) -> dict:
        return {
            "conjugator": [x.to_dict() for x in self.conjugator.letters],
            "letter": self.letter.to_dict(),
        }

    def __str__(self):
        return f"[{self.conjugator}] {self.letter} [{self.conjugator}]^-1"


AnyLetter = Union[Letter, ConjugateLetter]


@dataclass(frozen=True)
class ElementaryWord:
    family: ShiftFamily
    letters: tuple[AnyLetter, ...] = ()

    def __post_init__(self):
        letters = tuple(self.letters)
        for x in letters:
            if x.family != self.family:
                raise FamilyError(f"letter {x} is over {x.family}, word is over {self.family}")
        object.__setattr__(self, "letters", letters)

    def __add__(self, other: ElementaryWord) -> ElementaryWord:
        return ElementaryWord(self.family, self.letters + other.letters)

    def __len__(self):
        return len(self.letters)

    def inverse(self) -> ElementaryWord:
        return ElementaryWord(self.family, tuple(x.inverse() for x in reversed(self.letters)))

    def evaluate(self, ring) -> GradedMatrix:
        return evaluate_word(self, ring)

    def to_list(self) -> list:
        return [x.to_dict() for x in self.letters]

    def __str__(self):
        return " ".join(str(x) for x in self.letters) or "1"


def _apply_right(rows: list[list[HomogeneousElement]], letter: Letter):
    """rows <- rows * e_{i,j}(+-r): column j += column i * (+-r)."""
    g = letter.gen
    r = g.r if letter.exponent == 1 else -g.r
    if r.is_zero():
        return
    i, j = g.i, g.j
    for row in rows:
        x = row[i]
        if not x.is_zero():
            row[j] = row[j] + x * r


def evaluate_word(word: ElementaryWord, ring) -> GradedMatrix:
    ident = identity(ring, word.family)
    rows = [list(r) for r in ident.entries]
    for x in word.letters:
        if isinstance(x, Letter):
            _apply_right(rows, x)
        else:
            cur = GradedMatrix(ring, word.family, ident.degree, rows, check=False)
            s = evaluate_word(x.conjugator, ring)
            t = elementary(x.letter.gen) if x.letter.exponent == 1 else elementary(x.letter.gen.inverse())
            s_inv = evaluate_word(x.conjugator.inverse(), ring)
            rows = [list(r) for r in matmul(cur, matmul(matmul(s, t), s_inv)).entries]
    return GradedMatrix(ring, word.family, ident.degree, rows)


@dataclass
class Certificate:
    claim: GradedMatrix
    word: ElementaryWord
    verified: bool = False
    kind: str = ""
    notes: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "family": self.claim.family.to_list(),
            "claim": self.claim.to_literal(),
            "letters": self.word.to_list(),
            "length": len(self.word),
            "verified": self.verified,
        }


def certify(claim: GradedMatrix, word: ElementaryWord, kind: str = "", **notes) -> Certificate:
    value = evaluate_word(word, claim.ring)
    return Certificate(claim, word, value == claim, kind, notes)


# ---------------------------------------------------------------------------
# block helpers


def _upper(family: ShiftFamily, n: int, block, sign: int = 1) -> list[Letter]:
    """Letters of (I X; 0 I) with X = block (n x k) in the upper-right corner."""
    out = []
    for i, row in enumerate(block):
        for j, x in enumerate(row):
            if not x.is_zero():
                out.append(Letter(ElementaryGenerator(family, i, n + j, x if sign > 0 else -x)))
    return out


def _lower(family: ShiftFamily, n: int, block, sign: int = 1) -> list[Letter]:
    """Letters of (I 0; X I) with X = block (k x n) in the lower-left corner."""
    out = []
    for i, row in enumerate(block):
        for j, x in enumerate(row):
            if not x.is_zero():
                out.append(Letter(ElementaryGenerator(family, n + i, j, x if sign > 0 else -x)))
    return out


def _scalar_block(ring, family: ShiftFamily, r: HomogeneousElement, rows_off: int, cols_off: int, n: int):
    """n x n block with r on the diagonal, zeros of the forced degrees elsewhere."""
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            if i == j:
                row.append(r)
            else:
                row.append(ring.zero(family[rows_off + i] - family[cols_off + j]))
        out.append(row)
    return out


def _require_invertible(m: GradedMatrix, what: str) -> GradedMatrix:
    try:
        return invert(m)
    except NotInvertibleError:
        raise NotInvertibleError(f"{what} is not invertible") from None


# ---------------------------------------------------------------------------
# certificates


def hyperbolic_factorization(h: GradedMatrix) -> Certificate:
    """diag(h, h^-1) = (I h; 0 I)(I 0; -h^-1 I)(I h; 0 I)(0 -I; I 0)."""
    h_inv = _require_invertible(h, "h")
    n = h.n
    fam = h.family + h.family
    ring = h.ring
    one = _scalar_block(ring, fam, ring.one(), 0, n, n)
    letters = (
        _upper(fam, n, h.entries)
        + _lower(fam, n, h_inv.entries, sign=-1)
        + _upper(fam, n, h.entries)
        + _upper(fam, n, one, sign=-1)
        + _lower(fam, n, one)
        + _upper(fam, n, one, sign=-1)
    )
    claim = block_diag(h, h_inv)
    return certify(claim, ElementaryWord(fam, tuple(letters)), "hyperbolic")


def commutator_embedding(g: GradedMatrix, h: GradedMatrix) -> Certificate:
    """diag([g,h], I) = diag(gh, (gh)^-1) diag(g^-1, g) diag(h^-1, h)."""
    g_inv = _require_invertible(g, "g")
    h_inv = _require_invertible(h, "h")
    w = (
        hyperbolic_factorization(g @ h).word
        + hyperbolic_factorization(g_inv).word
        + hyperbolic_factorization(h_inv).word
    )
    claim = stabilize(commutator(g, h), 2)
    return certify(claim, w, "commutator")


def stable_perfectness_witness(gen: ElementaryGenerator, n: int | None = None) -> Certificate:
    """e_{i,j}(r) (stabilized) = [e_{i,n+j}(r), e_{n+j,j}(1)] over the doubled family."""
    fam = gen.family
    if n is None:
        n = len(fam)
    if n != len(fam):
        raise FamilyError(f"generator family has size {len(fam)}, not {n}")
    big = fam + fam
    claim = stabilize(elementary(gen), 2)
    if gen.r.is_zero():
        return certify(claim, ElementaryWord(big), "stable-perfectness")
    a = Letter(ElementaryGenerator(big, gen.i, n + gen.j, gen.r))
    b = Letter(ElementaryGenerator(big, n + gen.j, gen.j, gen.ring.one()))
    word = ElementaryWord(big, (a, b, a.inverse(), b.inverse()))
    return certify(claim, word, "stable-perfectness")


def strongly_graded_perfectness_witness(gen: ElementaryGenerator, k: int | None = None) -> Certificate:
    """e_{i,j}(r) as a product of commutators [e_{i,k}(s_l), e_{k,j}(t_l)] without stabilizing."""
    fam = gen.family
    n = len(fam)
    if n < 3:
        raise FamilyError("needs a family of size >= 3")
    if k is None:
        k = min(x for x in range(n) if x not in (gen.i, gen.j))
    elif k in (gen.i, gen.j) or not 0 <= k < n:
        raise FamilyError(f"k={k + 1} must differ from i and j")
    claim = elementary(gen)
    r = gen.r
    letters: list[Letter] = []
    if not r.is_zero():
        pairs = strong_grading_witness(gen.ring, fam[k] - fam[gen.j])
        for s_w, t_w in pairs:
            s = r * s_w
            if s.is_zero() or t_w.is_zero():
                continue
            a = Letter(ElementaryGenerator(fam, gen.i, k, s))
            b = Letter(ElementaryGenerator(fam, k, gen.j, t_w))
            letters += [a, b, a.inverse(), b.inverse()]
    return certify(claim, ElementaryWord(fam, tuple(letters)), "strong-perfectness", k=k)


def _rotation_letters(fam: ShiftFamily, n: int, r: HomogeneousElement, r_inv: HomogeneousElement) -> list[Letter]:
    ring = r.ring
    up = _scalar_block(ring, fam, r_inv, 0, n, n)
    low = _scalar_block(ring, fam, r, n, 0, n)
    return _upper(fam, n, up, sign=-1) + _lower(fam, n, low) + _upper(fam, n, up, sign=-1)


def rotation_factorization(r: HomogeneousElement, n: int, family: ShiftFamily) -> Certificate:
    """(0 -r^-1 I; r I 0) over (alpha, lambda + alpha) with lambda = deg r."""
    if len(family) != n:
        raise FamilyError(f"family has size {len(family)}, not {n}")
    ring = r.ring
    if not ring.is_unit(r):
        raise NotInvertibleError(f"{r} is not invertible")
    r_inv = ring.unit_inverse(r)
    fam = family + family.shifted(r.degree)
    zero_tl = _scalar_block(ring, fam, ring.zero(), 0, 0, n)
    zero_br = _scalar_block(ring, fam, ring.zero(), n, n, n)
    claim = block_matrix(
        zero_tl,
        _scalar_block(ring, fam, -r_inv, 0, n, n),
        _scalar_block(ring, fam, r, n, 0, n),
        zero_br,
        fam,
    )
    word = ElementaryWord(fam, tuple(_rotation_letters(fam, n, r, r_inv)))
    return certify(claim, word, "rotation")


def conjugate_block_factorization(h: GradedMatrix, r: HomogeneousElement) -> Certificate:
    """diag(h, r h^-1 r^-1) = (I hr^-1; 0 I)(I 0; -rh^-1 I)(I hr^-1; 0 I)(0 -r^-1 I; r I 0)."""
    h_inv = _require_invertible(h, "h")
    ring = h.ring
    if not ring.is_unit(r):
        raise NotInvertibleError(f"{r} is not invertible")
    r_inv = ring.unit_inverse(r)
    n = h.n
    fam = h.family + h.family.shifted(r.degree)
    h_r = [[x * r_inv for x in row] for row in h.entries]
    r_h = [[r * x for x in row] for row in h_inv.entries]
    letters = (
        _upper(fam, n, h_r)
        + _lower(fam, n, r_h, sign=-1)
        + _upper(fam, n, h_r)
        + _rotation_letters(fam, n, r, r_inv)
    )
    lower_block = [[r * x * r_inv for x in row] for row in h_inv.entries]
    shifted = GradedMatrix(ring, h.family.shifted(r.degree), h.degree, lower_block)
    claim = block_diag(h, shifted)
    return certify(claim, ElementaryWord(fam, tuple(letters)), "conjugate-block")


def relative_rewrite(word: ElementaryWord, g: GradedMatrix, ideal: GradedIdeal | None = None) -> Certificate:
    """Rewrite a word over D(A, I) evaluating to (1, g) as E(A)-conjugates of letters in I.

    Letter k is e(a_k, b_k) = (S_k, S_k T_k) with S_k = e(a_k), T_k = e(b_k - a_k);
    since S_1 ... S_r = 1, g = prod_k P_k T_k P_k^-1 with P_k = S_1 ... S_k.
    """
    if not word.letters:
        raise CertificateError("empty word")
    dring = word.letters[0].gen.ring if isinstance(word.letters[0], Letter) else None
    if not isinstance(dring, DoubleRing):
        raise CertificateError("relative_rewrite needs a word over a double ring")
    base = dring.base
    ideal = ideal or dring.ideal
    fam = word.family
    value = evaluate_word(word, dring)
    first = map_entries(value, dring.p1, base)
    if not first.is_identity():
        raise CertificateError("word does not project to the identity under p1")
    second = map_entries(value, dring.p2, base)
    if second != g:
        raise CertificateError("word does not evaluate to (1, g)")
    prefix: list[Letter] = []
    out: list[ConjugateLetter] = []
    for x in word.letters:
        if not isinstance(x, Letter):
            raise CertificateError("relative_rewrite expects plain elementary letters")
        gen = x.gen if x.exponent == 1 else x.gen.inverse()
        a = dring.p1(gen.r)
        b = dring.p2(gen.r)
        s = Letter(ElementaryGenerator(fam, gen.i, gen.j, a))
        prefix.append(s)
        diff = b - a
        if not ideal.contains(diff):
            raise IdealError(f"{diff} is not in the ideal")
        if diff.is_zero():
            continue
        t = Letter(ElementaryGenerator(fam, gen.i, gen.j, diff))
        out.append(ConjugateLetter(ElementaryWord(fam, tuple(prefix)), t))
    return certify(g, ElementaryWord(fam, tuple(out)), "relative")

