"""Pure mapping class group of the (n+1)-punctured sphere acting on words.

Mapping classes are kept as words in the twist generators ``t(i,j)``
(``1 <= i < j <= n+1``, with ``n+1`` standing for infinity) together with the
images of g1..gn, which are authoritative for :func:`apply`.

Products act left to right: ``apply(a * b, w) == apply(b, apply(a, w))``,
so ``t(i,inf)*t(i,n)*t(n,inf)`` applies ``t(i,inf)`` first.  Conjugation is
``a^b = b^-1 * a * b``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

from .freegroup import (
    RankMismatch,
    Word,
    are_conjugate,
    conjugate,
    product,
    shortlex_key,
)
from .grammar import Algebra, Parser

INF = "inf"


class InvalidTwist(ValueError):
    pass


@dataclass(frozen=True, order=True)
class TwistIndex:
    i: int
    j: int  # n + 1 encodes infinity

    def validate(self, n: int) -> "TwistIndex":
        if not (1 <= self.i < self.j <= n + 1):
            raise InvalidTwist(f"twist index ({self.i},{self.j}) outside 1 <= i < j <= {n}+1")
        return self

    def label(self, n: int) -> str:
        j = INF if self.j == n + 1 else str(self.j)
        return f"t({self.i},{j})"


def _alpha(i: int, j: int, n: int) -> Word:
    # g_{j-1} g_{j-2} ... g_{i+1}
    return product((Word.gen(k, n) for k in range(j - 1, i, -1)), n)


@lru_cache(maxsize=None)
def _twist_images(i: int, j: int, n: int, sign: int) -> tuple[Word, ...]:
    images = [Word.gen(k, n) for k in range(1, n + 1)]
    a = _alpha(i, j, n)
    gi, gj = Word.gen(i, n), Word.gen(j, n)
    if sign > 0:
        new_i = conjugate(gi, ~a * gj * a * gi)
        new_j = conjugate(gj, a * gi * ~a)
    else:
        new_i = conjugate(gi, ~gi * ~a * ~gj * a)
        new_j = conjugate(gj, a * ~gi * ~a * ~gj)
    images[i - 1] = new_i
    if j <= n:
        images[j - 1] = new_j
    return tuple(images)


def _substitute(images: Sequence[Word], w: Word) -> Word:
    # one pass of free reduction over the concatenated images
    out: list[int] = []
    for x in w.letters:
        seq = images[x - 1].letters if x > 0 else [-y for y in reversed(images[-x - 1].letters)]
        for y in seq:
            if out and out[-1] == -y:
                out.pop()
            else:
                out.append(y)
    return Word(tuple(out), w.rank)


Letter = tuple[int, int, int]  # (i, j, +-1)


def _reduce_letters(letters: Iterable[Letter]) -> tuple[Letter, ...]:
    out: list[Letter] = []
    for (i, j, e) in letters:
        if out and out[-1] == (i, j, -e):
            out.pop()
        else:
            out.append((i, j, e))
    return tuple(out)


@dataclass(frozen=True)
class Automorphism:
    """A pure mapping class acting on the rank-n free group.

    ``word`` is a freely reduced sequence of ``(i, j, +-1)`` twist letters, or
    None for an automorphism given only by generator images.
    """

    rank: int
    word: tuple[Letter, ...] | None
    images: tuple[Word, ...] = field(compare=False)

    def __eq__(self, other):
        if not isinstance(other, Automorphism):
            return NotImplemented
        return self.rank == other.rank and self.images == other.images

    def __hash__(self):
        return hash((self.rank, self.images))

    @classmethod
    def identity(cls, n: int) -> "Automorphism":
        return cls(n, (), tuple(Word.gen(k, n) for k in range(1, n + 1)))

    @classmethod
    def from_word(cls, letters: Iterable[Letter], n: int) -> "Automorphism":
        letters = _reduce_letters(letters)
        images = tuple(Word.gen(k, n) for k in range(1, n + 1))
        for (i, j, e) in letters:
            TwistIndex(i, j).validate(n)
            step = _twist_images(i, j, n, e)
            # current acts first, then the new letter
            images = tuple(_substitute(step, w) for w in images)
        return cls(n, letters, images)

    @classmethod
    def from_images(cls, images: Sequence[Word]) -> "Automorphism":
        images = tuple(images)
        n = images[0].rank
        if len(images) != n:
            raise ValueError(f"need {n} images, got {len(images)}")
        return cls(n, None, images)

    def image(self, k: int) -> Word:
        """Image of g_k; ``k = n + 1`` gives the image of ginf."""
        if k == self.rank + 1:
            return ~product(reversed(self.images), self.rank)
        return self.images[k - 1]

    def __call__(self, w: Word) -> Word:
        return apply(self, w)

    def __mul__(self, other: "Automorphism") -> "Automorphism":
        return compose(self, other)

    def __invert__(self) -> "Automorphism":
        return invert(self)

    def __pow__(self, k: int) -> "Automorphism":
        base = self if k >= 0 else invert(self)
        out = Automorphism.identity(self.rank)
        for _ in range(abs(k)):
            out = compose(out, base)
        return out

    def __xor__(self, other: "Automorphism") -> "Automorphism":
        return conjugate_automorphism(self, other)

    def __str__(self) -> str:
        return format_mcg_word(self)

    def __repr__(self) -> str:
        return f"Automorphism({format_mcg_word(self)!r}, rank={self.rank})"


def twist_generator(idx: TwistIndex | tuple[int, int], n: int) -> Automorphism:
    if not isinstance(idx, TwistIndex):
        idx = TwistIndex(*idx)
    idx.validate(n)
    return Automorphism(n, ((idx.i, idx.j, 1),), _twist_images(idx.i, idx.j, n, 1))


def twist(i: int, j: int, n: int) -> Automorphism:
    """Shorthand for ``twist_generator(TwistIndex(i, j), n)``."""
    return twist_generator(TwistIndex(i, j), n)


def apply(a: Automorphism, w: Word) -> Word:
    if a.rank != w.rank:
        raise RankMismatch(f"automorphism rank {a.rank} vs word rank {w.rank}")
    return _substitute(a.images, w)


def compose(a: Automorphism, b: Automorphism) -> Automorphism:
    """``a * b``: apply a first, then b."""
    if a.rank != b.rank:
        raise RankMismatch(f"rank {a.rank} vs {b.rank}")
    images = tuple(_substitute(b.images, w) for w in a.images)
    word = None
    if a.word is not None and b.word is not None:
        word = _reduce_letters(a.word + b.word)
    return Automorphism(a.rank, word, images)


def invert(a: Automorphism) -> Automorphism:
    if a.word is None:
        raise ValueError("cannot invert an automorphism given only by images")
    return Automorphism.from_word(((i, j, -e) for (i, j, e) in reversed(a.word)), a.rank)


def conjugate_automorphism(a: Automorphism, b: Automorphism) -> Automorphism:
    """``a^b = b^-1 a b``."""
    return compose(compose(invert(b), a), b)


@dataclass(frozen=True)
class PeripheralReport:
    witnesses: dict  # k (1..n+1) -> Word or None
    ok: bool

    def failures(self) -> list[int]:
        return [k for k, w in self.witnesses.items() if w is None]


def is_peripheral_preserving(a: Automorphism) -> PeripheralReport:
    """For each puncture k, a conjugator taking g_k to a(g_k), or None."""
    n = a.rank
    witnesses = {}
    for k in range(1, n + 2):
        witnesses[k] = are_conjugate(Word.gen(k, n), a.image(k))
    return PeripheralReport(witnesses, all(w is not None for w in witnesses.values()))


def acts_equal(a: Automorphism, b: Automorphism) -> bool:
    return a.images == b.images


# ---------------------------------------------------------------- text format


def format_mcg_word(a: Automorphism) -> str:
    if a.word is None:
        return "[" + ", ".join(str(w) for w in a.images) + "]"
    if not a.word:
        return "1"
    n = a.rank
    parts = []
    k = 0
    x = a.word
    while k < len(x):
        m = k
        while m < len(x) and x[m] == x[k]:
            m += 1
        i, j, e = x[k]
        name = TwistIndex(i, j).label(n)
        e *= m - k
        parts.append(name if e == 1 else f"{name}^{e}")
        k = m
    return "*".join(parts)


def _mcg_algebra(n: int) -> Algebra[Automorphism]:
    return Algebra(
        identity=lambda: Automorphism.identity(n),
        multiply=compose,
        power=lambda a, k: a**k,
        conjugate=conjugate_automorphism,
    )


def _mcg_atom(n: int):
    def atom(p: Parser[Automorphism]) -> Automorphism | None:
        tok = p.current
        if tok.kind != "name" or tok.value != "t":
            return None
        p.advance()
        p.expect("(")
        i = p.integer()
        p.expect(",")
        if p.current.kind == "name" and p.current.value == INF:
            p.advance()
            j = n + 1
        else:
            j = p.integer()
        close = p.current
        p.expect(")")
        if not (1 <= i < j <= n + 1):
            p.i -= 1
            p.fail(f"twist index ({i},{j}) outside 1 <= i < j <= {n}+1 (before {close.value!r})")
        return twist(i, j, n)

    return atom


def parse_mcg_word(text: str, n: int) -> Automorphism:
    """Parse e.g. ``t(1,inf)^(t(3,inf)) * t(2,3)^-1``."""
    return Parser(text, _mcg_algebra(n), _mcg_atom(n)).parse()


def all_twist_indices(n: int) -> list[TwistIndex]:
    return [TwistIndex(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 2)]


def automorphism_key(a: Automorphism) -> tuple:
    return tuple(shortlex_key(w) for w in a.images)


__all__ = [
    "Automorphism",
    "InvalidTwist",
    "PeripheralReport",
    "TwistIndex",
    "acts_equal",
    "all_twist_indices",
    "apply",
    "automorphism_key",
    "compose",
    "conjugate_automorphism",
    "format_mcg_word",
    "invert",
    "is_peripheral_preserving",
    "parse_mcg_word",
    "twist",
    "twist_generator",
]
