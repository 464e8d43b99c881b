"""Words in the fundamental group of the n-punctured plane.

The group is presented as ``<g1, ..., gn, ginf | ginf*gn*...*g1 = 1>``, which
is free of rank n on g1..gn.  Words are stored as freely reduced tuples of
signed generator indices; ``ginf`` is eliminated on input via
``ginf = (gn*...*g1)^-1``.  In raw (unreduced) input, the index ``n + 1``
stands for ``ginf``.

Conjugation follows ``g^h = h^-1 * g * h``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .grammar import Algebra, ParseError, Parser


class MalformedWord(ValueError):
    pass


class RankMismatch(ValueError):
    pass


def _free_reduce(letters: Iterable[int]) -> tuple[int, ...]:
    out: list[int] = []
    for x in letters:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


@dataclass(frozen=True)
class Word:
    """A freely reduced word over g1..gn.

    Build words with :func:`reduce` or :meth:`Word.gen`; the constructor
    trusts its input.
    """

    letters: tuple[int, ...]
    rank: int

    @classmethod
    def identity(cls, rank: int) -> "Word":
        return cls((), rank)

    @classmethod
    def gen(cls, i: int, rank: int) -> "Word":
        """The generator g_i; ``i = rank + 1`` gives ginf in normal form."""
        return reduce([i], rank)

    def __len__(self) -> int:
        return len(self.letters)

    def __bool__(self) -> bool:
        return bool(self.letters)

    def is_identity(self) -> bool:
        return not self.letters

    def _check(self, other: "Word"):
        if self.rank != other.rank:
            raise RankMismatch(f"rank {self.rank} vs {other.rank}")

    def __mul__(self, other: "Word") -> "Word":
        self._check(other)
        a, b = self.letters, other.letters
        k = 0
        while k < len(a) and k < len(b) and a[-1 - k] == -b[k]:
            k += 1
        return Word(a[: len(a) - k] + b[k:], self.rank)

    def __invert__(self) -> "Word":
        return Word(tuple(-x for x in reversed(self.letters)), self.rank)

    def __pow__(self, k: int) -> "Word":
        if k < 0:
            return (~self) ** (-k)
        result = Word.identity(self.rank)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __xor__(self, h: "Word") -> "Word":
        return conjugate(self, h)

    def __lt__(self, other: "Word") -> bool:
        return shortlex_key(self) < shortlex_key(other)

    def __str__(self) -> str:
        return format_word(self)

    def __repr__(self) -> str:
        return f"Word({format_word(self)!r}, rank={self.rank})"


def shortlex_key(w: Word) -> tuple:
    # g1 < g1^-1 < g2 < g2^-1 < ...
    return (len(w.letters), tuple(2 * abs(x) + (x < 0) for x in w.letters))


def reduce(raw: Sequence[int], rank: int) -> Word:
    """Normal form of a raw sequence of signed indices in {1..n, n+1 = inf}."""
    if rank < 2:
        raise MalformedWord(f"rank must be at least 2, got {rank}")
    expanded: list[int] = []
    for x in raw:
        a = abs(x)
        if x == 0 or a > rank + 1 or int(x) != x:
            raise MalformedWord(f"generator index {x} outside 1..{rank} or inf")
        if a == rank + 1:
            # ginf = g1^-1 g2^-1 ... gn^-1
            seq = [-k for k in range(1, rank + 1)]
            if x < 0:
                seq = [-y for y in reversed(seq)]
            expanded.extend(seq)
        else:
            expanded.append(int(x))
    return Word(_free_reduce(expanded), rank)


def multiply(a: Word, b: Word) -> Word:
    return a * b


def invert(a: Word) -> Word:
    return ~a


def conjugate(g: Word, h: Word) -> Word:
    """``g^h = h^-1 g h``."""
    return ~h * g * h


def product(words: Iterable[Word], rank: int) -> Word:
    result = Word.identity(rank)
    for w in words:
        result = result * w
    return result


def cyclic_reduce(a: Word) -> tuple[Word, Word]:
    """Return ``(core, c)`` with core cyclically reduced and ``a == core^c``."""
    x = a.letters
    k = 0
    while 2 * k + 1 < len(x) and x[k] == -x[-1 - k]:
        k += 1
    core = Word(x[k : len(x) - k], a.rank)
    conj = Word(x[len(x) - k :], a.rank)
    return core, conj


def _encode(letters: tuple[int, ...]) -> str:
    # one character per letter, so rotations can be found by substring search
    return "".join(chr(0x4E00 + x) for x in letters)


def _rotation_offset(core: tuple[int, ...], target: tuple[int, ...]) -> int | None:
    """The r with ``core[r:] + core[:r] == target``, or None."""
    if len(core) != len(target):
        return None
    doubled = _encode(core) * 2
    r = doubled.find(_encode(target))
    return None if r < 0 else r


def are_conjugate(a: Word, b: Word) -> Word | None:
    """A witness ``w`` with ``a^w == b``, or None if a and b are not conjugate."""
    a._check(b)
    if len(a) % 2 != len(b) % 2:
        return None
    ca, ea = cyclic_reduce(a)
    cb, eb = cyclic_reduce(b)
    if len(ca) != len(cb):
        return None
    if not ca:
        w = Word.identity(a.rank)
    else:
        r = _rotation_offset(ca.letters, cb.letters)
        if r is None:
            return None
        # core = u v and the rotation v u equals u^-1 core u
        w = ~ea * Word(ca.letters[:r], a.rank) * eb
    assert conjugate(a, w) == b
    return w


def root(w: Word) -> Word:
    """The primitive root r of w (w = r^k, k >= 1); the identity for the identity."""
    core, c = cyclic_reduce(w)
    x = core.letters
    m = len(x)
    for p in range(1, m + 1):
        if m % p == 0 and x == x[:p] * (m // p):
            return conjugate(Word(x[:p], w.rank), c)
    return w


def centralizer_generator(w: Word) -> Word:
    """Generator of the (cyclic) centralizer of a nontrivial w."""
    return root(w)


@dataclass(frozen=True)
class ConjugacySolutionSet:
    """Solutions of ``g^-1 A_t g = B_t``.

    kind "empty": no solution; kind "all": every g; kind "coset": exactly
    ``{base * root^k : k in Z}`` (root trivial means the single solution base).
    """

    kind: str
    base: Word | None = None
    root: Word | None = None

    def __contains__(self, g: Word) -> bool:
        if self.kind == "empty":
            return False
        if self.kind == "all":
            return True
        x = ~self.base * g
        if not self.root:
            return not x
        if not x:
            return True
        return root(x) in (self.root, ~self.root) and _is_power_of(x, self.root)

    def sample(self, k: int) -> Word:
        if self.kind != "coset":
            raise ValueError(f"cannot sample a solution set of kind {self.kind}")
        return self.base * self.root**k


def _is_power_of(x: Word, r: Word) -> bool:
    if not r:
        return not x
    k = len(x) // max(1, len(cyclic_reduce(r)[0])) + 1
    return any(r**e == x for e in range(-k, k + 1))


def _conjugating_power(a: Word, b: Word, r: Word) -> int | None:
    """The k with ``a^(r^k) == b``, for a not commuting with r (at most one exists)."""
    core, c = cyclic_reduce(r)
    # beyond this many steps the conjugates grow by 2*|core| per step
    bound = (2 * len(a) + len(b) + 4 * len(c)) // max(1, len(core)) + 3
    up = down = a
    if a == b:
        return 0
    for k in range(1, bound + 1):
        up = ~r * up * r
        if up == b:
            return k
        down = r * down * ~r
        if down == b:
            return -k
    return None


def solve_conjugacy_system(pairs: Sequence[tuple[Word, Word]]) -> ConjugacySolutionSet:
    """All g with ``conjugate(A, g) == B`` for every pair (A, B)."""
    if not pairs:
        raise ValueError("need at least one equation")
    rank = pairs[0][0].rank
    trivial = [(a, b) for a, b in pairs if not a]
    if any(b for _, b in trivial):
        return ConjugacySolutionSet("empty")
    active = [(a, b) for a, b in pairs if a]
    if not active:
        return ConjugacySolutionSet("all")

    a0, b0 = active[0]
    w0 = are_conjugate(a0, b0)
    if w0 is None:
        return ConjugacySolutionSet("empty")
    # solutions of the first equation: w0 * <root(b0)>
    base, r = w0, root(b0)
    for a, b in active[1:]:
        if not r:
            if conjugate(a, base) != b:
                return ConjugacySolutionSet("empty")
            continue
        # g = base r^k; need r^-k a' r^k = b with a' = a^base
        a1 = conjugate(a, base)
        if conjugate(a1, r) == a1:
            # a1 commutes with r, so the condition is independent of k
            if a1 != b:
                return ConjugacySolutionSet("empty")
            continue
        found = _conjugating_power(a1, b, r)
        if found is None:
            return ConjugacySolutionSet("empty")
        base, r = base * r**found, Word.identity(rank)
    result = ConjugacySolutionSet("coset", base, r)
    assert all(conjugate(a, base) == b for a, b in pairs)
    return result


# ---------------------------------------------------------------- text format


def format_word(w: Word) -> str:
    if not w.letters:
        return "1"
    parts = []
    x = w.letters
    i = 0
    while i < len(x):
        j = i
        while j < len(x) and x[j] == x[i]:
            j += 1
        e = (j - i) * (1 if x[i] > 0 else -1)
        name = f"g{abs(x[i])}"
        parts.append(name if e == 1 else f"{name}^{e}")
        i = j
    return "*".join(parts)


def word_algebra(rank: int) -> Algebra[Word]:
    return Algebra(
        identity=lambda: Word.identity(rank),
        multiply=lambda a, b: a * b,
        power=lambda a, k: a**k,
        conjugate=conjugate,
    )


def _word_atom(rank: int):
    def atom(p: Parser[Word]) -> Word | None:
        tok = p.current
        if tok.kind != "name" or not tok.value.startswith("g"):
            return None
        tail = tok.value[1:]
        if tail == "inf":
            idx = rank + 1
        elif tail.isdigit() and 1 <= int(tail) <= rank:
            idx = int(tail)
        else:
            p.fail(f"unknown generator (expected g1..g{rank} or ginf)")
        p.advance()
        return Word.gen(idx, rank)

    return atom


def parse_word(text: str, rank: int) -> Word:
    """Parse the word grammar, e.g. ``g1^(ginf^-1*g3) * g2^2``."""
    if rank < 2:
        raise MalformedWord(f"rank must be at least 2, got {rank}")
    return Parser(text, word_algebra(rank), _word_atom(rank)).parse()


__all__ = [
    "ConjugacySolutionSet",
    "MalformedWord",
    "ParseError",
    "RankMismatch",
    "Word",
    "are_conjugate",
    "centralizer_generator",
    "conjugate",
    "cyclic_reduce",
    "format_word",
    "invert",
    "multiply",
    "parse_word",
    "product",
    "reduce",
    "root",
    "shortlex_key",
    "solve_conjugacy_system",
]
