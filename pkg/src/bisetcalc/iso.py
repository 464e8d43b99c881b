"""Isomorphism of biset presentations.

A witness ``(sigma, g)`` maps the basis of the first table into the second,
``y_i -> g_i * x_sigma(i)``.  It is valid when every relation
``y_i * g_j = h * y_k`` of the first table is carried to a relation of the
second, i.e. when the second table has ``x_sigma(i) * g_j = c * x_sigma(k)``
with ``h = g_i * c * g_k^-1``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache

from .biset import BisetTable, InvalidTable, check_consistency, is_transitive, precompose
from .canonical import loop_signature, pretwist_invariant, sheet_loops
from .freegroup import (
    ConjugacySolutionSet,
    Word,
    format_word,
    parse_word,
    shortlex_key,
    solve_conjugacy_system,
)
from .mcg import (
    Automorphism,
    all_twist_indices,
    compose,
    invert,
    twist_generator,
)


class DimensionMismatch(ValueError):
    pass


@dataclass(frozen=True)
class IsoWitness:
    sigma: tuple[int, ...]  # sigma[i-1] = sigma(i)
    g: tuple[Word, ...]

    def total_length(self) -> int:
        return sum(len(w) for w in self.g)

    def key(self) -> tuple:
        return (self.total_length(), tuple(shortlex_key(w) for w in self.g), self.sigma)

    def inverse(self) -> "IsoWitness":
        d = len(self.sigma)
        inv = [0] * d
        for i, s in enumerate(self.sigma, 1):
            inv[s - 1] = i
        return IsoWitness(tuple(inv), tuple(~self.g[inv[m] - 1] for m in range(d)))

    def then(self, other: "IsoWitness") -> "IsoWitness":
        """Witness for a -> c from self: a -> b and other: b -> c."""
        return IsoWitness(
            tuple(other.sigma[s - 1] for s in self.sigma),
            tuple(gi * other.g[s - 1] for gi, s in zip(self.g, self.sigma)),
        )

    @classmethod
    def identity(cls, d: int, n: int) -> "IsoWitness":
        return cls(tuple(range(1, d + 1)), tuple(Word.identity(n) for _ in range(d)))


def _check_dims(a: BisetTable, b: BisetTable):
    if (a.d, a.n) != (b.d, b.n):
        raise DimensionMismatch(f"(d,n) = ({a.d},{a.n}) vs ({b.d},{b.n})")


def verify_iso(a: BisetTable, b: BisetTable, w: IsoWitness) -> bool:
    _check_dims(a, b)
    d = a.d
    if sorted(w.sigma) != list(range(1, d + 1)) or len(w.g) != d:
        return False
    if any(x.rank != a.n for x in w.g):
        return False
    for i in range(1, d + 1):
        for j in range(1, a.n + 2):
            h, k = a.entry(i, j)
            c, m = b.entry(w.sigma[i - 1], j)
            if m != w.sigma[k - 1]:
                return False
            if w.g[i - 1] * c * ~w.g[k - 1] != h:
                return False
    return True


def _spanning_tree(a: BisetTable):
    """BFS order from sheet 1: list of (parent, column, child) tree edges."""
    seen = {1}
    order = [1]
    edges = []
    for i in order:
        for j in range(1, a.n + 2):
            k = a.entry(i, j)[1]
            if k not in seen:
                seen.add(k)
                order.append(k)
                edges.append((i, j, k))
    return edges


def _best_in_coset(U, V, sol: ConjugacySolutionSet, n: int):
    """Choose X = g^-1 over the solution set minimizing the witness size."""

    def build(x: Word):
        return tuple(u * x * v for u, v in zip(U, V))

    if sol.kind == "all":
        return build(Word.identity(n))
    if not sol.root:
        return build(~sol.base)
    total = sum(len(u) + len(v) for u, v in zip(U, V)) + len(sol.base)
    bound = total // max(1, len(sol.root)) + 2
    best = None
    for k in range(-bound, bound + 1):
        g = build(~sol.sample(k))
        key = (sum(len(x) for x in g), tuple(shortlex_key(x) for x in g))
        if best is None or key < best[0]:
            best = (key, g)
    return best[1]


def _candidate(a: BisetTable, b: BisetTable, m: int, tree) -> IsoWitness | None:
    n, d = a.n, a.d
    e = Word.identity(n)
    sigma = {1: m}
    U = {1: e}
    V = {1: e}
    for (i, j, k) in tree:
        h, _ = a.entry(i, j)
        c, target = b.entry(sigma[i], j)
        if target in sigma.values():
            return None
        sigma[k] = target
        U[k] = ~h * U[i]
        V[k] = V[i] * c
    tree_set = {(i, j) for (i, j, _) in tree}
    equations = []
    for i in range(1, d + 1):
        for j in range(1, n + 2):
            if (i, j) in tree_set:
                continue
            h, k = a.entry(i, j)
            c, target = b.entry(sigma[i], j)
            if target != sigma[k]:
                return None
            # U_k X V_k = h^-1 U_i X V_i c  <=>  g^-1 A g = B with g = X^-1
            A = V[k] * ~c * ~V[i]
            B = ~U[k] * ~h * U[i]
            equations.append((A, B))
    sol = solve_conjugacy_system(equations) if equations else ConjugacySolutionSet("all")
    if sol.kind == "empty":
        return None
    order = list(range(1, d + 1))
    g = _best_in_coset([U[i] for i in order], [V[i] for i in order], sol, n)
    return IsoWitness(tuple(sigma[i] for i in order), g)


def decide_iso(a: BisetTable, b: BisetTable) -> IsoWitness | None:
    """A verified isomorphism witness from a to b, or None if none exists."""
    _check_dims(a, b)
    for t in (a, b):
        if not check_consistency(t).ok:
            raise InvalidTable("decide_iso needs consistent tables")
    if not is_transitive(a) or not is_transitive(b):
        raise InvalidTable("decide_iso needs transitive tables")
    return _decide(a, b)


def _decide(a: BisetTable, b: BisetTable) -> IsoWitness | None:
    tree = _spanning_tree(a)
    best = None
    for m in range(1, a.d + 1):
        w = _candidate(a, b, m, tree)
        if w is None:
            continue
        assert verify_iso(a, b, w), "constructed witness failed verification"
        if best is None or w.key() < best.key():
            best = w
    return best


class _Candidates:
    """Lazily grown list of twist words in length-lex order, one per action."""

    def __init__(self, n: int):
        gens = [twist_generator(t, n) for t in all_twist_indices(n)]
        self.letters = [x for t in gens for x in (t, invert(t))]
        ident = Automorphism.identity(n)
        self.seen = {ident.images}
        self.levels = [[ident]]

    def level(self, length: int) -> list[Automorphism]:
        while len(self.levels) <= length:
            nxt = []
            for a in self.levels[-1]:
                for x in self.letters:
                    b = compose(a, x)
                    if b.images not in self.seen:
                        self.seen.add(b.images)
                        nxt.append(b)
            self.levels.append(nxt)
        return self.levels[length]


@lru_cache(maxsize=16)
def _candidates(n: int) -> _Candidates:
    return _Candidates(n)


def pretwist_candidates(n: int, bound: int):
    """Twist words of length <= bound in length-lex order, deduplicated by action."""
    cache = _candidates(n)
    for length in range(bound + 1):
        yield from cache.level(length)


def decide_iso_up_to_pretwist(
    a: BisetTable, b: BisetTable, bound: int
) -> tuple[IsoWitness, Automorphism] | None:
    """Search psi of twist length <= bound with a isomorphic to b o psi.

    None means no such psi was found within the bound, except when the
    pretwist invariant of the two tables differs, which rules out every psi.
    """
    _check_dims(a, b)
    if pretwist_invariant(a) != pretwist_invariant(b):
        return None
    for t in (a, b):
        if not check_consistency(t).ok or not is_transitive(t):
            raise InvalidTable("decide_iso_up_to_pretwist needs consistent transitive tables")
    wanted = loop_signature(sheet_loops(a))
    b_loops = sheet_loops(b)
    for psi in pretwist_candidates(a.n, bound):
        # twist words are pure, so no peripheral check is needed here
        if loop_signature(b_loops, psi) != wanted:
            continue
        target = precompose(b, psi)
        w = _decide(a, target)
        if w is not None:
            assert verify_iso(a, target, w)
            return w, psi
    return None


# ---------------------------------------------------------------- text format


def witness_to_dict(w: IsoWitness) -> dict:
    return {"sigma": list(w.sigma), "g": [format_word(x) for x in w.g]}


def witness_from_dict(data: dict, n: int) -> IsoWitness:
    try:
        sigma = tuple(int(s) for s in data["sigma"])
        g = tuple(parse_word(x, n) for x in data["g"])
    except (KeyError, TypeError) as exc:
        raise ValueError(f"witness document needs 'sigma' and 'g': {exc}")
    return IsoWitness(sigma, g)


def witness_dumps(w: IsoWitness) -> str:
    return json.dumps(witness_to_dict(w)) + "\n"


def witness_loads(text: str, n: int) -> IsoWitness:
    return witness_from_dict(json.loads(text), n)


def witness_text(w: IsoWitness, src: str = "y", dst: str = "x") -> str:
    lines = []
    for i, (s, x) in enumerate(zip(w.sigma, w.g), 1):
        coeff = "" if not x else f"{format_word(x)} . "
        lines.append(f"{src}_{i} -> {coeff}{dst}_{s}")
    return "\n".join(lines)


__all__ = [
    "DimensionMismatch",
    "IsoWitness",
    "decide_iso",
    "decide_iso_up_to_pretwist",
    "pretwist_candidates",
    "verify_iso",
    "witness_dumps",
    "witness_from_dict",
    "witness_loads",
    "witness_text",
    "witness_to_dict",
]
