"""Presentation tables of bisets.

A table for degree d and rank n records, for every basis element x_i and
every generator g_j (columns 1..n, then column n+1 for ginf), the relation
``x_i * g_j = c * x_k`` as the pair ``(c, k)``.  Sheets are numbered 1..d.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

from .freegroup import RankMismatch, Word, format_word, parse_word
from .mcg import Automorphism

Entry = tuple[Word, int]


class InvalidTable(ValueError):
    pass


@dataclass(frozen=True)
class BisetTable:
    d: int
    n: int
    rows: tuple[tuple[Entry, ...], ...]  # rows[i-1][j-1] = (coeff, sheet)

    def entry(self, i: int, j: int) -> Entry:
        return self.rows[i - 1][j - 1]

    def column_permutation(self, j: int) -> tuple[int, ...]:
        return tuple(self.rows[i][j - 1][1] for i in range(self.d))

    def with_entry(self, i: int, j: int, value: Entry) -> "BisetTable":
        rows = [list(r) for r in self.rows]
        rows[i - 1][j - 1] = value
        return BisetTable(self.d, self.n, tuple(tuple(r) for r in rows))

    def __str__(self) -> str:
        return pretty(self)


def _table(d: int, n: int, rows) -> BisetTable:
    return BisetTable(d, n, tuple(tuple(r) for r in rows))


def base_biset(d: int, n: int) -> BisetTable:
    """Presentation of z^d + c with an n-periodic critical point.

    x_1*g1 = ginf*gn*x_2,  x_i*g1 = x_{i+1} (1<i<d),  x_d*g1 = ginf^-1*x_1,
    x_1*g_{j+1} = g_j*x_1,  x_i*g_{j+1} = x_i (i>1, 1<=j<n),
    x_1*ginf = ginf*x_d,  x_{i+1}*ginf = x_i.
    """
    if d < 2 or n < 2:
        raise InvalidTable(f"need d >= 2 and n >= 2, got d={d}, n={n}")
    e = Word.identity(n)
    g = lambda k: Word.gen(k, n)  # noqa: E731
    rows = [[None] * (n + 1) for _ in range(d)]
    for i in range(1, d + 1):
        if i == 1:
            rows[0][0] = (g(n + 1) * g(n), 2)
        elif i < d:
            rows[i - 1][0] = (e, i + 1)
        # i == d handled below; when d == 2 row 2 is x_d
        for j in range(1, n):
            rows[i - 1][j] = (g(j), 1) if i == 1 else (e, i)
        rows[i - 1][n] = (g(n + 1), d) if i == 1 else (e, i - 1)
    rows[d - 1][0] = (~g(n + 1), 1)
    return _table(d, n, rows)


def _as_letters(w, n: int) -> Sequence[int]:
    if isinstance(w, Word):
        if w.rank != n:
            raise RankMismatch(f"word rank {w.rank} vs table rank {n}")
        return w.letters
    letters = list(w)
    for x in letters:
        if x == 0 or abs(x) > n + 1:
            raise ValueError(f"generator index {x} outside 1..{n + 1}")
    return letters


def _inverse_columns(t: BisetTable) -> list[list[Entry]]:
    # inv[j-1][k-1] = (c, m) with x_k * g_j^-1 = c * x_m
    inv = [[None] * t.d for _ in range(t.n + 1)]
    for m in range(1, t.d + 1):
        for j in range(1, t.n + 2):
            c, k = t.entry(m, j)
            inv[j - 1][k - 1] = (~c, m)
    return inv


def right_action(t: BisetTable, i: int, w) -> tuple[Word, int]:
    """Act on x_i by w (a Word or a raw sequence of signed indices, n+1 = ginf).

    Returns ``(c, k)`` with ``x_i * w = c * x_k``.
    """
    if not 1 <= i <= t.d:
        raise ValueError(f"sheet {i} outside 1..{t.d}")
    letters = _as_letters(w, t.n)
    inv = None
    coeff = Word.identity(t.n)
    sheet = i
    for x in letters:
        if x > 0:
            c, sheet = t.rows[sheet - 1][x - 1]
        else:
            if inv is None:
                inv = _inverse_columns(t)
            c, sheet = inv[-x - 1][sheet - 1]
        coeff = coeff * c
    return coeff, sheet


def precompose(t: BisetTable, psi: Automorphism) -> BisetTable:
    """Presentation of f o psi: every coefficient c becomes psi(c)."""
    if psi.rank != t.n:
        raise RankMismatch(f"automorphism rank {psi.rank} vs table rank {t.n}")
    return _table(t.d, t.n, ([(psi(c), k) for (c, k) in row] for row in t.rows))


def postcompose(t: BisetTable, phi: Automorphism) -> BisetTable:
    """Presentation of phi o f: entry (i, j) is x_i * phi(g_j) rewritten by t."""
    if phi.rank != t.n:
        raise RankMismatch(f"automorphism rank {phi.rank} vs table rank {t.n}")
    cols = [phi.image(j) for j in range(1, t.n + 2)]
    return _table(
        t.d, t.n, ([right_action(t, i, cols[j]) for j in range(t.n + 1)] for i in range(1, t.d + 1))
    )


def _check_permutation(sigma: Sequence[int], d: int):
    if sorted(sigma) != list(range(1, d + 1)):
        raise ValueError(f"{list(sigma)} is not a permutation of 1..{d}")


def change_basis(t: BisetTable, sigma: Sequence[int], g: Sequence[Word]) -> BisetTable:
    """Replace x_i by g_i*x_i, then relabel basis element i as sigma(i).

    sigma is given as the list (sigma(1), ..., sigma(d)).
    """
    sigma = list(sigma)
    _check_permutation(sigma, t.d)
    if len(g) != t.d:
        raise ValueError(f"need {t.d} conjugators, got {len(g)}")
    rows = [None] * t.d
    for i in range(1, t.d + 1):
        rows[sigma[i - 1] - 1] = [
            (g[i - 1] * c * ~g[k - 1], sigma[k - 1]) for (c, k) in t.rows[i - 1]
        ]
    return _table(t.d, t.n, rows)


@dataclass
class ConsistencyReport:
    bad_columns: list[int]
    relator_failures: list[tuple[int, Entry]]  # (sheet, result of the relator)

    @property
    def ok(self) -> bool:
        return not self.bad_columns and not self.relator_failures


def relator_letters(n: int) -> list[int]:
    """ginf * gn * ... * g1 as a raw sequence."""
    return [n + 1] + list(range(n, 0, -1))


def check_consistency(t: BisetTable) -> ConsistencyReport:
    bad = [
        j
        for j in range(1, t.n + 2)
        if sorted(t.column_permutation(j)) != list(range(1, t.d + 1))
    ]
    failures = []
    if not bad:
        rel = relator_letters(t.n)
        for i in range(1, t.d + 1):
            c, k = right_action(t, i, rel)
            if c or k != i:
                failures.append((i, (c, k)))
    return ConsistencyReport(bad, failures)


def require_consistent(t: BisetTable) -> BisetTable:
    report = check_consistency(t)
    if not report.ok:
        raise InvalidTable(
            f"inconsistent table: bad columns {report.bad_columns}, "
            f"relator fails on sheets {[i for i, _ in report.relator_failures]}"
        )
    return t


def monodromy_group_order(t: BisetTable) -> int:
    """Order of the permutation group generated by the column permutations."""
    gens = [tuple(k - 1 for k in t.column_permutation(j)) for j in range(1, t.n + 2)]
    identity = tuple(range(t.d))
    seen = {identity}
    frontier = [identity]
    while frontier:
        nxt = []
        for p in frontier:
            for s in gens:
                q = tuple(s[p[x]] for x in range(t.d))
                if q not in seen:
                    seen.add(q)
                    nxt.append(q)
        frontier = nxt
    return len(seen)


def is_transitive(t: BisetTable) -> bool:
    seen = {1}
    stack = [1]
    while stack:
        i = stack.pop()
        for (_, k) in t.rows[i - 1]:
            if k not in seen:
                seen.add(k)
                stack.append(k)
    return len(seen) == t.d


# ---------------------------------------------------------------- text formats


def to_dict(t: BisetTable) -> dict:
    return {
        "d": t.d,
        "n": t.n,
        "entries": [[format_word(c), k] for row in t.rows for (c, k) in row],
    }


def from_dict(data: dict) -> BisetTable:
    try:
        d, n, entries = int(data["d"]), int(data["n"]), data["entries"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidTable(f"biset document needs integer d, n and a list 'entries': {exc}")
    if len(entries) != d * (n + 1):
        raise InvalidTable(f"expected {d * (n + 1)} entries, got {len(entries)}")
    rows = []
    for i in range(d):
        row = []
        for j in range(n + 1):
            word, k = entries[i * (n + 1) + j]
            if not isinstance(k, int) or not 1 <= k <= d:
                raise InvalidTable(f"entry ({i + 1},{j + 1}): sheet {k!r} outside 1..{d}")
            row.append((parse_word(word, n), k))
        rows.append(row)
    return _table(d, n, rows)


def dumps(t: BisetTable) -> str:
    return json.dumps(to_dict(t), indent=1) + "\n"


def loads(text: str) -> BisetTable:
    return from_dict(json.loads(text))


def pretty(t: BisetTable, basis: str = "x") -> str:
    lines = []
    names = [f"g{j}" for j in range(1, t.n + 1)] + ["ginf"]
    for i in range(1, t.d + 1):
        for j in range(1, t.n + 2):
            c, k = t.entry(i, j)
            lhs = f"{basis}_{i} . {names[j - 1]}"
            rhs = f"{basis}_{k}" if not c else f"{format_word(c)} . {basis}_{k}"
            lines.append(f"{lhs} = {rhs}")
    return "\n".join(lines)


__all__ = [
    "BisetTable",
    "ConsistencyReport",
    "InvalidTable",
    "base_biset",
    "change_basis",
    "check_consistency",
    "dumps",
    "from_dict",
    "is_transitive",
    "loads",
    "monodromy_group_order",
    "postcompose",
    "precompose",
    "pretty",
    "relator_letters",
    "require_consistent",
    "right_action",
    "to_dict",
]
