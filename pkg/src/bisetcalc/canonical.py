"""Cheap invariants of biset tables, used to bucket tables before expensive checks.

``pretwist_invariant`` keeps the column permutations and, for every cycle of
every column, whether the coefficient accumulated around the cycle is
trivial.  Both survive basis changes (cycle coefficients get conjugated) and
pre-composition (psi(c) is trivial iff c is), so tables with different
invariants are never isomorphic, even up to pre-composition.
"""

from __future__ import annotations

import hashlib

from .biset import BisetTable, right_action
from .freegroup import Word, cyclic_reduce


def _cycles(perm: tuple[int, ...]) -> list[list[int]]:
    seen = set()
    out = []
    for s in range(1, len(perm) + 1):
        if s in seen:
            continue
        cyc = []
        x = s
        while x not in seen:
            seen.add(x)
            cyc.append(x)
            x = perm[x - 1]
        out.append(cyc)
    return out


def marked_sheets(t: BisetTable) -> list[list[tuple[tuple[int, ...], bool]]]:
    """Per column, the cycles with a flag telling whether their coefficient is nontrivial."""
    out = []
    for j in range(1, t.n + 2):
        col = []
        for cyc in _cycles(t.column_permutation(j)):
            c, _ = right_action(t, cyc[0], [j] * len(cyc))
            col.append((tuple(cyc), bool(c)))
        out.append(col)
    return out


def _relabel_from(t: BisetTable, start: int) -> dict[int, int]:
    label = {start: 1}
    order = [start]
    for s in order:
        for j in range(1, t.n + 2):
            k = t.entry(s, j)[1]
            if k not in label:
                label[k] = len(label) + 1
                order.append(k)
    for s in range(1, t.d + 1):
        if s not in label:
            label[s] = len(label) + 1
    return label


def pretwist_invariant(t: BisetTable) -> tuple:
    """Canonical form of the marked permutation data under sheet relabeling."""
    marks = marked_sheets(t)
    nontrivial = {(j, s) for j, col in enumerate(marks, 1) for cyc, flag in col if flag for s in cyc}
    best = None
    for start in range(1, t.d + 1):
        label = _relabel_from(t, start)
        inv = {v: k for k, v in label.items()}
        form = tuple(
            tuple((label[t.entry(inv[x], j)[1]], (j, inv[x]) in nontrivial) for x in range(1, t.d + 1))
            for j in range(1, t.n + 2)
        )
        if best is None or form < best:
            best = form
    return (t.d, t.n, best)


def cyclic_class(w: Word) -> tuple[int, ...]:
    """Canonical representative of the conjugacy class of w (least rotation of its core)."""
    core, _ = cyclic_reduce(w)
    x = core.letters
    if not x:
        return ()
    return min(x[r:] + x[:r] for r in range(len(x)))


def cycle_coefficients(t: BisetTable) -> list[list[tuple[int, Word]]]:
    """Per column, (cycle length, coefficient accumulated around the cycle)."""
    out = []
    for j in range(1, t.n + 2):
        col = []
        for cyc in _cycles(t.column_permutation(j)):
            c, _ = right_action(t, cyc[0], [j] * len(cyc))
            col.append((len(cyc), c))
        out.append(col)
    return out


def conjugacy_signature(t: BisetTable, psi=None) -> tuple:
    """Isomorphism invariant: per column, the sorted conjugacy classes of cycle coefficients.

    With ``psi`` given, the signature of ``precompose(t, psi)`` is returned
    without building that table.
    """
    sig = []
    for col in cycle_coefficients(t):
        sig.append(tuple(sorted((L, cyclic_class(c if psi is None else psi(c))) for L, c in col)))
    return tuple(sig)


def sheet_loops(t: BisetTable) -> list[list[Word]]:
    """Per sheet, the coefficients of the columns fixing that sheet."""
    return [
        [t.entry(s, j)[0] for j in range(1, t.n + 2) if t.entry(s, j)[1] == s]
        for s in range(1, t.d + 1)
    ]


def loop_signature(loops: list[list[Word]], psi=None) -> tuple:
    """Isomorphism invariant from loops sharing a sheet.

    Loops at one sheet are conjugated together by a basis change, so the
    conjugacy class of each pairwise product is invariant.  ``loops`` comes
    from :func:`sheet_loops`; ``psi`` maps every loop first, which yields the
    signature of the pre-composed table.
    """
    per_sheet = []
    for ws in loops:
        if psi is not None:
            ws = [psi(w) for w in ws]
        per_sheet.append(
            tuple(cyclic_class(ws[p] * ws[q]) for p in range(len(ws)) for q in range(p + 1, len(ws)))
        )
    return tuple(sorted(per_sheet))


def invariant_digest(t: BisetTable) -> str:
    return hashlib.sha256(repr(pretwist_invariant(t)).encode()).hexdigest()[:16]


__all__ = [
    "conjugacy_signature",
    "cycle_coefficients",
    "cyclic_class",
    "loop_signature",
    "sheet_loops",
    "invariant_digest",
    "marked_sheets",
    "pretwist_invariant",
]
