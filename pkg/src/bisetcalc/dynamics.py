"""Dynamical checks built on presentation tables: lifting, twist identities, closure, orbits.

Notation: for a mapping class h and the base map f, ``h.f`` is the table
``postcompose(base, h)`` and ``f.psi`` is ``precompose(base, psi)``.  With the
product of :mod:`bisetcalc.mcg` (left factor acts first on words) these are a
left and a right action: ``(a*b).f = a.(b.f)`` and ``f.(a*b) = (f.a).b``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .biset import BisetTable, base_biset, postcompose, precompose
from .canonical import pretwist_invariant
from .freegroup import Word, product
from .iso import IsoWitness, decide_iso, decide_iso_up_to_pretwist, verify_iso
from .mcg import (
    Automorphism,
    TwistIndex,
    all_twist_indices,
    compose,
    conjugate_automorphism,
    invert,
    is_peripheral_preserving,
    twist,
)

log = logging.getLogger(__name__)

IDENTITIES = {
    1: "t(1,inf) . f = f . t(n,inf)",
    2: "t(1,inf)^t(i+1,inf) . f = f . t(i,inf)*t(i,n)*t(n,inf)",
    3: "t(i+1,inf)^d . f = f . t(i,inf)^t(i,n)",
    4: "t(i+1,j+1) . f = f . t(i,j)",
}


class ParameterError(ValueError):
    pass


def identity_sides(which: int, d: int, n: int, i: int | None = None, j: int | None = None):
    """The two mapping classes ``(h, psi)`` of the identity ``h.f = f.psi``."""
    if d < 2 or n < 3:
        raise ParameterError(f"need d >= 2 and n >= 3, got d={d}, n={n}")
    inf = n + 1
    if which == 1:
        return twist(1, inf, n), twist(n, inf, n)
    if which in (2, 3, 4):
        if i is None or not 1 <= i <= n - 1:
            raise ParameterError(f"identity {which} needs 1 <= i <= {n - 1}, got i={i}")
    if which == 2:
        return (
            conjugate_automorphism(twist(1, inf, n), twist(i + 1, inf, n)),
            twist(i, inf, n) * twist(i, n, n) * twist(n, inf, n),
        )
    if which == 3:
        return twist(i + 1, inf, n) ** d, conjugate_automorphism(twist(i, inf, n), twist(i, n, n))
    if which == 4:
        if j is None or not i < j <= n - 1:
            raise ParameterError(f"identity 4 needs {i} < j <= {n - 1}, got j={j}")
        return twist(i + 1, j + 1, n), twist(i, j, n)
    raise ParameterError(f"identity number must be 1..4, got {which}")


def identity_instances(n: int):
    """All valid (which, i, j) for rank n."""
    yield (1, None, None)
    for i in range(1, n):
        yield (2, i, None)
        yield (3, i, None)
    for i in range(1, n):
        for j in range(i + 1, n):
            yield (4, i, j)


@dataclass
class IdentityResult:
    which: int
    d: int
    n: int
    i: int | None
    j: int | None
    holds: bool
    witness: IsoWitness | None
    lhs: BisetTable
    rhs: BisetTable


def verify_identity(
    which: int,
    d: int,
    n: int,
    i: int | None = None,
    j: int | None = None,
    rhs: Automorphism | None = None,
) -> IdentityResult:
    """Decide ``h.f ~ f.psi`` for one instance; ``rhs`` overrides psi (negative controls)."""
    h, psi = identity_sides(which, d, n, i, j)
    if rhs is not None:
        psi = rhs
    base = base_biset(d, n)
    lhs_table = postcompose(base, h)
    rhs_table = precompose(base, psi)
    w = decide_iso(lhs_table, rhs_table)
    if w is not None:
        assert verify_iso(lhs_table, rhs_table, w)
    return IdentityResult(which, d, n, i, j, w is not None, w, lhs_table, rhs_table)


# ---------------------------------------------------------------- lifting


@dataclass
class LiftResult:
    liftable: bool
    psi: Automorphism | None = None
    witness: IsoWitness | None = None
    # one line per start sheet tried; a negative verdict lists all d of them
    certificate: list[str] = field(default_factory=list)


def _read_off(T: BisetTable, start: int):
    """Candidate (psi, witness T -> f.psi) aligning sheet ``start`` with x_1, or a reason string."""
    d, n = T.d, T.n
    e = Word.identity(n)
    order = [start]
    for _ in range(d - 1):
        order.append(T.entry(order[-1], 1)[1])
    if sorted(order) != list(range(1, d + 1)) or T.entry(order[-1], 1)[1] != start:
        return "g1 does not act as a d-cycle"
    for r, s in enumerate(order):
        for j in range(2, n + 1):
            if T.entry(s, j)[1] != s:
                return f"g{j} moves sheet {s}"
        if T.entry(s, n + 1)[1] != order[r - 1]:
            return f"ginf does not invert g1 at sheet {s}"
    images = [T.entry(start, j + 1)[0] for j in range(1, n)]
    p = product(reversed(images), n)  # psi(g_{n-1}) ... psi(g_1)
    g = [e] * d
    if d >= 2:
        g[1] = p * T.entry(start, 1)[0]
    for r in range(1, d - 1):
        g[r + 1] = g[r] * T.entry(order[r], 1)[0]
    inf_image = T.entry(start, n + 1)[0] * ~g[d - 1]
    images.append(~inf_image * ~p)
    psi = Automorphism.from_images(images)
    report = is_peripheral_preserving(psi)
    if not report.ok:
        return f"read-off map is not pure (punctures {report.failures()})"
    sigma = [0] * d
    gs = [e] * d
    for r, s in enumerate(order):
        sigma[s - 1] = r + 1
        gs[s - 1] = ~g[r]
    w = IsoWitness(tuple(sigma), tuple(gs))
    target = precompose(base_biset(d, n), psi)
    if not verify_iso(T, target, w):
        return "read-off witness does not intertwine"
    return psi, w


def lift(h: Automorphism, d: int, n: int) -> LiftResult:
    """Find psi with ``h.f ~ f.psi``.

    For each choice of the sheet playing the role of x_1, the presentation is
    normalized to the shape of the base table and psi is read off from the
    row of x_1.  The read-off is forced up to an inner automorphism, so
    failure on all d sheets proves h is not liftable.
    """
    if h.rank != n:
        raise ParameterError(f"automorphism rank {h.rank} vs n={n}")
    T = postcompose(base_biset(d, n), h)
    cert = []
    for start in range(1, d + 1):
        out = _read_off(T, start)
        if isinstance(out, str):
            cert.append(f"sheet {start}: {out}")
            continue
        psi, w = out
        cert.append(f"sheet {start}: lifts")
        return LiftResult(True, psi, w, cert)
    return LiftResult(False, None, None, cert)


def same_up_to_inner(a: Automorphism, b: Automorphism) -> bool:
    """Whether a and b differ by an inner automorphism."""
    from .freegroup import solve_conjugacy_system

    return solve_conjugacy_system(list(zip(a.images, b.images))).kind != "empty"


# ---------------------------------------------------------------- closure


@dataclass
class ClosureStep:
    added: TwistIndex
    rule: str
    identity: tuple  # (which, i, j) of the cited identity
    premises: tuple[TwistIndex, ...]
    note: str


@dataclass
class ClosureCertificate:
    n: int
    members: set
    steps: list[ClosureStep]
    complete: bool
    missing: list

    def replay(self, d: int = 2) -> list[tuple[ClosureStep, bool]]:
        """Re-verify every cited identity at degree d and check premises were members in time."""
        have = {TwistIndex(i, self.n + 1) for i in range(1, self.n + 1)}
        out = []
        for step in self.steps:
            which, i, j = step.identity
            ok = all(p in have for p in step.premises)
            ok = ok and verify_identity(which, d, self.n, i, j).holds
            out.append((step, ok))
            have.add(step.added)
        return out


def corollary_closure(n: int, rules: tuple[str, ...] = ("R2", "R3")) -> ClosureCertificate:
    """Close the point pushes t(i,inf) under the deductions given by identities 2 and 4.

    R2: t(1,inf)^t(i+1,inf) is a member, so identity 2 makes
        t(i,inf)*t(i,n)*t(n,inf) one; two of its factors are members, hence t(i,n).
    R3: identity 4 turns a member t(i+1,j+1) into the member t(i,j).
    """
    if n < 3:
        raise ParameterError(f"closure needs n >= 3, got {n}")
    inf = n + 1
    members = {TwistIndex(i, inf) for i in range(1, n + 1)}
    steps: list[ClosureStep] = []
    if "R2" in rules:
        for i in range(1, n):
            t = TwistIndex(i, n)
            if t not in members:
                premises = (TwistIndex(1, inf), TwistIndex(i + 1, inf), TwistIndex(i, inf), TwistIndex(n, inf))
                members.add(t)
                steps.append(
                    ClosureStep(
                        t,
                        "R2",
                        (2, i, None),
                        premises,
                        f"t(1,inf)^t({i + 1},inf) in M, so t({i},inf)*t({i},{n})*t({n},inf) in M",
                    )
                )
    if "R3" in rules:
        changed = True
        while changed:
            changed = False
            for i in range(1, n):
                for j in range(i + 1, n):
                    t = TwistIndex(i, j)
                    src = TwistIndex(i + 1, j + 1)
                    if t not in members and src in members:
                        members.add(t)
                        steps.append(
                            ClosureStep(t, "R3", (4, i, j), (src,), f"t({i + 1},{j + 1}) in M")
                        )
                        changed = True
    full = set(all_twist_indices(n))
    missing = sorted(full - members)
    return ClosureCertificate(n, members, steps, not missing, missing)


# ---------------------------------------------------------------- orbits


@dataclass
class OrbitClass:
    table: BisetTable
    h: Automorphism  # representative is h.f
    invariant: tuple
    depth: int


@dataclass
class Merge:
    cls: int
    generator: str
    into: int
    psi: Automorphism
    witness: IsoWitness


@dataclass
class OrbitReport:
    d: int
    n: int
    classes: list[OrbitClass]
    merges: list[Merge]
    unmerged: list[tuple]  # (class, generator, candidate class) same invariant, no psi found
    closed: bool  # frontier exhausted before the depth limit
    partial: bool  # budget exceeded

    @property
    def count(self) -> int:
        return len(self.classes)


def _merge_by_lift(node_h: Automorphism, node: BisetTable, rep: OrbitClass, d: int, n: int):
    # node = h'.f and rep = h_k.f share a class iff h_k^-1 * h' lifts
    res = lift(compose(invert(rep.h), node_h), d, n)
    if not res.liftable:
        return None
    target = precompose(rep.table, res.psi)
    w = decide_iso(node, target)
    assert w is not None, "lift succeeded but the merge did not verify"
    return w, res.psi


def orbit_explore(
    d: int,
    n: int,
    depth: int,
    pretwist_bound: int,
    method: str = "search",
    max_classes: int = 10_000,
) -> OrbitReport:
    """Explore classes of h.f modulo pre-composition, by breadth first search.

    The post-composition action of the twist generators commutes with
    pre-composition, so only class representatives are expanded.  Merges
    are attempted only between tables with equal pretwist invariant, with
    ``decide_iso_up_to_pretwist`` (method "search") or with the exact
    lifting test (method "lift").
    """
    if d < 2 or n < 3:
        raise ParameterError(f"need d >= 2 and n >= 3, got d={d}, n={n}")
    if method not in ("search", "lift"):
        raise ParameterError(f"unknown method {method!r}")
    base = base_biset(d, n)
    ident = Automorphism.identity(n)
    classes = [OrbitClass(base, ident, pretwist_invariant(base), 0)]
    merges: list[Merge] = []
    unmerged: list[tuple] = []
    letters = [(t.i, t.j, e) for t in all_twist_indices(n) for e in (1, -1)]
    frontier = [0]
    level = 0
    partial = False
    while frontier and level < depth and not partial:
        level += 1
        nxt = []
        for ci in frontier:
            rep = classes[ci]
            for letter in letters:
                x = Automorphism.from_word([letter], n)
                node = postcompose(rep.table, x)
                node_h = compose(x, rep.h)
                inv = pretwist_invariant(node)
                label = format_letter(letter, n)
                merged = False
                failed = []
                for k, other in enumerate(classes):
                    if other.invariant != inv:
                        continue
                    if method == "lift":
                        found = _merge_by_lift(node_h, node, other, d, n)
                    else:
                        found = decide_iso_up_to_pretwist(node, other.table, pretwist_bound)
                    if found is not None:
                        w, psi = found
                        merges.append(Merge(ci, label, k, psi, w))
                        merged = True
                        break
                    failed.append((ci, label, k))
                if merged:
                    continue
                unmerged.extend(failed)
                if len(classes) >= max_classes:
                    partial = True
                    break
                classes.append(OrbitClass(node, node_h, inv, level))
                nxt.append(len(classes) - 1)
                log.info("class %d from class %d by %s", len(classes) - 1, ci, label)
            if partial:
                break
        frontier = nxt
    return OrbitReport(d, n, classes, merges, unmerged, not frontier, partial)


def format_letter(letter, n: int) -> str:
    i, j, e = letter
    name = TwistIndex(i, j).label(n)
    return name if e == 1 else f"{name}^-1"


__all__ = [
    "ClosureCertificate",
    "ClosureStep",
    "IDENTITIES",
    "IdentityResult",
    "LiftResult",
    "OrbitReport",
    "ParameterError",
    "corollary_closure",
    "identity_instances",
    "identity_sides",
    "lift",
    "orbit_explore",
    "same_up_to_inner",
    "verify_identity",
]
