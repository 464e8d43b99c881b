"""Command line front end: ``bisetcalc <subcommand> ...``.

Exit codes: 0 success, 1 negative mathematical result such as a failed
isomorphism or lift, 2 usage or input error, 3 internal inconsistency.
The thread count for ``verify-lemma --all`` is read from ``BISETCALC_THREADS``.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import biset as B
from .biset import InvalidTable
from .dynamics import (
    IDENTITIES,
    ParameterError,
    corollary_closure,
    identity_instances,
    lift,
    orbit_explore,
    verify_identity,
)
from .freegroup import MalformedWord, RankMismatch, Word, format_word, parse_word
from .grammar import ParseError
from .iso import (
    DimensionMismatch,
    decide_iso,
    verify_iso,
    witness_from_dict,
    witness_text,
    witness_to_dict,
)
from .mcg import InvalidTwist, TwistIndex, format_mcg_word, is_peripheral_preserving, parse_mcg_word, twist

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3

GRID_D = (2, 3, 4, 5)
GRID_N = (3, 4, 5, 6)

WORD_GRAMMAR = "words: g1..gN, ginf, '*' or juxtaposition, '^k', '^-1', '^(w)', parentheses"
MCG_GRAMMAR = "mapping classes: t(i,j) with j an integer or inf, '*', '^k', '^-1', '^(m)'"


class UsageError(Exception):
    pass


class Outcome:
    def __init__(self, code: int, data: dict, text: str):
        self.code, self.data, self.text = code, data, text


# ---------------------------------------------------------------- helpers


def _infer_rank(text: str) -> int:
    idx = [int(k) for k in re.findall(r"g(\d+)", text)]
    if "ginf" in text and not idx:
        raise UsageError("cannot infer the rank from ginf alone; pass --n")
    return max([2] + idx)


def _word(text: str, n: int) -> Word:
    return parse_word(text, n)


def _read_table(path: str) -> B.BisetTable:
    p = Path(path)
    try:
        raw = p.read_text()
    except OSError as exc:
        raise UsageError(f"{path}: {exc.strerror}")
    try:
        t = B.loads(raw)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}")
    except (InvalidTable, ParseError, MalformedWord, ValueError) as exc:
        raise UsageError(f"{path}: {exc}")
    report = B.check_consistency(t)
    if not report.ok:
        raise UsageError(
            f"{path}: inconsistent table (bad columns {report.bad_columns}, "
            f"relator fails on sheets {[i for i, _ in report.relator_failures]})"
        )
    return t


def _table_outcome(t: B.BisetTable) -> Outcome:
    return Outcome(EXIT_OK, B.to_dict(t), B.pretty(t))


def _twist_index(text: str, n: int) -> int:
    if text == "inf":
        return n + 1
    try:
        return int(text)
    except ValueError:
        raise UsageError(f"twist index must be an integer or 'inf', got {text!r}")


# ---------------------------------------------------------------- commands


def cmd_reduce(a) -> Outcome:
    n = a.n if a.n is not None else _infer_rank(a.word)
    w = _word(a.word, n)
    return Outcome(EXIT_OK, {"n": n, "word": format_word(w), "length": len(w)}, format_word(w))


def cmd_twist(a) -> Outcome:
    i, j = _twist_index(a.i, a.n), _twist_index(a.j, a.n)
    TwistIndex(i, j).validate(a.n)
    t = twist(i, j, a.n)
    names = [f"g{k}" for k in range(1, a.n + 1)] + ["ginf"]
    images = {name: format_word(t.image(k)) for k, name in enumerate(names, 1)}
    text = "\n".join(f"{name} -> {w}" for name, w in images.items())
    return Outcome(EXIT_OK, {"twist": TwistIndex(i, j).label(a.n), "images": images}, text)


def cmd_apply(a) -> Outcome:
    phi = parse_mcg_word(a.mcgword, a.n)
    w = phi(_word(a.word, a.n))
    return Outcome(EXIT_OK, {"n": a.n, "word": format_word(w)}, format_word(w))


def cmd_base(a) -> Outcome:
    return _table_outcome(B.base_biset(a.d, a.n))


def cmd_act(a) -> Outcome:
    t = _read_table(a.file)
    if not 1 <= a.sheet <= t.d:
        raise UsageError(f"sheet {a.sheet} outside 1..{t.d}")
    c, k = B.right_action(t, a.sheet, _word(a.word, t.n))
    text = f"x_{k}" if not c else f"{format_word(c)} . x_{k}"
    return Outcome(EXIT_OK, {"coeff": format_word(c), "sheet": k}, text)


def cmd_pre(a) -> Outcome:
    t = _read_table(a.file)
    return _table_outcome(B.require_consistent(B.precompose(t, parse_mcg_word(a.mcgword, t.n))))


def cmd_post(a) -> Outcome:
    t = _read_table(a.file)
    return _table_outcome(B.require_consistent(B.postcompose(t, parse_mcg_word(a.mcgword, t.n))))


def cmd_iso(a) -> Outcome:
    ta, tb = _read_table(a.file_a), _read_table(a.file_b)
    if a.witness:
        try:
            w = witness_from_dict(json.loads(Path(a.witness).read_text()), ta.n)
        except OSError as exc:
            raise UsageError(f"{a.witness}: {exc.strerror}")
        except json.JSONDecodeError as exc:
            raise UsageError(f"{a.witness}: line {exc.lineno} column {exc.colno}: {exc.msg}")
        except ValueError as exc:
            raise UsageError(f"{a.witness}: {exc}")
        ok = verify_iso(ta, tb, w)
        data = {"verified": ok, "witness": witness_to_dict(w)}
        return Outcome(EXIT_OK if ok else EXIT_NEGATIVE, data, "witness verified" if ok else "witness rejected")
    w = decide_iso(ta, tb)
    if w is None:
        return Outcome(EXIT_NEGATIVE, {"isomorphic": False}, "not isomorphic")
    return Outcome(EXIT_OK, {"isomorphic": True, "witness": witness_to_dict(w)}, witness_text(w))


def _instance_label(which, d, n, i, j) -> str:
    parts = [f"identity {which}", f"d={d}", f"n={n}"]
    if i is not None:
        parts.append(f"i={i}")
    if j is not None:
        parts.append(f"j={j}")
    return " ".join(parts)


def _run_instance(key):
    which, d, n, i, j = key
    r = verify_identity(which, d, n, i, j)
    return key, r.holds, None if r.witness is None else witness_to_dict(r.witness)


def _threads() -> int:
    raw = os.environ.get("BISETCALC_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise UsageError(f"BISETCALC_THREADS must be an integer, got {raw!r}")


def cmd_verify_lemma(a) -> Outcome:
    if a.all:
        ds = [a.d] if a.d is not None else list(GRID_D)
        ns = [a.n] if a.n is not None else list(GRID_N)
        keys = [
            (which, d, n, i, j)
            for d in ds
            for n in ns
            for (which, i, j) in identity_instances(n)
            if a.which is None or which == a.which
        ]
        threads = _threads()
        if threads > 1:
            with ProcessPoolExecutor(threads) as pool:
                results = list(pool.map(_run_instance, keys, chunksize=8))
        else:
            results = [_run_instance(k) for k in keys]
        summary: dict[tuple, list[int]] = {}
        failures = []
        for (which, d, n, i, j), holds, _ in results:
            cell = summary.setdefault((which, d, n), [0, 0])
            cell[1] += 1
            if holds:
                cell[0] += 1
            else:
                failures.append((d, n, which, i or 0, j or 0, (which, d, n, i, j)))
        rows = [
            {"identity": w, "d": d, "n": n, "verified": ok, "instances": tot}
            for (w, d, n), (ok, tot) in sorted(summary.items(), key=lambda kv: (kv[0][1], kv[0][2], kv[0][0]))
        ]
        lines = [f"{'id':>2} {'d':>2} {'n':>2} {'verified':>9}"]
        lines += [f"{r['identity']:>2} {r['d']:>2} {r['n']:>2} {r['verified']:>4}/{r['instances']:<4}" for r in rows]
        total = len(results)
        data = {"instances": total, "failures": len(failures), "table": rows}
        if failures:
            minimal = min(failures)[-1]
            data["minimal_failure"] = _instance_label(*minimal)
            lines.append(f"FAILED {len(failures)}/{total}; minimal failing instance: {_instance_label(*minimal)}")
            return Outcome(EXIT_NEGATIVE, data, "\n".join(lines))
        lines.append(f"all {total} instances verified")
        return Outcome(EXIT_OK, data, "\n".join(lines))

    if a.which is None or a.d is None or a.n is None:
        raise UsageError("verify-lemma needs --which, --d and --n (or --all)")
    r = verify_identity(a.which, a.d, a.n, a.i, a.j)
    label = _instance_label(a.which, a.d, a.n, a.i, a.j)
    data = {"instance": label, "identity": IDENTITIES[a.which], "holds": r.holds}
    if r.holds:
        data["witness"] = witness_to_dict(r.witness)
        return Outcome(EXIT_OK, data, f"{label}: holds\n{witness_text(r.witness)}")
    return Outcome(EXIT_NEGATIVE, data, f"{label}: no isomorphism exists")


def cmd_lift(a) -> Outcome:
    h = parse_mcg_word(a.mcgword, a.n)
    r = lift(h, a.d, a.n)
    data = {"liftable": r.liftable, "certificate": r.certificate}
    if not r.liftable:
        text = "not liftable; every start sheet fails:\n" + "\n".join(r.certificate)
        return Outcome(EXIT_NEGATIVE, data, text)
    if not is_peripheral_preserving(r.psi).ok:
        raise AssertionError("lifted class is not pure")
    images = [format_word(r.psi.image(k)) for k in range(1, a.n + 2)]
    data.update({"psi_images": images, "witness": witness_to_dict(r.witness)})
    names = [f"g{k}" for k in range(1, a.n + 1)] + ["ginf"]
    text = "liftable; psi:\n" + "\n".join(f"{x} -> {w}" for x, w in zip(names, images))
    return Outcome(EXIT_OK, data, text + "\nwitness:\n" + witness_text(r.witness, "y", "z"))


def cmd_closure(a) -> Outcome:
    cert = corollary_closure(a.n)
    label = lambda t: t.label(a.n)  # noqa: E731
    steps = [
        {
            "added": label(s.added),
            "rule": s.rule,
            "identity": _instance_label(s.identity[0], a.replay_d or "d", a.n, s.identity[1], s.identity[2]),
            "premises": [label(p) for p in s.premises],
            "note": s.note,
        }
        for s in cert.steps
    ]
    data = {
        "n": a.n,
        "complete": cert.complete,
        "members": [label(t) for t in sorted(cert.members)],
        "steps": steps,
        "missing": [label(t) for t in cert.missing],
    }
    lines = [f"start: {', '.join(TwistIndex(i, a.n + 1).label(a.n) for i in range(1, a.n + 1))}"]
    lines += [f"{s['added']} by {s['rule']} ({s['note']})" for s in steps]
    replay_ok = True
    if a.replay_d:
        replay = cert.replay(a.replay_d)
        replay_ok = all(ok for _, ok in replay)
        data["replay"] = {"d": a.replay_d, "ok": replay_ok}
        lines.append(f"replay at d={a.replay_d}: {'ok' if replay_ok else 'FAILED'}")
    lines.append(f"members ({len(cert.members)}): {', '.join(data['members'])}")
    if not cert.complete:
        lines.append(f"missing: {', '.join(data['missing'])}")
    if not replay_ok:
        return Outcome(EXIT_INTERNAL, data, "\n".join(lines))
    return Outcome(EXIT_OK if cert.complete else EXIT_NEGATIVE, data, "\n".join(lines))


def cmd_orbit(a) -> Outcome:
    rep = orbit_explore(a.d, a.n, a.depth, a.bound, method=a.method, max_classes=a.max_classes)
    expected = a.d ** (a.n - 2)
    classes = [
        {"index": k, "depth": c.depth, "h": format_mcg_word(c.h), "table": B.to_dict(c.table)}
        for k, c in enumerate(rep.classes)
    ]
    merges = [
        {"from": m.cls, "by": m.generator, "into": m.into, "psi": format_mcg_word(m.psi), "witness": witness_to_dict(m.witness)}
        for m in rep.merges
    ]
    data = {
        "d": a.d,
        "n": a.n,
        "count": rep.count,
        "expected": expected,
        "closed": rep.closed,
        "partial": rep.partial,
        "classes": classes,
        "merges": merges,
        "unmerged": [list(u) for u in rep.unmerged],
    }
    lines = [f"{rep.count} classes (expected {expected}); frontier {'closed' if rep.closed else 'open'}"]
    lines += [f"class {c['index']}: h = {c['h']} (depth {c['depth']})" for c in classes]
    lines.append(f"{len(merges)} merges, {len(rep.unmerged)} unmerged pairs with equal invariant")
    lines += [f"unmerged: class {c} by {g} vs class {k}" for c, g, k in rep.unmerged]
    if rep.partial:
        lines.append("class budget exceeded; count is an upper bound for the explored part")
    return Outcome(EXIT_OK, data, "\n".join(lines))


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentParser(add_help=False)
    fmt.add_argument("--format", choices=("json", "text"), default="text")
    p = argparse.ArgumentParser(
        prog="bisetcalc",
        description="Biset presentations of bicritical branched coverings.",
        epilog=f"{WORD_GRAMMAR}; {MCG_GRAMMAR}",
    )
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("reduce", parents=[fmt], help="normal form of a word")
    s.add_argument("word")
    s.add_argument("--n", type=int, help="rank (inferred from the generators if omitted)")
    s.set_defaults(func=cmd_reduce)

    s = sub.add_parser("twist", parents=[fmt], help="generator images of a twist")
    s.add_argument("i")
    s.add_argument("j")
    s.add_argument("--n", type=int, required=True)
    s.set_defaults(func=cmd_twist)

    s = sub.add_parser("apply", parents=[fmt], help="apply a mapping class to a word")
    s.add_argument("mcgword")
    s.add_argument("word")
    s.add_argument("--n", type=int, required=True)
    s.set_defaults(func=cmd_apply)

    s = sub.add_parser("base", parents=[fmt], help="presentation of z^d + c")
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--n", type=int, required=True)
    s.set_defaults(func=cmd_base)

    s = sub.add_parser("act", parents=[fmt], help="right action of a word on a basis element")
    s.add_argument("file")
    s.add_argument("sheet", type=int)
    s.add_argument("word")
    s.set_defaults(func=cmd_act)

    for name, func, what in (("pre", cmd_pre, "pre-compose"), ("post", cmd_post, "post-compose")):
        s = sub.add_parser(name, parents=[fmt], help=f"{what} a table with a mapping class")
        s.add_argument("file")
        s.add_argument("mcgword")
        s.set_defaults(func=func)

    s = sub.add_parser("iso", parents=[fmt], help="decide isomorphism or check a witness")
    s.add_argument("file_a")
    s.add_argument("file_b")
    s.add_argument("--witness", help="witness file to verify instead of searching")
    s.set_defaults(func=cmd_iso)

    s = sub.add_parser("verify-lemma", parents=[fmt], help="check the twist identities")
    s.add_argument("--which", type=int, choices=(1, 2, 3, 4))
    s.add_argument("--d", type=int)
    s.add_argument("--n", type=int)
    s.add_argument("--i", type=int)
    s.add_argument("--j", type=int)
    s.add_argument("--all", action="store_true", help="run the full grid (d 2..5, n 3..6 unless given)")
    s.set_defaults(func=cmd_verify_lemma)

    s = sub.add_parser("lift", parents=[fmt], help="lift a mapping class through the base map")
    s.add_argument("mcgword")
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--n", type=int, required=True)
    s.set_defaults(func=cmd_lift)

    s = sub.add_parser("closure", parents=[fmt], help="generation closure certificate")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--d", dest="replay_d", type=int, help="replay every cited identity at this degree")
    s.set_defaults(func=cmd_closure)

    s = sub.add_parser("orbit", parents=[fmt], help="explore classes modulo pre-composition")
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--depth", type=int, required=True)
    s.add_argument("--bound", type=int, required=True)
    s.add_argument("--method", choices=("search", "lift"), default="search")
    s.add_argument("--max-classes", type=int, default=10_000)
    s.set_defaults(func=cmd_orbit)
    return p


def run(argv: list[str] | None = None) -> tuple[int, str]:
    """Run a command and return ``(exit code, stdout payload)``; errors go to stderr."""
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        out = args.func(args)
    except (UsageError, ParseError, MalformedWord, RankMismatch, InvalidTwist, ParameterError,
            InvalidTable, DimensionMismatch) as exc:
        hint = ""
        if isinstance(exc, ParseError):
            hint = f"\n{WORD_GRAMMAR}\n{MCG_GRAMMAR}"
        print(f"bisetcalc {args.command}: {exc}{hint}", file=sys.stderr)
        return EXIT_USAGE, ""
    except AssertionError as exc:
        print(f"bisetcalc {args.command}: internal inconsistency: {exc}", file=sys.stderr)
        return EXIT_INTERNAL, ""
    payload = json.dumps(out.data, indent=1) if args.format == "json" else out.text
    return out.code, payload + "\n"


def main(argv: list[str] | None = None) -> int:
    code, payload = run(argv)
    sys.stdout.write(payload)
    return code


if __name__ == "__main__":
    sys.exit(main())
