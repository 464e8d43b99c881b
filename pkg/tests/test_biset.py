import json

import pytest

from bisetcalc.biset import (
    InvalidTable,
    base_biset,
    change_basis,
    check_consistency,
    dumps,
    from_dict,
    is_transitive,
    loads,
    monodromy_group_order,
    postcompose,
    precompose,
    pretty,
    require_consistent,
    right_action,
    to_dict,
)
from bisetcalc.freegroup import RankMismatch, Word, parse_word
from bisetcalc.mcg import Automorphism, twist
from lemma_data import expected_table, printed_post, printed_pre, sides


def w(text, n=3):
    return parse_word(text, n)


E3 = Word.identity(3)


def test_base_2_3_columns():
    t = base_biset(2, 3)
    assert [t.entry(i, 1) for i in (1, 2)] == [(w("ginf*g3"), 2), (w("ginf^-1"), 1)]
    assert [t.entry(i, 2) for i in (1, 2)] == [(w("g1"), 1), (E3, 2)]
    assert [t.entry(i, 3) for i in (1, 2)] == [(w("g2"), 1), (E3, 2)]
    assert [t.entry(i, 4) for i in (1, 2)] == [(w("ginf"), 2), (E3, 1)]


@pytest.mark.parametrize("d,n", [(2, 2), (3, 4), (5, 3), (6, 6)])
def test_base_shape(d, n):
    t = base_biset(d, n)
    assert t.column_permutation(1) == tuple(list(range(2, d + 1)) + [1])
    for i in range(2, d + 1):
        for j in range(2, n + 1):
            assert t.entry(i, j) == (Word.identity(n), i)
    assert check_consistency(t).ok


@pytest.mark.parametrize("d,n", [(1, 3), (2, 1), (0, 0)])
def test_base_bounds(d, n):
    with pytest.raises(InvalidTable):
        base_biset(d, n)


def test_right_action_relator_hand_fold():
    t = base_biset(2, 3)
    assert right_action(t, 2, [4, 3, 2, 1]) == (E3, 2)


def test_right_action_empty_and_single():
    t = base_biset(4, 5)
    for i in range(1, 5):
        assert right_action(t, i, []) == (Word.identity(5), i)
    assert right_action(t, 1, Word.gen(2, 5)) == (Word.gen(1, 5), 1)


def test_right_action_inverse_letter():
    t = base_biset(3, 3)
    for i in range(1, 4):
        for x in (1, 2, 3, 4):
            c, k = right_action(t, i, [x])
            c2, k2 = right_action(t, k, [-x])
            assert k2 == i and (c * c2).is_identity()


def test_right_action_rejects_bad_input():
    t = base_biset(2, 3)
    with pytest.raises(ValueError):
        right_action(t, 3, [])
    with pytest.raises(ValueError):
        right_action(t, 1, [5])
    with pytest.raises(RankMismatch):
        right_action(t, 1, Word.gen(1, 4))


def test_precompose_identity_and_rule():
    t = base_biset(3, 3)
    assert precompose(t, Automorphism.identity(3)) == t
    psi = twist(1, 2, 3)
    p = precompose(t, psi)
    for i in range(1, 4):
        for j in range(1, 5):
            c, k = t.entry(i, j)
            assert p.entry(i, j) == (psi(c), k)


def test_postcompose_identity():
    t = base_biset(3, 4)
    assert postcompose(t, Automorphism.identity(4)) == t


@pytest.mark.parametrize("d,n,i", [(3, 4, 2), (4, 5, 2), (3, 5, 3)])
def test_printed_tables(d, n, i):
    phi, psi = sides(n, i)
    base = base_biset(d, n)
    assert postcompose(base, phi) == expected_table(d, n, printed_post(d, n, i))
    assert precompose(base, psi) == expected_table(d, n, printed_pre(d, n, i))


def test_composition_actions():
    t = base_biset(2, 3)
    a, b = twist(1, 4, 3), twist(2, 3, 3)
    # post is a left action, pre a right action, and they commute
    assert postcompose(postcompose(t, a), b) == postcompose(t, b * a)
    assert precompose(precompose(t, a), b) == precompose(t, a * b)
    assert postcompose(precompose(t, a), b) == precompose(postcompose(t, b), a)


def test_rank_checks():
    t = base_biset(2, 3)
    with pytest.raises(RankMismatch):
        precompose(t, twist(1, 2, 4))
    with pytest.raises(RankMismatch):
        postcompose(t, twist(1, 2, 4))


def test_change_basis_examples():
    t = base_biset(2, 3)
    assert change_basis(t, [1, 2], [E3, E3]) == t
    u = change_basis(t, [1, 2], [w("g1"), E3])
    assert u.entry(1, 2) == (w("g1"), 1)
    assert u.entry(1, 1) == (w("g1") * w("ginf*g3"), 2)
    assert check_consistency(u).ok


def test_change_basis_composes():
    t = base_biset(3, 3)
    s1, g1 = [2, 3, 1], [w("g1"), w("g2^-1"), E3]
    s2, g2 = [3, 1, 2], [E3, w("g3 g1"), w("g2")]
    twice = change_basis(change_basis(t, s1, g1), s2, g2)
    # basis element i goes to s2(s1(i)); the second conjugator multiplies on the left
    s = [s2[s1[i] - 1] for i in range(3)]
    g = [g2[s1[i] - 1] * g1[i] for i in range(3)]
    assert twice == change_basis(t, s, g)


def test_change_basis_rejects_non_permutation():
    with pytest.raises(ValueError):
        change_basis(base_biset(2, 3), [1, 1], [E3, E3])
    with pytest.raises(ValueError):
        change_basis(base_biset(2, 3), [1, 2], [E3])


def test_consistency_failures():
    t = base_biset(2, 3)
    bad = t.with_entry(1, 2, (w("g1"), 2))
    assert check_consistency(bad).bad_columns == [2]
    perturbed = t.with_entry(1, 2, (w("g1") * w("g1"), 1))
    report = check_consistency(perturbed)
    assert not report.bad_columns and report.relator_failures
    with pytest.raises(InvalidTable):
        require_consistent(perturbed)


@pytest.mark.parametrize("d", [2, 3, 4, 5, 6])
@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_base_invariants_grid(d, n):
    t = base_biset(d, n)
    assert check_consistency(t).ok
    assert monodromy_group_order(t) == d
    assert is_transitive(t)


def test_monodromy_of_derived_tables():
    t = postcompose(base_biset(3, 3), twist(1, 2, 3) * twist(2, 4, 3) ** 2)
    assert check_consistency(t).ok and monodromy_group_order(t) == 3


def test_file_round_trip():
    t = postcompose(base_biset(3, 4), twist(2, 5, 4))
    text = dumps(t)
    assert loads(text) == t
    assert dumps(loads(text)) == text
    data = json.loads(text)
    assert data["d"] == 3 and data["n"] == 4 and len(data["entries"]) == 15
    assert from_dict(to_dict(t)) == t


@pytest.mark.parametrize(
    "doc",
    [
        {"d": 2, "n": 3},
        {"d": 2, "n": 3, "entries": [["1", 1]]},
        {"d": 2, "n": 2, "entries": [["1", 1], ["1", 2], ["1", 3], ["1", 1], ["1", 2], ["1", 1]]},
    ],
)
def test_from_dict_rejects(doc):
    with pytest.raises(InvalidTable):
        from_dict(doc)


def test_pretty_layout():
    lines = pretty(base_biset(2, 2)).splitlines()
    assert lines[0] == "x_1 . g1 = g1^-1 . x_2"
    assert "x_2 . ginf = x_1" in lines
    assert len(lines) == 6
