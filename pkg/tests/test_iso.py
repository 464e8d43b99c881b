import pytest

from bisetcalc.biset import InvalidTable, base_biset, change_basis, postcompose, precompose
from bisetcalc.freegroup import Word, parse_word
from bisetcalc.iso import (
    DimensionMismatch,
    IsoWitness,
    decide_iso,
    decide_iso_up_to_pretwist,
    pretwist_candidates,
    verify_iso,
    witness_dumps,
    witness_loads,
    witness_text,
)
from bisetcalc.mcg import Automorphism, acts_equal, twist
from lemma_data import printed_witness, sides
from test_freegroup import all_words


def lemma_pair(d, n, i):
    phi, psi = sides(n, i)
    base = base_biset(d, n)
    return postcompose(base, phi), precompose(base, psi)


def test_identity_witness():
    t = base_biset(3, 4)
    assert verify_iso(t, t, IsoWitness.identity(3, 4))


@pytest.mark.parametrize("d,n,i", [(3, 4, 2), (4, 5, 2)])
def test_printed_witness_and_perturbation(d, n, i):
    a, b = lemma_pair(d, n, i)
    w = printed_witness(d, n, i)
    assert verify_iso(a, b, w)
    g = list(w.g)
    g[0] = g[0] * Word.gen(1, n)
    assert not verify_iso(a, b, IsoWitness(w.sigma, tuple(g)))


def test_verify_rejects_malformed_witness():
    t = base_biset(2, 3)
    e = Word.identity(3)
    assert not verify_iso(t, t, IsoWitness((1, 1), (e, e)))
    assert not verify_iso(t, t, IsoWitness((1, 2), (e,)))
    assert not verify_iso(t, t, IsoWitness((1, 2), (e, Word.identity(4))))


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        verify_iso(base_biset(2, 3), base_biset(3, 3), IsoWitness.identity(2, 3))
    with pytest.raises(DimensionMismatch):
        decide_iso(base_biset(2, 3), base_biset(2, 4))


def test_decide_self():
    t = base_biset(3, 3)
    w = decide_iso(t, t)
    assert w == IsoWitness.identity(3, 3)


@pytest.mark.parametrize("d,n,i", [(3, 4, 2), (4, 5, 2), (2, 3, 1), (5, 6, 3)])
def test_decide_lemma_pairs(d, n, i):
    a, b = lemma_pair(d, n, i)
    w = decide_iso(a, b)
    assert w is not None and verify_iso(a, b, w)


def test_decide_negative():
    t = base_biset(2, 3)
    assert decide_iso(t, postcompose(t, twist(1, 4, 3))) is None


def test_negative_brute_force():
    # every witness is fixed by sigma and g_1: g_2 follows from the tree edge
    # y_1 . g1 = h . y_2, i.e. g_2 = h^-1 g_1 c with x_s(1) . g1 = c . x_s(2)
    a = base_biset(2, 3)
    b = postcompose(a, twist(1, 4, 3))
    h, _ = a.entry(1, 1)
    checked = 0
    for sigma in ((1, 2), (2, 1)):
        c, k = b.entry(sigma[0], 1)
        if k != sigma[1]:
            continue
        for g1 in all_words(3, 8):
            g2 = ~h * g1 * c
            assert not verify_iso(a, b, IsoWitness(sigma, (g1, g2)))
            checked += 1
    assert checked > 10_000


def test_decide_rejects_inconsistent():
    t = base_biset(2, 3)
    bad = t.with_entry(1, 2, (parse_word("g1^2", 3), 1))
    with pytest.raises(InvalidTable):
        decide_iso(bad, t)


def test_decide_change_basis():
    t = postcompose(base_biset(3, 3), twist(1, 2, 3))
    g = [parse_word(s, 3) for s in ("g1 g2", "g3^-1", "ginf")]
    u = change_basis(t, [3, 1, 2], g)
    w = decide_iso(t, u)
    assert w is not None and verify_iso(t, u, w)
    assert verify_iso(u, t, w.inverse())


def test_witness_tie_break_is_minimal():
    t = base_biset(2, 3)
    u = change_basis(t, [1, 2], [parse_word("g1", 3), parse_word("g1", 3)])
    w = decide_iso(t, u)
    assert w.total_length() <= 2


def test_witness_then():
    t = base_biset(3, 3)
    u = change_basis(t, [2, 3, 1], [parse_word("g2", 3), Word.identity(3), parse_word("g1", 3)])
    v = change_basis(u, [3, 2, 1], [parse_word("g3", 3), parse_word("g1^-1", 3), Word.identity(3)])
    w1, w2 = decide_iso(t, u), decide_iso(u, v)
    assert verify_iso(t, v, w1.then(w2))


def test_pretwist_self():
    t = base_biset(2, 3)
    w, psi = decide_iso_up_to_pretwist(t, t, 2)
    assert acts_equal(psi, Automorphism.identity(3))


def test_pretwist_recovers_twist():
    t = base_biset(2, 3)
    found = decide_iso_up_to_pretwist(precompose(t, twist(1, 2, 3)), t, 1)
    assert found is not None
    w, psi = found
    assert verify_iso(precompose(t, twist(1, 2, 3)), precompose(t, psi), w)


def test_pretwist_regression_fixture():
    # t(1,inf) is liftable, so post(base, t(1,inf)) lies in the class of the base
    t = base_biset(2, 3)
    found = decide_iso_up_to_pretwist(postcompose(t, twist(1, 4, 3)), t, 4)
    assert found is not None
    w, psi = found
    assert verify_iso(postcompose(t, twist(1, 4, 3)), precompose(t, psi), w)
    # t(2,inf) is not: different pretwist invariant, so none for any bound
    assert decide_iso_up_to_pretwist(postcompose(t, twist(2, 4, 3)), t, 4) is None


def test_pretwist_candidates_deduplicated():
    seen = [a.images for a in pretwist_candidates(3, 2)]
    assert len(seen) == len(set(seen))
    assert seen[0] == Automorphism.identity(3).images
    assert len(seen) > 12


def test_witness_formats():
    a, b = lemma_pair(3, 4, 2)
    w = decide_iso(a, b)
    assert witness_loads(witness_dumps(w), 4) == w
    text = witness_text(w)
    assert text.splitlines()[0].startswith("y_1 -> ")
    with pytest.raises(ValueError):
        witness_loads('{"sigma": [1]}', 4)
