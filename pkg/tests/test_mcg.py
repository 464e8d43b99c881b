import pytest

from bisetcalc.freegroup import RankMismatch, Word, conjugate, parse_word, product
from bisetcalc.grammar import ParseError
from bisetcalc.mcg import (
    Automorphism,
    InvalidTwist,
    TwistIndex,
    acts_equal,
    all_twist_indices,
    apply,
    compose,
    conjugate_automorphism,
    format_mcg_word,
    invert,
    is_peripheral_preserving,
    parse_mcg_word,
    twist,
    twist_generator,
)


def gens(n):
    return [Word.gen(k, n) for k in range(1, n + 1)]


def test_twist_adjacent_formula():
    n = 3
    g1, g2, g3 = gens(n)
    t = twist(1, 2, n)
    assert t(g1) == conjugate(g1, g2 * g1)
    assert t(g2) == conjugate(g2, g1)
    assert t(g3) == g3


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_twist_fixes_other_generators(n):
    for idx in all_twist_indices(n):
        t = twist_generator(idx, n)
        for k in range(1, n + 1):
            if k not in (idx.i, idx.j):
                assert t(Word.gen(k, n)) == Word.gen(k, n)


def test_twist_general_formula():
    # alpha = g_{j-1} ... g_{i+1}
    n = 5
    for idx in all_twist_indices(n):
        i, j = idx.i, idx.j
        gi, gj = Word.gen(i, n), Word.gen(j, n)
        alpha = product([Word.gen(k, n) for k in range(j - 1, i, -1)], n)
        t = twist(i, j, n)
        assert t.image(i) == conjugate(gi, ~alpha * gj * alpha * gi)
        assert t.image(j) == conjugate(gj, alpha * gi * ~alpha)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_conjugated_push_beta_form(n):
    # phi = t(1,inf)^t(i+1,inf) sends g1 to g1^(ginf^beta), beta = g_{i+1}^delta ginf
    for i in range(1, n):
        g = lambda k: Word.gen(k, n)  # noqa: E731
        phi = conjugate_automorphism(twist(1, n + 1, n), twist(i + 1, n + 1, n))
        delta = product([g(k) for k in range(i, 0, -1)], n)
        beta = conjugate(g(i + 1), delta) * g(n + 1)
        assert phi(g(1)) == conjugate(g(1), conjugate(g(n + 1), beta))


def test_product_of_three_twists():
    n, i = 4, 2
    g = lambda k: Word.gen(k, n)  # noqa: E731
    eps, zeta = g(1), g(3)
    psi = twist(i, 5, n) * twist(i, n, n) * twist(n, 5, n)
    assert psi(g(2)) == conjugate(g(2), ~zeta * ~eps)
    assert psi(g(4)) == conjugate(g(4), ~eps * ~zeta)
    assert psi.image(5) == conjugate(g(5), ~eps * ~zeta)
    assert psi(g(1)) == g(1) and psi(g(3)) == g(3)


def test_identity_and_inverse():
    n = 3
    e = Automorphism.identity(n)
    w = parse_word("g1 g2^-1 g3", n)
    assert apply(e, w) == w
    t = twist(1, 2, n)
    assert apply(compose(t, invert(t)), Word.gen(1, n)) == Word.gen(1, n)
    assert compose(invert(t), t) == e


def test_composition_order_left_acts_first():
    n = 3
    a, b = twist(1, 2, n), twist(2, 4, n)
    w = parse_word("g1 g2 g3^-1", n)
    assert apply(a * b, w) == apply(b, apply(a, w))


def test_conjugation_expands_to_word():
    n = 3
    a, b = twist(1, 4, n), twist(2, 4, n)
    c = conjugate_automorphism(a, b)
    assert c.word == ((2, 4, -1), (1, 4, 1), (2, 4, 1))
    assert c == invert(b) * a * b
    assert (a ^ b) == c


def test_power_and_negative_power():
    t = twist(2, 4, 3)
    assert t**3 == t * t * t
    assert t**-2 == invert(t) * invert(t)
    assert t**0 == Automorphism.identity(3)


def test_invalid_twist_index():
    for bad in [(0, 2), (2, 2), (3, 1), (1, 5)]:
        with pytest.raises(InvalidTwist):
            twist_generator(TwistIndex(*bad), 3)


def test_rank_mismatch():
    with pytest.raises(RankMismatch):
        compose(twist(1, 2, 3), twist(1, 2, 4))
    with pytest.raises(RankMismatch):
        apply(twist(1, 2, 3), Word.gen(1, 4))


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_relator_preserved_by_generators(n):
    rel = [n + 1] + list(range(n, 0, -1))
    for idx in all_twist_indices(n):
        t = twist_generator(idx, n)
        img = product([t.image(k) for k in rel], n)
        assert img.is_identity()


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_generators_peripheral(n):
    for idx in all_twist_indices(n):
        assert is_peripheral_preserving(twist_generator(idx, n)).ok


def test_identity_peripheral_witnesses_trivial():
    report = is_peripheral_preserving(Automorphism.identity(4))
    assert report.ok and all(w.is_identity() for w in report.witnesses.values())


def test_non_pure_swap_fails():
    n = 2
    swap = Automorphism.from_images([Word.gen(2, n), Word.gen(1, n)])
    report = is_peripheral_preserving(swap)
    assert not report.ok and 1 in report.failures()
    with pytest.raises(ValueError):
        invert(swap)


def _unlinked(a, b):
    (i, j), (k, l) = a, b
    if {i, j} & {k, l}:
        return False
    return j < k or l < i or (i < k and l < j) or (k < i and j < l)


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_unlinked_twists_commute(n):
    idx = [(t.i, t.j) for t in all_twist_indices(n)]
    count = 0
    for a in idx:
        for b in idx:
            if _unlinked(a, b):
                ta, tb = twist(*a, n), twist(*b, n)
                assert acts_equal(ta * tb, tb * ta), (a, b)
                count += 1
    assert count > 0 or n == 3


@pytest.mark.parametrize(
    "text,word",
    [
        ("t(1,inf)", ((1, 4, 1),)),
        ("t(2,inf)^3", ((2, 4, 1),) * 3),
        ("t(1,inf)^(t(3,inf))", ((3, 4, -1), (1, 4, 1), (3, 4, 1))),
        ("t(1,2)*t(1,2)^-1", ()),
        ("1", ()),
    ],
)
def test_parse_mcg_word(text, word):
    a = parse_mcg_word(text, 3)
    assert a.word == word
    assert parse_mcg_word(format_mcg_word(a), 3) == a


def test_format_mcg_word():
    a = parse_mcg_word("t(2,inf)^3 * t(1,3)^-1", 3)
    assert format_mcg_word(a) == "t(2,inf)^3*t(1,3)^-1"
    assert format_mcg_word(Automorphism.identity(3)) == "1"


@pytest.mark.parametrize("text", ["t(1,", "t(0,2)", "t(2,1)", "t(1,5)", "s(1,2)", "t(1,inf)^"])
def test_parse_mcg_errors(text):
    with pytest.raises(ParseError) as info:
        parse_mcg_word(text, 3)
    assert 0 <= info.value.position <= len(text)


def test_label_uses_inf():
    assert TwistIndex(2, 4).label(3) == "t(2,inf)"
    assert TwistIndex(2, 3).label(3) == "t(2,3)"
