"""Tables and witnesses printed for identity 2, rebuilt symbolically.

With eps = g_{i-1}...g_1 and zeta = g_{n-1}...g_{i+1} one has
ginf * gn * zeta * gi * eps = 1.
"""

from bisetcalc.biset import base_biset
from bisetcalc.freegroup import Word, conjugate as c, product
from bisetcalc.iso import IsoWitness
from bisetcalc.mcg import conjugate_automorphism, twist


def symbols(n, i):
    g = lambda k: Word.gen(k, n)  # noqa: E731
    eps = product([g(k) for k in range(i - 1, 0, -1)], n)
    zeta = product([g(k) for k in range(n - 1, i, -1)], n)
    return g, eps, zeta


def sides(n, i):
    inf = n + 1
    phi = conjugate_automorphism(twist(1, inf, n), twist(i + 1, inf, n))
    psi = twist(i, inf, n) * twist(i, n, n) * twist(n, inf, n)
    return phi, psi


def printed_post(d, n, i):
    """Entries of the post-composed table that differ from the base table."""
    g, eps, zeta = symbols(n, i)
    inf = n + 1
    return {
        (1, 1): (c(~g(i), ~zeta), 2),
        (d - 1, 1): (c(~g(i), ~zeta * g(inf)), d),
        (d, 1): (~g(inf) * c(g(i), ~zeta) * ~eps * ~zeta, 1),
        (1, i + 1): (c(g(i), ~zeta * ~eps), 1),
        (1, inf): (zeta * eps * c(~g(i), ~zeta) * g(inf), d),
        (2, inf): (~eps * ~zeta, 1),
        # printed with target y_2, which is y_{d-1} at d = 3; the ginf
        # column forces y_{d-1} in general
        (d, inf): (c(g(i), ~zeta * g(inf)), d - 1),
    }


def printed_pre(d, n, i):
    g, eps, zeta = symbols(n, i)
    inf = n + 1
    return {
        (1, 1): (c(g(inf) * g(n), ~eps * ~zeta), 2),
        (d, 1): (c(~g(inf), ~eps * ~zeta), 1),
        (1, i + 1): (c(g(i), ~zeta * ~eps), 1),
        (1, inf): (c(g(inf), ~eps * ~zeta), d),
    }


def expected_table(d, n, printed):
    t = base_biset(d, n)
    for (a, b), value in printed.items():
        t = t.with_entry(a, b, value)
    return t


def printed_witness(d, n, i):
    g, eps, zeta = symbols(n, i)
    e = Word.identity(n)
    gs = [e] + [~eps * ~zeta] * (d - 2) + [c(g(i), ~zeta * g(n + 1)) * ~eps * ~zeta]
    return IsoWitness(tuple(range(1, d + 1)), tuple(gs))
