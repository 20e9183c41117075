import random
from fractions import Fraction
from itertools import product

import pytest
import sympy
from hypothesis import given, strategies as st

from jetvar.jetgroup import (
    Evolution,
    GroupElement,
    VelocityJet,
    act,
    apply_chart_map,
    compose,
    inverse,
    prolong_chart_map,
    prolong_evolution,
    prolong_immersion,
)
from jetvar.multiindex import MultiIndex, indices_upto
from jetvar.sampling import group_element, homogeneous_atoms, polynomial, regular_jet
from jetvar.symexpr import X, Expr, atom, formal_derivative, param, substitute, weighted_partial

seeds = st.integers(0, 10 ** 6)


def ge(n, r, table):
    return GroupElement.from_table(n, r, table)


def sympy_map(a: GroupElement, ts):
    """Taylor polynomial with jet a at the origin, as sympy expressions."""
    out = []
    for i in range(1, a.n + 1):
        f = 0
        for (k, I), v in a.items():
            if k != i:
                continue
            # sum over ordered tuples, each canonical index once per arrangement
            mono = 1
            for j, mult in enumerate(I.multiplicities()):
                mono *= ts[j] ** mult / sympy.factorial(mult)
            f += sympy.Rational(v.numerator, v.denominator) * mono if v else 0
        out.append(f)
    return out


def sympy_jet(fs, ts, n, r):
    origin = {t: 0 for t in ts}
    coeffs = {}
    for i, f in enumerate(fs, 1):
        for I in indices_upto(n, r, 1):
            d = sympy.diff(f, *[ts[j - 1] for j in I.entries])
            val = sympy.Rational(d.subs(origin))
            coeffs[(i, I)] = Fraction(int(val.p), int(val.q))
    return coeffs


def oracle_compose(a, b):
    ts = sympy.symbols(f"t1:{a.n + 1}")
    inner = sympy_map(b, ts)
    outer = sympy_map(a, ts)
    comp = [sympy.expand(f.subs(dict(zip(ts, inner)), simultaneous=True)) for f in outer]
    return GroupElement(a.n, a.r, sympy_jet(comp, ts, a.n, a.r))


def test_compose_worked_instance():
    a = ge(1, 2, {(1, (1,)): 2, (1, (1, 1)): 3})
    b = ge(1, 2, {(1, (1,)): 5, (1, (1, 1)): 7})
    assert compose(a, b) == ge(1, 2, {(1, (1,)): 10, (1, (1, 1)): 89})
    assert compose(a, GroupElement.identity(1, 2)) == a


def test_compose_shape_mismatch():
    with pytest.raises(ValueError):
        compose(GroupElement.identity(1, 2), GroupElement.identity(2, 2))


def test_inverse_worked_instance():
    a = ge(1, 2, {(1, (1,)): 2, (1, (1, 1)): 3})
    assert inverse(a) == ge(1, 2, {(1, (1,)): Fraction(1, 2), (1, (1, 1)): Fraction(-3, 8)})
    e = GroupElement.identity(2, 3)
    assert inverse(e) == e


def test_inverse_of_singular_element():
    with pytest.raises(ZeroDivisionError):
        inverse(ge(2, 1, {(1, (1,)): 1, (1, (2,)): 2, (2, (1,)): 2, (2, (2,)): 4}))


@pytest.mark.parametrize("n,r", [(1, 3), (2, 2), (2, 3), (3, 2)])
def test_group_axioms_and_oracle(rng, n, r):
    e = GroupElement.identity(n, r)
    for _ in range(4):
        a, b, c = (group_element(rng, n, r) for _ in range(3))
        assert compose(compose(a, b), c) == compose(a, compose(b, c))
        assert compose(e, a) == a == compose(a, e)
        ai = inverse(a)
        assert compose(a, ai) == e == compose(ai, a)
        assert compose(a, b) == oracle_compose(a, b)


def test_act_examples():
    x = VelocityJet.from_table(2, 1, 1, {(1, (1,)): 2, (2, (1,)): 6})
    assert act(x, ge(1, 1, {(1, (1,)): 3})) == VelocityJet.from_table(2, 1, 1, {(1, (1,)): 6, (2, (1,)): 18})
    assert act(x, GroupElement.identity(1, 1)) == x


@given(seeds)
def test_act_is_right_action_fixing_points(seed):
    rng = random.Random(seed)
    x = regular_jet(rng, 3, 2, 2)
    a, b = group_element(rng, 2, 2), group_element(rng, 2, 2)
    assert act(act(x, a), b) == act(x, compose(a, b))
    moved = act(x, a)
    for A in range(1, 4):
        assert moved[(A, MultiIndex((), 2))] == x[(A, MultiIndex((), 2))]


def test_prolong_immersion_examples():
    t = param("t")
    jet = prolong_immersion([t, 3 * t], 1, [0])
    assert (jet[(1, MultiIndex((1,), 1))], jet[(2, MultiIndex((1,), 1))]) == (1, 3)
    jet = prolong_immersion([2 * t + 2 * t ** 2, 6 * t + 5 * t ** 2], 2, [0])
    one, two = MultiIndex((1,), 1), MultiIndex((1, 1), 1)
    assert [jet[(A, I)] for A in (1, 2) for I in (one, two)] == [2, 4, 6, 10]


@given(seeds)
def test_reparametrization_matches_action(seed):
    rng = random.Random(seed)
    t = param("t")
    ta = t.atoms()[0]
    gamma = [polynomial(rng, [ta], terms=3, degree=3) for _ in range(2)]
    c1 = Fraction(rng.choice([-3, -2, -1, 1, 2, 3]), rng.randint(1, 3))
    alpha = c1 * t + rng.randint(-3, 3) * t ** 2 + rng.randint(-3, 3) * t ** 3
    r = 3
    a = GroupElement(1, r, {k: v for k, v in prolong_immersion([alpha], r, [0]).items() if k[1].degree})
    lhs = prolong_immersion([substitute(g, {ta: alpha}) for g in gamma], r, [0])
    assert lhs == act(prolong_immersion(gamma, r, [0]), a)


def recurrence_table(F, n, r):
    table = {}
    for A, f in enumerate(F, 1):
        table[(A, ())] = f
        for I in indices_upto(n, r, 1):
            table[(A, I.entries)] = formal_derivative(table[(A, I.entries[1:])], I.entries[0])
    return table


@pytest.mark.parametrize("N,n,r", [(2, 1, 3), (3, 1, 2), (3, 2, 2)])
def test_closed_formula_matches_recurrence(rng, N, n, r):
    base = [atom("X", A) for A in range(1, N + 1)]
    F = [polynomial(rng, base, terms=3, degree=2) for _ in range(N)]
    closed = prolong_chart_map(F, n, r, verify=False)
    rec = recurrence_table(F, n, r)
    assert all(closed[(A, I)] == rec[(A, I.entries)] for A in range(1, N + 1) for I in indices_upto(n, r))


def test_second_order_prolongation_display():
    n = 2
    F = [X(1) * X(2) + X(2) ** 2, X(1) ** 2]
    table = prolong_chart_map(F, n, 2)
    base = [atom("X", B) for B in (1, 2)]
    from jetvar.symexpr import plain_partial

    for A in (1, 2):
        for i1, i2 in product((1, 2), repeat=2):
            want = Expr.const(0)
            for B in (1, 2):
                want = want + X(B, (i1, i2)) * plain_partial(F[A - 1], base[B - 1])
                for C in (1, 2):
                    want = want + X(B, (i1,)) * X(C, (i2,)) * plain_partial(plain_partial(F[A - 1], base[B - 1]), base[C - 1])
            assert table[(A, MultiIndex((i1, i2), n))] == want


def test_identity_map_prolongs_to_identity():
    table = prolong_chart_map([X(1), X(2)], 1, 3)
    assert all(v == X(A, I.entries) for (A, I), v in table.items())


def test_prolongation_depends_on_low_orders_only(rng):
    n, N, r = 1, 2, 3
    base = [atom("X", A) for A in range(1, N + 1)]
    table = prolong_chart_map([polynomial(rng, base, terms=3, degree=3) for _ in range(N)], n, r)
    for (A, I), v in table.items():
        for B in range(1, N + 1):
            for J in indices_upto(n, r, I.degree + 1):
                assert weighted_partial(v, "X", B, J).is_zero()


def test_chart_prolongation_is_functorial(rng):
    n, N, r = 1, 2, 2
    base = [atom("X", A) for A in range(1, N + 1)]
    F = [polynomial(rng, base, terms=2, degree=2) for _ in range(N)]
    G = [polynomial(rng, base, terms=2, degree=2) for _ in range(N)]
    GF = [substitute(g, dict(zip(base, F))) for g in G]
    tF, tG, tGF = (prolong_chart_map(M, n, r) for M in (F, G, GF))
    assert all(apply_chart_map(tF, tG[k]) == tGF[k] for k in tGF)


def test_prolong_evolution_examples():
    op = prolong_evolution(Evolution([Expr.const(1), Expr.const(0)]), 1, 1)
    assert op(X(1)) == Expr.const(1)
    op = prolong_evolution(Evolution([X(1), X(2)]), 1, 1)
    assert op(X(2, (1,))) == X(2, (1,))


def test_evolution_rejects_jet_dependence():
    with pytest.raises(ValueError):
        Evolution([X(1, (1,))])


@given(seeds)
def test_prolonged_evolution_is_a_derivation(seed):
    rng = random.Random(seed)
    base = [atom("X", A) for A in (1, 2)]
    op = prolong_evolution(Evolution([polynomial(rng, base, terms=2) for _ in range(2)]), 2, 1)
    atoms = homogeneous_atoms(2, 1, 2)
    f, g = polynomial(rng, atoms, terms=3), polynomial(rng, atoms, terms=3)
    assert op(f * g) == op(f) * g + f * op(g)
