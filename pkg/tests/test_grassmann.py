import random
from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, strategies as st

from jetvar import linalg
from jetvar.grassmann import (
    RegularityError,
    dd_relation_check,
    invariants,
    is_regular,
    phi_criterion,
    reconstruct,
    symbolic_invariants,
    symbolic_z,
    regularity_condition,
    transition,
    weyl_witness,
    z_element,
)
from jetvar.jetgroup import GroupElement, VelocityJet, act, compose
from jetvar.multiindex import MultiIndex
from jetvar.sampling import adapted_atoms, group_element, polynomial, regular_jet
from jetvar.symexpr import X, Expr, adapted_dimension, atom, formal_derivative, param, plain_partial, total_derivative, x, y

seeds = st.integers(0, 10 ** 6)
ONE, TWO = MultiIndex((1,), 1), MultiIndex((1, 1), 1)


def curve_jet():
    return VelocityJet.from_table(2, 1, 2, {(1, (1,)): 2, (1, (1, 1)): 4, (2, (1,)): 6, (2, (1, 1)): 10})


def graph_derivatives(jet):
    """dy/dx and d2y/dx2 of the curve through the jet, by the inverse
    function rule."""
    x1, x11, y1, y11 = jet[(1, ONE)], jet[(1, TWO)], jet[(2, ONE)], jet[(2, TWO)]
    return Fraction(y1, x1), Fraction(y11 * x1 - y1 * x11, x1 ** 3)


def test_regularity_examples():
    assert is_regular(VelocityJet.from_table(2, 1, 1, {(1, (1,)): 1}))
    vertical = VelocityJet.from_table(2, 1, 1, {(1, (1,)): 0, (2, (1,)): 1})
    assert not is_regular(vertical, (1,))
    assert is_regular(vertical, (2,))
    cond = regularity_condition(VelocityJet.symbolic(3, 2, 1))
    assert cond == X(1, (1,)) * X(2, (2,)) - X(1, (2,)) * X(2, (1,))


def test_z_element_examples():
    jet = VelocityJet.from_table(2, 1, 1, {(1, (1,)): 2, (2, (1,)): 1})
    assert z_element(jet)[(1, ONE)] == Fraction(1, 2)
    z = z_element(curve_jet())
    assert (z[(1, ONE)], z[(1, TWO)]) == (Fraction(1, 2), Fraction(-1, 2))


def test_z_element_rejects_singular_jets():
    with pytest.raises(RegularityError):
        z_element(VelocityJet.from_table(2, 1, 1, {(2, (1,)): 1}))


@given(seeds)
def test_z_element_is_inverse(seed):
    jet = regular_jet(random.Random(seed), 3, 2, 2)
    assert compose(jet.block(), z_element(jet)) == GroupElement.identity(2, 2)


def test_worked_invariants():
    pt = invariants(curve_jet())
    assert (pt[(1, ONE)], pt[(1, TWO)]) == (3, Fraction(-1, 2))
    assert (pt[(1, ONE)], pt[(1, TWO)]) == graph_derivatives(curve_jet())


@given(seeds)
def test_invariants_match_graph_oracle(seed):
    rng = random.Random(seed)
    jet = regular_jet(rng, 2, 1, 2)
    pt = invariants(jet)
    assert (pt[(1, ONE)], pt[(1, TWO)]) == graph_derivatives(jet)


@pytest.mark.parametrize("n,m,r", [(1, 2, 3), (2, 1, 2), (2, 2, 2)])
def test_invariance_and_reconstruction(rng, n, m, r):
    for _ in range(4):
        jet = regular_jet(rng, n + m, n, r)
        moved = act(jet, group_element(rng, n, r))
        assert invariants(moved) == invariants(jet)
        assert reconstruct(invariants(jet), jet.block()) == jet
        w = weyl_witness(jet, moved)
        assert w is not None and act(jet, w) == moved


def test_invariants_are_symmetric():
    n = 2
    z, table = symbolic_z(n, 2), symbolic_invariants(n, 1, 2)

    def peel(i, j):
        return sum((z[(k, MultiIndex((i,), n))] * formal_derivative(table[(1, MultiIndex((j,), n))], k)
                    for k in (1, 2)), Expr.const(0))

    assert peel(1, 2) == peel(2, 1) == table[(1, MultiIndex((1, 2), n))]


def test_reconstruct_examples():
    pt = invariants(curve_jet())
    xblock = GroupElement.from_table(1, 2, {(1, (1,)): 2, (1, (1, 1)): 4})
    jet = reconstruct(pt, xblock)
    assert (jet[(2, ONE)], jet[(2, TWO)]) == (6, 10)
    flat = reconstruct(pt, GroupElement.identity(1, 2))
    assert (flat[(2, ONE)], flat[(2, TWO)]) == (pt[(1, ONE)], pt[(1, TWO)])


def test_unrelated_jets_have_no_witness(rng):
    a, b = regular_jet(rng, 2, 1, 2), regular_jet(rng, 2, 1, 2)
    if invariants(a) != invariants(b):
        assert weyl_witness(a, b) is None


@pytest.mark.parametrize("n,m,r", [(1, 1, 2), (2, 1, 2)])
def test_phi_criterion(rng, n, m, r):
    for _ in range(3):
        a = regular_jet(rng, n + m, n, r)
        same = act(a, group_element(rng, n, r))
        assert all(v == 0 for v in phi_criterion(a, same).values())
        other = regular_jet(rng, n + m, n, r)
        differ = invariants(a) != invariants(other)
        assert differ == any(v != 0 for v in phi_criterion(a, other).values())


def swap():
    return [y(1), x(1)]


def test_transition_identity():
    tr = transition([x(1), y(1)], 1, 1, 3)
    assert tr.J == Expr.const(1)
    assert all(v == Expr.of_atom(atom("y", s, I.entries)) for (s, I), v in tr.ybar.items())


def test_swap_transition():
    tr = transition(swap(), 1, 1, 2)
    y1, y11 = y(1, (1,)), y(1, (1, 1))
    assert tr.ybar[(1, ONE)] == 1 / y1
    assert tr.ybar[(1, TWO)] == -y11 / y1 ** 3
    assert tr.J == y1
    assert linalg.matmul(tr.P, tr.Q) == linalg.identity(1)


def test_swap_top_order_delta_derivative():
    tr = transition(swap(), 1, 1, 2)
    d = plain_partial(tr.ybar[(1, TWO)], atom("y", 1, (1, 1)))
    assert d == tr.contact[0][0] * tr.P[0][0] ** 2


def test_barred_total_derivatives_recombine(rng):
    F = [x(1) + y(1) ** 2, x(1) * y(1) + y(1)]
    tr = transition(F, 1, 1, 1)
    f = polynomial(rng, adapted_atoms(1, 1, 1), terms=4)
    back = sum((tr.Q[j][0] * tr.barred_total_derivative(f, j + 1) for j in range(1)), Expr.const(0))
    assert back == total_derivative(f, 1)


def test_singular_chart_map():
    with pytest.raises(ZeroDivisionError):
        transition([y(1) - y(1), x(1)], 1, 1, 1)


def test_dd_relations():
    t = param("t")
    assert dd_relation_check([t + t ** 2, 3 * t - t ** 3], [X(2), X(1) + X(2) ** 2], 1, 2)
    t1, t2 = param("t1"), param("t2")
    gamma = [t1 + t2 ** 2, t2 - t1 * t2, t1 * t2 + t1 ** 2]
    assert dd_relation_check(gamma, [X(1) + X(3), X(2), X(3) + X(1) * X(2)], 2, 2)


@pytest.mark.parametrize("n,m,r", [(n, m, r) for n in (1, 2, 3) for m in (1, 2, 3) for r in (1, 2, 3)])
def test_dimension_formula(rng, n, m, r):
    want = m * comb(n + r, n) + n
    assert adapted_dimension(n, m, r) == want
    if n + r <= 4:
        assert invariants(regular_jet(rng, n + m, n, r)).coordinate_count() == want


def test_dimension_worked_value():
    assert adapted_dimension(2, 1, 2) == 8
