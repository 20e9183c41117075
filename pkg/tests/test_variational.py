import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from jetvar.jetgroup import act
from jetvar.multiindex import MultiIndex, indices_upto, ordered_count
from jetvar.sampling import adapted_atoms, group_element, homogeneous_atoms, polynomial, regular_jet
from jetvar.symexpr import ChartSpec, Evaluator, X, Expr, atom, parse, total_derivative, x, y
from jetvar.variational import (
    adapted,
    apply_operator,
    divergence_form,
    euler_lagrange,
    helmholtz,
    homogeneous,
    integrate_by_parts,
    is_locally_variational,
    lagrangian_operator,
    lie_euler,
    product_rule_residual,
)
from jetvar.variational.correspondence import (
    helmholtz_correspondence,
    helmholtz_correspondence_from_adapted,
    lagrangian_correspondence,
)
from jetvar.variational.covariance import equation_covariance, lagrangian_covariance, swap_map
from jetvar.variational.reduction import (
    HomogeneityError,
    equation_conditions,
    hom_equation_reduce,
    homogeneous_equation,
    homogeneous_lagrangian,
    is_homogeneous,
    reduce,
)

seeds = st.integers(0, 10 ** 6)
AD = ChartSpec(1, 1, 2)
HOM = ChartSpec(1, 1, 1, "homogeneous")
E0, E1 = MultiIndex((), 1), MultiIndex((1,), 1)
CURVE_LH = "X2_1^2/X1_1"


def p(text, chart=AD):
    return parse(text, chart)


# ------------------------------------------------------------- Lie-Euler


def test_lie_euler_examples():
    side = adapted(1, 1)
    L = p("y1_1^2/2")
    assert lie_euler(L, 1, E0, side, 1) == -y(1, (1, 1))
    assert lie_euler(p("y1_1"), 1, E1, side, 1) == Expr.const(1)
    assert lie_euler(L, 1, E1, side, 1) == y(1, (1,))


@given(seeds)
def test_lie_euler_top_and_bottom(seed):
    rng = random.Random(seed)
    side = homogeneous(2, 3)
    f = polynomial(rng, homogeneous_atoms(3, 2, 2), terms=3, degree=2)
    for A in (1, 2, 3):
        for I in indices_upto(2, 2, 2):
            assert lie_euler(f, A, I, side, 2) == side.partial(f, A, I)
    assert [lie_euler(f, A, side.empty(), side, 2) for A in (1, 2, 3)] == euler_lagrange(f, side, 2)


def test_lie_euler_rejects_oversized_index():
    with pytest.raises(ValueError):
        lie_euler(p("y1_1"), 1, MultiIndex((1, 1), 1), adapted(1, 1), 1)


# -------------------------------------------------------- Euler-Lagrange


def test_free_particle():
    assert euler_lagrange(p("y1_1^2/2"), adapted(1, 1)) == [-y(1, (1, 1))]


@given(seeds)
def test_total_divergences_are_null(seed):
    rng = random.Random(seed)
    n, m = 2, 2
    side = adapted(n, m)
    fs = [polynomial(rng, adapted_atoms(n, m, 1), terms=3, degree=3) for _ in range(n)]
    div = sum((total_derivative(f, i) for i, f in enumerate(fs, 1)), Expr.const(0))
    assert all(e.is_zero() for e in euler_lagrange(div, side, 2))
    hom = homogeneous(1, 2)
    g = polynomial(rng, homogeneous_atoms(2, 1, 1), terms=3, degree=3)
    assert all(e.is_zero() for e in euler_lagrange(hom.d(g, 1), hom, 2))


def test_homogeneous_running_example():
    Lh = p(CURVE_LH, HOM)
    E = euler_lagrange(Lh, homogeneous(1, 2))
    det = X(1, (1,))
    y1 = X(2, (1,)) / X(1, (1,))
    y11 = (X(2, (1, 1)) * X(1, (1,)) - X(2, (1,)) * X(1, (1, 1))) / X(1, (1,)) ** 3
    assert E[1] == det * (-2 * y11)
    assert E[0] == -det * y1 * (-2 * y11)


# ---------------------------------------------------- integration by parts


def test_ibp_examples():
    side = homogeneous(1, 2)
    P = {(2, E0): X(1) * X(2)}
    Q = integrate_by_parts(P, side, 1)
    assert Q[(2, E0)] == X(1) * X(2) and Q[(2, E1)].is_zero()
    P = lagrangian_operator(parse("X2_1^2/2", HOM), side, 1)
    Q = integrate_by_parts(P, side, 1)
    assert Q[(2, E0)] == -X(2, (1, 1))
    assert Q[(2, E1)] == X(2, (1,))


@pytest.mark.parametrize("kind,n,r", [("adapted", 1, 2), ("adapted", 2, 2), ("homogeneous", 2, 2),
                                      ("homogeneous", 1, 1)])
def test_ibp_identity_and_uniqueness(rng, kind, n, r):
    side = adapted(n, 1) if kind == "adapted" else homogeneous(n, n + 1)
    atoms = adapted_atoms(n, 1, r) if kind == "adapted" else homogeneous_atoms(n + 1, n, r)
    for _ in range(3):
        P = {(A, I): polynomial(rng, atoms, terms=2, degree=2)
             for A in range(1, side.labels + 1) for I in indices_upto(n, r)}
        Q = integrate_by_parts(P, side, r)
        lhs = apply_operator(P, side)
        assert lhs == divergence_form(Q, side)
        assert all(Q[(A, side.empty())] ==
                   _euler_of_operator(P, A, side, r) for A in range(1, side.labels + 1))
        for key in Q:
            bumped = dict(Q)
            bumped[key] = Q[key] + 1
            assert lhs != divergence_form(bumped, side)


def _euler_of_operator(P, A, side, r):
    out = Expr.const(0)
    for I in indices_upto(side.n, r):
        c = P.get((A, I), Expr.const(0))
        out = out + side.d_index(c, I) * ((-1) ** I.degree * ordered_count(I))
    return out


# ------------------------------------------------------------ product rule


def test_product_rule_examples():
    side = homogeneous(1, 2)
    f = X(2, (1,))
    assert product_rule_residual(Expr.const(3), f, 2, E0, side, 1).is_zero()
    assert product_rule_residual(f, f, 2, E0, side, 1).is_zero()


@pytest.mark.parametrize("n", [1, 2])
def test_product_rule_sweep(rng, n):
    side = homogeneous(n, n + 1)
    atoms = homogeneous_atoms(n + 1, n, 2)
    for _ in range(2):
        f, g = (polynomial(rng, atoms, terms=2, degree=2) for _ in range(2))
        for A in range(1, n + 2):
            for I in indices_upto(n, 2):
                assert product_rule_residual(f, g, A, I, side, 2).is_zero()


# ------------------------------------------------------------ homogeneity


def test_is_homogeneous_examples(rng):
    assert is_homogeneous(p(CURVE_LH, HOM), 1, 2, 1)
    assert not is_homogeneous(p("X2_1^2", HOM), 1, 2, 1)
    L = polynomial(rng, adapted_atoms(1, 1, 1), terms=3, degree=2)
    assert is_homogeneous(homogeneous_lagrangian(L, 1, 1, 1), 1, 2, 1)


def test_reduce_examples(rng):
    assert reduce(p(CURVE_LH, HOM), 1, 1) == y(1, (1,)) ** 2
    assert reduce(X(1, (1,)) * X(2, (2,)) - X(1, (2,)) * X(2, (1,)), 2, 1, 1) == Expr.const(1)
    L = polynomial(rng, adapted_atoms(2, 1, 1), terms=3, degree=2)
    assert reduce(homogeneous_lagrangian(L, 2, 1, 1), 2, 1, 1) == L
    with pytest.raises(HomogeneityError):
        reduce(p("X2_1^2", HOM), 1, 1)


def test_homogeneous_lagrangian_scales_by_det(rng):
    Lh = homogeneous_lagrangian(polynomial(rng, adapted_atoms(1, 1, 2), terms=3, degree=2), 1, 1, 2)
    for _ in range(5):
        jet, a = regular_jet(rng, 2, 1, 2), group_element(rng, 1, 2)
        assert Evaluator(act(jet, a).point())(Lh) == a.det() * jet.evaluate(Lh)


# -------------------------------------------------------------- Helmholtz


def test_helmholtz_examples():
    side = adapted(1, 1)
    assert helmholtz([p("y1_11")], side).is_zero()
    H = helmholtz([p("y1_1")], side)
    assert H[(1, 1, E1)] == Expr.const(2)
    assert [k for k, _ in H.nonzero()] == [(1, 1, E1)]
    assert is_locally_variational([p("y1_11 + y1^3")], side)
    assert not is_locally_variational([p("y1_1")], side)


def test_helmholtz_of_euler_lagrange_symbolic_first_order(rng):
    side = adapted(1, 1)
    for _ in range(5):
        L = polynomial(rng, adapted_atoms(1, 1, 1), terms=4, degree=3)
        assert helmholtz(euler_lagrange(L, side, 1), side, 2).is_zero()


@pytest.mark.parametrize("n,m", [(1, 2), (2, 1), (2, 2)])
def test_helmholtz_of_euler_lagrange_second_order(rng, n, m):
    side = adapted(n, m)
    L = polynomial(rng, adapted_atoms(n, m, 2), terms=4, degree=3)
    H = helmholtz(euler_lagrange(L, side, 2), side, 4)
    atoms = sorted({a for v in H.components.values() for a in v.atoms()}, key=lambda a: a.sort_key())
    for _ in range(10):
        ev = Evaluator({a: Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for a in atoms})
        assert all(ev(v) == 0 for v in H.components.values())


def test_homogeneous_euler_lagrange_is_variational():
    Lh = p(CURVE_LH, HOM)
    side = homogeneous(1, 2)
    assert is_locally_variational(euler_lagrange(Lh, side), side, 2)


# ------------------------------------------------------ equations, reduction


def test_equation_reduction_roundtrip():
    Th = euler_lagrange(p(CURVE_LH, HOM), homogeneous(1, 2))
    assert hom_equation_reduce(Th, 1) == [-2 * y(1, (1, 1))]
    T = [p("y1_1 + x1*y1")]
    assert hom_equation_reduce(homogeneous_equation(T, 1, 1, 1), 1, 1) == T


def test_non_homogeneous_equation_is_rejected():
    """X2_1 dx1 scales correctly under the jet group; it fails because its
    pullback along curves does not vanish."""
    Th = [X(2, (1,)), Expr.const(0)]
    assert equation_conditions(Th, 1, 1) == (True, False)
    with pytest.raises(HomogeneityError):
        hom_equation_reduce(Th, 1, 1)
    with pytest.raises(HomogeneityError):
        hom_equation_reduce([X(2, (1,)) ** 2, Expr.const(0)], 1, 1)


# ---------------------------------------------------------- correspondences


def test_lagrangian_correspondence_running_example():
    report = lagrangian_correspondence(p(CURVE_LH, HOM), 1, 1, samples=20, immersions=5)
    assert report.passed, report.failures()
    assert report.values["L"] == "y1_1^2"


def test_lagrangian_correspondence_random_second_order(rng):
    L = polynomial(rng, adapted_atoms(1, 1, 2), terms=3, degree=2, require=[atom("y", 1, (1, 1))])
    report = lagrangian_correspondence(homogeneous_lagrangian(L, 1, 1, 2), 1, 1, 2, samples=5, immersions=3)
    names = {c.name for c in report.checks}
    assert "base-lie-euler-higher" in names
    assert report.passed, report.failures()


def test_helmholtz_correspondence_variational_and_not():
    for text in ("y1_11", "y1_1"):
        report = helmholtz_correspondence_from_adapted([p(text)], 1, 1, samples=10)
        assert report.passed, report.failures()
    Th = homogeneous_equation([p("y1_1")], 1, 1, 1)
    assert not helmholtz(Th, homogeneous(1, 2), 2).is_zero()


def test_helmholtz_correspondence_two_base_directions():
    report = helmholtz_correspondence(homogeneous_equation([parse("y1_11 + y1_22", ChartSpec(2, 1, 2))], 2, 1, 2),
                                      2, samples=3)
    assert report.passed, report.failures()


# ------------------------------------------------------------- covariance


def test_swap_covariance():
    assert lagrangian_covariance(p("y1_1^2/2"), swap_map(), 1, 1, samples=5).passed
    for t in ("y1_11 + y1^3", "y1_1"):
        report = equation_covariance([p(t)], swap_map(), 1, 1)
        assert report.passed, report.failures()


def test_covariance_under_polynomial_chart_map():
    F = [x(1) + y(1) ** 2, y(1) + x(1) ** 3]
    report = lagrangian_covariance(p("y1_1^2/2 + x1*y1"), F, 1, 1, samples=5)
    assert report.passed, report.failures()
