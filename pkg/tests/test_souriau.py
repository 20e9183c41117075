import pytest

from jetvar import forms
from jetvar.sampling import adapted_atoms, polynomial
from jetvar.souriau import (
    LagrangeSouriauForm,
    SouriauError,
    build_alpha,
    build_beta,
    check_closedness,
    check_LS,
    check_recurrences,
    extract_sigma,
    solve_el_on_curve,
    souriau_report,
    vertical_contractions_vanish,
)
from jetvar.symexpr import ChartSpec, Expr, param, parse, total_derivative, y
from jetvar.variational import adapted, euler_lagrange

FREE = "y1_1^2/2"


def first_order(n, m):
    return ChartSpec(n, m, 1)


def random_lagrangian(rng, n, m):
    atoms = adapted_atoms(n, m, 1)
    velocities = [a for a in atoms if a.kind == "y" and a.index]
    return polynomial(rng, atoms, terms=3, degree=3, require=velocities[:2])


def passed(report):
    return {c.name: c.passed for c in report.checks}


# ------------------------------------------------------------------ beta


def test_free_particle_beta():
    beta = build_beta(parse(FREE, first_order(1, 1)), 1, 1)
    y1 = y(1, (1,))
    dy = forms.differential(y(1), 1, 1, 1)
    dx = forms.dx(1, 1, 1, 1)
    assert beta.form() == dy * y1 - dx * (y1 ** 2 / 2)


def test_beta_without_velocities_is_horizontal():
    L = parse("x1*y1^2 + 3", first_order(1, 1))
    assert build_beta(L, 1, 1).form() == forms.dx(1, 1, 1, 1) * L


def test_beta_single_fibre_truncates(rng):
    L = random_lagrangian(rng, 2, 1)
    beta = build_beta(L, 2, 1)
    assert all(v.is_zero() for (I, S), v in beta.coefficients.items() if len(S) >= 2)


def test_beta_rejects_second_order():
    with pytest.raises(ValueError):
        build_beta(parse("y1_11", ChartSpec(1, 1, 2)), 1, 1)


# ----------------------------------------------------------------- alpha


def test_free_particle_alpha():
    alpha = build_alpha(parse(FREE, first_order(1, 1)), 1, 1)
    w, w1, dx = (forms.omega(1, (), 1, 1, 2), forms.omega(1, (1,), 1, 1, 2), forms.dx(1, 1, 1, 2))
    y11 = y(1, (1, 1))
    assert alpha.form() == forms.wedge(w1, w) - forms.wedge(w, dx) * y11
    assert alpha.f(1, (1,), 1, (1,)) == Expr.const(1)
    assert alpha.euler_lagrange() == [-y11]


def test_linear_velocity_lagrangian():
    alpha = build_alpha(parse("x1*y1_1", first_order(1, 1)), 1, 1)
    assert alpha.f(1, (1,), 1, (1,)).is_zero()
    assert alpha.euler_lagrange() == [Expr.const(-1)]


@pytest.mark.parametrize("n,m", [(1, 2), (2, 1), (2, 2)])
def test_alpha_coefficients_match_d_beta(rng, n, m):
    L = random_lagrangian(rng, n, m)
    alpha = build_alpha(L, n, m)
    assert all(alpha.f(j, (), s, ()).is_zero() for j in range(1, n + 1) for s in range(1, m + 1))
    assert alpha.euler_lagrange() == euler_lagrange(L, adapted(n, m), 1)
    assert forms.is_horizontal_for_K(alpha.form())
    assert vertical_contractions_vanish(alpha)


# ------------------------------------------------------------ conditions


def test_ls_condition_free_particle():
    report = check_LS(build_alpha(parse(FREE, first_order(1, 1)), 1, 1))
    assert report.passed


def test_ls_condition_random(rng):
    for n, m in ((1, 2), (2, 2)):
        assert check_LS(build_alpha(random_lagrangian(rng, n, m), n, m)).passed


def test_ls_violation_is_detected_and_matches_K():
    alpha = LagrangeSouriauForm(2, 2, {(1, (2,), 1, (2,)): Expr.const(1)}, {})
    checks = passed(check_LS(alpha))
    assert checks["ls-antisymmetrized-coefficients-vanish"] is False
    assert checks["ls-agrees-with-K"] is True


def test_single_index_asymmetry_is_invisible():
    """With one base direction the index antisymmetrizer kills every level
    above zero, so a fibre asymmetry alone cannot violate the condition."""
    alpha = LagrangeSouriauForm(1, 2, {(1, (1,), 1, (2,)): Expr.const(1)}, {})
    assert check_LS(alpha).passed


def test_closedness_free_particle():
    report = check_closedness(build_alpha(parse(FREE, first_order(1, 1)), 1, 1))
    assert report.passed, report.failures()


@pytest.mark.parametrize("n,m", [(1, 2), (2, 2)])
def test_closedness_random(rng, n, m):
    report = check_closedness(build_alpha(random_lagrangian(rng, n, m), n, m))
    assert report.passed, report.failures()
    assert {"closedness-source-curl", "closedness-coefficient-exchange",
            "helmholtz-second-order-symmetric"} <= set(passed(report))


def test_recurrences_free_particle():
    report = check_recurrences(build_alpha(parse(FREE, first_order(1, 1)), 1, 1))
    assert report.passed
    assert report.values["F-recurrence constant"] == "undetermined"


def test_recurrences_single_fibre(rng):
    alpha = build_alpha(random_lagrangian(rng, 2, 1), 2, 1)
    report = check_recurrences(alpha)
    assert report.passed
    assert all(v.is_zero() for (i0, I, s0, S), v in alpha.F.items() if len(I) == 2)
    assert report.values["F-recurrence constant"] == "k=2: undetermined"


@pytest.mark.parametrize("text", ["y1_1^2*y2_2^2 + y1_2*y2_1*y1_1 + x1*y2",
                                  "y1_1*y2_2*y1_2 + x2*y2_1^2*y1_2"])
def test_f_recurrence_constant_is_four_thirds(text):
    report = check_recurrences(build_alpha(parse(text, first_order(2, 2)), 2, 2))
    assert report.passed, report.failures()
    assert report.values["F-recurrence constant"] == "k=2: 4/3"


def test_f_recurrence_constants_at_three_levels():
    L = parse("y1_1*y2_2*y3_3 + y1_2*y2_3*y3_1*y1_1", first_order(3, 3))
    report = check_recurrences(build_alpha(L, 3, 3, verify=False))
    assert report.passed, report.failures()
    assert report.values["F-recurrence constant"] == "k=2: 4/3, k=3: 9/8"


def test_f_recurrence_constant_undetermined_for_null_lagrangian():
    L = parse("y1_1*y2_2 - y1_2*y2_1", first_order(2, 2))
    report = check_recurrences(build_alpha(L, 2, 2))
    assert report.passed
    assert report.values["F-recurrence constant"] == "k=2: undetermined"


def test_alpha_vanishes_with_euler_lagrange():
    chart = first_order(1, 1)
    L = total_derivative(parse("x1*y1^2", chart), 1)
    alpha = build_alpha(L, 1, 1)
    assert alpha.is_zero() and all(e.is_zero() for e in alpha.euler_lagrange())
    assert passed(check_recurrences(alpha))["alpha-vanishes-iff-euler-lagrange-vanishes"]


# ----------------------------------------------------------------- sigma


def test_free_particle_sigma():
    sigma = extract_sigma(build_alpha(parse(FREE, first_order(1, 1)), 1, 1))
    assert sigma.G[((), (1,))].is_zero()
    expected = forms.wedge(forms.dy(1, (1,), 1, 1, 1), forms.omega(1, (), 1, 1, 1))
    assert sigma.form() == expected


@pytest.mark.parametrize("n,m", [(1, 2), (2, 1), (2, 2)])
def test_sigma_is_first_order_and_pulls_back(rng, n, m):
    alpha = build_alpha(random_lagrangian(rng, n, m), n, m)
    sigma = extract_sigma(alpha)
    assert forms.lift(sigma.form(), 2) == alpha.form()


def test_sigma_rejects_second_order_remainder():
    bogus = LagrangeSouriauForm(1, 1, {}, {((), (1,)): y(1, (1, 1))})
    with pytest.raises(SouriauError):
        extract_sigma(bogus)


# ---------------------------------------------------------------- curves


def test_curve_residuals_free_particle():
    t = param("t")
    alpha = build_alpha(parse(FREE, first_order(1, 1)), 1, 1)
    line = solve_el_on_curve(alpha, [t, 3 * t + 5])
    assert line.vanishes and line.consistent
    parabola = solve_el_on_curve(alpha, [t, t ** 2])
    assert parabola.residual == [Expr.const(-2)]
    assert parabola.euler_lagrange == [Expr.const(-2)]
    s = t + t ** 3
    reparam = solve_el_on_curve(alpha, [s, 3 * s + 5])
    assert reparam.vanishes and reparam.consistent


def test_curve_residual_tracks_euler_lagrange_for_potential():
    t = param("t")
    alpha = build_alpha(parse("y1_1^2/2 - y1^2/2", first_order(1, 1)), 1, 1)
    res = solve_el_on_curve(alpha, [t, t ** 3])
    assert not res.vanishes and res.consistent


# ------------------------------------------------------------------ report


def test_report_values_for_free_particle():
    t = param("t")
    report = souriau_report(parse(FREE, first_order(1, 1)), 1, 1, [(t, t ** 2)])
    assert report.passed, report.failures()
    assert report.values["E"] == "-y1_11"
    assert report.values["residual (t, t^2)"] == "-2"
