"""Chart-change behaviour of Lagrangians, Euler-Lagrange and
Helmholtz-Sonin expressions, and contact forms."""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Sequence

from .. import forms
from ..grassmann import TransitionData, block_det, compose_with_projection, transition
from ..jetgroup import apply_chart_map, prolong_chart_map
from ..multiindex import MultiIndex, indices_upto
from ..report import Report, Tally
from ..sampling import regular_jet
from ..symexpr import Evaluator, Expr, X, as_expr, atom, jet_order, plain_partial, substitute
from ..symexpr.core import ZERO
from .operators import adapted, euler_lagrange, helmholtz, homogeneous
from .reduction import reduce


def swap_map() -> list[Expr]:
    """xbar = y, ybar = x on a chart with n = m = 1."""
    return [Expr.of_atom(atom("y", 1)), Expr.of_atom(atom("x", 1))]


def homogeneous_map(F: Sequence, n: int) -> list[Expr]:
    """The base map F(x, y) rewritten on homogeneous coordinates X^A."""
    sub = {atom("x", i): X(i) for i in range(1, n + 1)}
    m = len(F) - n
    sub.update({atom("y", s): X(n + s) for s in range(1, m + 1)})
    return [substitute(as_expr(f), sub) for f in F]


def _weighted(f, s: int, I: MultiIndex) -> Expr:
    from ..symexpr import weighted_partial

    return weighted_partial(f, "y", s, I)


def _contact_dot(tr: TransitionData, s: int, vec: Sequence[Expr]) -> Expr:
    """J * sum_v P^v_s vec_v."""
    return tr.J * sum((tr.contact[v][s - 1] * vec[v] for v in range(tr.m)), ZERO)


def lagrangian_covariance(Lbar, F: Sequence, n: int, m: int, r: int | None = None,
                          samples: int = 20, seed: int = 0) -> Report:
    """Transformation of L, its Euler-Lagrange expressions and those of the
    homogeneous Lagrangian under the chart change F."""
    Lbar = as_expr(Lbar)
    r = max(jet_order(Lbar), 1) if r is None else r
    s = 2 * r
    tr = transition(F, n, m, s)
    report = Report("lagrangian chart covariance")
    L = tr.J * tr.pullback(Lbar)
    report.values["L"] = L.render()

    # the homogeneous Lagrangian of Lbar, carried through the prolonged chart map
    Fh = homogeneous_map(F, n)
    Lh_bar = block_det(n) * compose_with_projection(Lbar, n, m, r)
    table_r = prolong_chart_map(Fh, n, r)
    Lh = apply_chart_map(table_r, Lh_bar)
    report.add("lagrangian-transforms-by-jacobian", reduce(Lh, n, m, r, check=False) == L,
               "reduction of the transported homogeneous Lagrangian equals J*Lbar")

    ad = adapted(n, m)
    E = euler_lagrange(L, ad, r)
    Ebar = [tr.pullback(e) for e in euler_lagrange(Lbar, ad, r)]
    ok = all(E[k - 1] == _contact_dot(tr, k, Ebar) for k in range(1, m + 1))
    report.add("euler-lagrange-covariance", ok, "E_s(L) = J P^v_s Ebar_v(Lbar)")

    hom = homogeneous(n, n + m)
    table_s = prolong_chart_map(Fh, n, s)
    Eh = euler_lagrange(Lh, hom, r)
    Eh_bar = [apply_chart_map(table_s, e) for e in euler_lagrange(Lh_bar, hom, r)]
    jac = [[plain_partial(Fh[B], atom("X", A)) for B in range(n + m)] for A in range(1, n + m + 1)]
    tally = Tally("homogeneous-euler-lagrange-transformation")
    rng = random.Random(seed)
    done = 0
    while done < samples:
        ev = Evaluator(regular_jet(rng, n + m, n, s).point())
        try:
            pairs = [(ev(Eh[A]), sum((ev(jac[A][B]) * ev(Eh_bar[B]) for B in range(n + m)), Fraction(0)))
                     for A in range(n + m)]
        except ZeroDivisionError:
            # the sample sits where the chart map is singular
            continue
        done += 1
        for A, (lhs, rhs) in enumerate(pairs, 1):
            tally.record(lhs == rhs, lambda: f"A={A} lhs={lhs} rhs={rhs}")
    tally.into(report)
    return report


def equation_covariance(Tbar: Sequence, F: Sequence, n: int, m: int, s: int | None = None) -> Report:
    """Helmholtz-Sonin expressions of T = J P Tbar against those of Tbar."""
    Tbar = [as_expr(t) for t in Tbar]
    s = max([jet_order(t) for t in Tbar] + [1]) if s is None else s
    tr = transition(F, n, m, 2 * s)
    pulled = [tr.pullback(t) for t in Tbar]
    T = [_contact_dot(tr, k, pulled) for k in range(1, m + 1)]
    H = helmholtz(T, adapted(n, m), s)
    Hbar = helmholtz(Tbar, adapted(n, m), s)
    Hb = {k: tr.pullback(v) for k, v in Hbar.components.items()}
    report = Report("equation chart covariance", values={"T": ", ".join(t.render() for t in T)})
    e = MultiIndex((), n)

    def contract(sig, nu, I, coeff):
        total = ZERO
        for a in range(1, m + 1):
            inner = ZERO
            for b in range(1, m + 1):
                for J in indices_upto(n, s, I.degree):
                    c = coeff(b, nu, J)
                    if not c.is_zero():
                        inner = inner + c * Hb[(a, b, J)]
            total = total + tr.contact[a - 1][sig - 1] * inner
        return tr.J * total

    def order_zero(b, nu, J):
        yb = tr.ybar[(b, J)]
        c = plain_partial(yb, atom("y", nu))
        for j in range(1, n + 1):
            c = c - tr.barred_total_derivative(yb, j) * plain_partial(tr.F[j - 1], atom("y", nu))
        return c

    ok0 = all(H[(a, b, e)] == contract(a, b, e, order_zero) for a in range(1, m + 1) for b in range(1, m + 1))
    report.add("helmholtz-covariance-order-zero", ok0)
    ok1 = True
    for I in indices_upto(n, s, 1):
        for a in range(1, m + 1):
            for b in range(1, m + 1):
                rhs = contract(a, b, I, lambda bb, nu, J, I=I: _weighted(tr.ybar[(bb, J)], nu, I))
                ok1 &= H[(a, b, I)] == rhs
    report.add("helmholtz-covariance-higher", ok1)
    return report


def contact_covariance(F: Sequence, n: int, m: int, r: int) -> Report:
    """Transformation laws of the contact forms and chart independence of
    K, horizontality and contact membership."""
    tr = transition(F, n, m, r)
    report = Report("contact form covariance")
    ok = all(forms.barred_contact_form(tr, s, I.entries, r) ==
             forms.contact_transformation_law(tr, s, I.entries, r)
             for s in range(1, m + 1) for I in indices_upto(n, r - 1))
    report.add("contact-transformation-law", ok)
    ok0 = all(forms.barred_contact_form(tr, s, (), r) ==
              sum((forms.omega(v, (), n, m, r) * tr.contact[s - 1][v - 1] for v in range(1, m + 1)),
                  forms.chart_form(n, m, r))
              for s in range(1, m + 1))
    report.add("contact-transformation-order-zero", ok0)
    if r == 2:
        ok2 = True
        for s in range(1, m + 1):
            for i in range(1, n + 1):
                rhs = forms.chart_form(n, m, r)
                ybar_i = tr.ybar[(s, MultiIndex((i,), n))]
                for v in range(1, m + 1):
                    for j in range(1, n + 1):
                        rhs = rhs + forms.omega(v, (j,), n, m, r) * (tr.contact[s - 1][v - 1] * tr.P[j - 1][i - 1])
                    c = plain_partial(ybar_i, atom("y", v))
                    for k in range(1, n + 1):
                        c = c - tr.barred_total_derivative(ybar_i, k) * plain_partial(tr.F[k - 1], atom("y", v))
                    rhs = rhs + forms.omega(v, (), n, m, r) * c
                ok2 &= forms.barred_contact_form(tr, s, (i,), r) == rhs
        report.add("contact-transformation-second-order", ok2)
    if r >= 2:
        sample = _sample_horizontal_form(n, m, r)
        pulled = forms.chart_pullback(sample, tr)
        report.add("horizontality-chart-independent", forms.is_horizontal_for_K(pulled))
        report.add("K-chart-covariance",
                   forms.chart_pullback(forms.K_operator(sample), tr) == forms.K_operator(pulled))
    rho_bar = forms.exterior_derivative(forms.omega(1, (1,) * (r - 1), n, m, r))
    rho_bar = rho_bar + forms.wedge(forms.omega(1, (), n, m, r), forms.dx(1, n, m, r)) * Expr.of_atom(atom("y", 1, (1,)))
    holds_bar, _ = forms.is_contact(rho_bar)
    holds, _ = forms.is_contact(forms.chart_pullback(rho_bar, tr))
    report.add("contact-pattern-chart-stable", holds_bar and holds)
    return report


def _sample_horizontal_form(n: int, m: int, r: int) -> forms.Form:
    y1 = Expr.of_atom(atom("y", 1, (1,)))
    y0 = Expr.of_atom(atom("y", 1))
    w0 = forms.omega(1, (), n, m, r)
    w1 = forms.omega(1, (1,) * (r - 1), n, m, r)
    top = forms.theta0(n, m, r)
    out = forms.wedge(w0, top) * (y0 * y1) + forms.wedge(w1, top) * y1
    if n == 1:
        out = out + forms.wedge(w1, w0) * (y1 + 1)
    return out
