"""Named identity suites, each producing a Report.  The CLI runs them by
name; every suite is deterministic for a given seed."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Callable

from .grassmann import invariants, reconstruct, transition, weyl_witness
from .jetgroup import GroupElement, VelocityJet, act, compose, inverse
from .multiindex import MultiIndex, indices_upto
from .report import Report, Tally
from .sampling import adapted_atoms, group_element, homogeneous_atoms, polynomial, regular_jet
from .souriau import souriau_report
from .symexpr import Expr, atom, jet_order, param, parse
from .variational import adapted, apply_operator, divergence_form, homogeneous, integrate_by_parts
from .variational.correspondence import helmholtz_correspondence_from_adapted, lagrangian_correspondence
from .variational.covariance import contact_covariance, equation_covariance, lagrangian_covariance, swap_map
from .variational.reduction import homogeneous_lagrangian


@dataclass(frozen=True)
class SuiteOptions:
    n: int = 1
    m: int = 1
    r: int = 2
    seed: int = 0
    samples: int = 20
    chart: str = "adapted"
    lagrangian: Expr | None = None
    equation: tuple[Expr, ...] = ()
    curves: tuple[tuple[Expr, ...], ...] = ()


# ------------------------------------------------------------ group axioms


Series = dict  # exponent tuple -> coefficient


def _series_mul(f: Series, g: Series, r: int) -> Series:
    out: Series = {}
    for ef, cf in f.items():
        df = sum(ef)
        for eg, cg in g.items():
            if df + sum(eg) <= r:
                e = tuple(p + q for p, q in zip(ef, eg))
                out[e] = out.get(e, 0) + cf * cg
    return {e: c for e, c in out.items() if c}


def _taylor_series(a: GroupElement) -> list[Series]:
    """Coefficients of t -> sum a^i_I t^I / I! for each component i."""
    out = []
    for i in range(1, a.n + 1):
        f: Series = {}
        for I in indices_upto(a.n, a.r, 1):
            mult = I.multiplicities()
            c = Fraction(a[(i, I)])
            for k in mult:
                c /= factorial(k)
            if c:
                f[mult] = c
        out.append(f)
    return out


def truncated_composition(a: GroupElement, b: GroupElement) -> GroupElement:
    """Jet of alpha∘beta by substituting truncated Taylor series: the t^I
    coefficient of alpha(beta(t)) times I!."""
    n, r = a.n, a.r
    alpha, beta = _taylor_series(a), _taylor_series(b)
    unit: Series = {(0,) * n: Fraction(1)}
    powers = []  # powers[j][k] = beta_j^k truncated
    for bj in beta:
        row = [unit]
        for _ in range(r):
            row.append(_series_mul(row[-1], bj, r))
        powers.append(row)
    coeffs = {}
    for i, f in enumerate(alpha, 1):
        comp: Series = {}
        for mono, c in f.items():
            term: Series = {(0,) * n: c}
            for j, k in enumerate(mono):
                if k:
                    term = _series_mul(term, powers[j][k], r)
            for e, v in term.items():
                comp[e] = comp.get(e, 0) + v
        for I in indices_upto(n, r, 1):
            v = comp.get(I.multiplicities(), 0)
            for k in I.multiplicities():
                v *= factorial(k)
            if v:
                coeffs[(i, I)] = v
    return GroupElement(n, r, coeffs)


def group_axioms(opts: SuiteOptions) -> Report:
    n, r = opts.n, opts.r
    rng = random.Random(opts.seed)
    e = GroupElement.identity(n, r)
    tallies = {k: Tally(k) for k in ("associativity", "identity", "inverse", "composition-oracle")}
    for _ in range(opts.samples):
        a, b, c = (group_element(rng, n, r) for _ in range(3))
        tallies["associativity"].record(compose(compose(a, b), c) == compose(a, compose(b, c)), "(ab)c != a(bc)")
        tallies["identity"].record(compose(a, e) == a and compose(e, a) == a, "ae or ea != a")
        ai = inverse(a)
        tallies["inverse"].record(compose(a, ai) == e and compose(ai, a) == e, "a a^-1 != e")
        tallies["composition-oracle"].record(compose(a, b) == truncated_composition(a, b),
                                             "compose disagrees with Taylor composition")
    report = Report(f"group axioms n={n} r={r}")
    for t in tallies.values():
        t.into(report)
    return report


# -------------------------------------------------------------- invariants


def graph_invariants(jet: VelocityJet) -> tuple[Fraction, Fraction]:
    """y_1, y_11 of a curve (n = 1, N = 2) from the derivatives of y(x) =
    x2(x1^-1(x)): y' = x2'/x1', y'' = (x2'' x1' - x2' x1'') / x1'^3."""
    one, two = MultiIndex((1,), 1), MultiIndex((1, 1), 1)
    x1, x11, y1, y11 = jet[(1, one)], jet[(1, two)], jet[(2, one)], jet[(2, two)]
    return Fraction(y1) / x1, Fraction(y11 * x1 - y1 * x11) / Fraction(x1) ** 3


def invariants_suite(opts: SuiteOptions) -> Report:
    n, m, r = opts.n, opts.m, opts.r
    rng = random.Random(opts.seed)
    inv, orbit, rec = Tally("invariance"), Tally("orbit-reconstruction"), Tally("reconstruct-from-invariants")
    for _ in range(opts.samples):
        x = regular_jet(rng, n + m, n, r)
        a = group_element(rng, n, r)
        moved = act(x, a)
        inv.record(invariants(moved) == invariants(x), "invariants changed under the action")
        w = weyl_witness(x, moved)
        orbit.record(w is not None and act(x, w) == moved, "no witness for an equal-invariant pair")
        rec.record(reconstruct(invariants(x), x.block()) == x, "reconstruction differs")
    report = Report(f"invariants n={n} m={m} r={r}")
    for t in (inv, orbit, rec):
        t.into(report)
    jet = VelocityJet.from_table(2, 1, 2, {(1, ()): 0, (1, (1,)): 2, (1, (1, 1)): 4,
                                         (2, ()): 0, (2, (1,)): 6, (2, (1, 1)): 10})
    pt = invariants(jet)
    got = (pt[(1, MultiIndex((1,), 1))], pt[(1, MultiIndex((1, 1), 1))])
    report.add("worked-instance", got == (3, Fraction(-1, 2)) and got == graph_invariants(jet),
               f"y_1 = {got[0]}, y_11 = {got[1]}")
    return report


# ------------------------------------------------------------ chart change


def chart_change(opts: SuiteOptions) -> Report:
    """The swap (x, y) -> (y, x) with n = m = 1."""
    F = swap_map()
    report = Report("chart change (swap)")
    tr = transition(F, 1, 1, 2)
    y1 = Expr.of_atom(atom("y", 1, (1,)))
    y11 = Expr.of_atom(atom("y", 1, (1, 1)))
    report.add("first-order-transition", tr.ybar[(1, MultiIndex((1,), 1))] == 1 / y1)
    report.add("second-order-transition", tr.ybar[(1, MultiIndex((1, 1), 1))] == -y11 / y1 ** 3)
    report.extend(contact_covariance(F, 1, 1, 2))
    L = opts.lagrangian if opts.lagrangian is not None and opts.chart == "adapted" else parse("y1_1^2/2")
    report.extend(lagrangian_covariance(L, F, 1, 1, samples=opts.samples, seed=opts.seed))
    T = list(opts.equation) or [parse("y1_11 + y1^3")]
    report.extend(equation_covariance(T, F, 1, 1))
    return report


# ------------------------------------------------------------------- ibp


def _random_operator(rng: random.Random, side, r: int, atoms) -> dict:
    return {(A, I): polynomial(rng, atoms, terms=2, degree=2)
            for A in range(1, side.labels + 1) for I in indices_upto(side.n, r)}


def integration_by_parts(opts: SuiteOptions) -> Report:
    """P(xi) = sum_I d_I(xi^A Q^I_A) for random P on both sides, and a
    perturbed Q never satisfies it."""
    rng = random.Random(opts.seed)
    n, m, r = opts.n, opts.m, opts.r
    report = Report(f"integration by parts n={n} m={m} r={r}")
    for side, atoms in ((adapted(n, m), adapted_atoms(n, m, r)),
                        (homogeneous(n, n + m), homogeneous_atoms(n + m, n, r))):
        holds, unique = Tally(f"ibp-{side.kind}"), Tally(f"ibp-uniqueness-{side.kind}")
        for _ in range(opts.samples):
            P = _random_operator(rng, side, r, atoms)
            Q = integrate_by_parts(P, side, r)
            lhs = apply_operator(P, side)
            holds.record(lhs == divergence_form(Q, side), "P(xi) differs from the divergence form")
            key = rng.choice(sorted(Q, key=lambda k: (k[0], k[1].entries)))
            bumped = dict(Q)
            bumped[key] = Q[key] + polynomial(rng, atoms, terms=1, degree=1) + 1
            unique.record(lhs != divergence_form(bumped, side), f"perturbing Q{key} kept the identity")
        holds.into(report)
        unique.into(report)
    return report


# -------------------------------------------------------- correspondences


def hom_correspondence(opts: SuiteOptions) -> Report:
    n, m = opts.n, opts.m
    if opts.lagrangian is None:
        Lh, n, m = parse("X2_1^2/X1_1"), 1, 1
    elif opts.chart == "homogeneous":
        Lh = opts.lagrangian
    else:
        Lh = homogeneous_lagrangian(opts.lagrangian, n, m, max(jet_order(opts.lagrangian), 1))
    return lagrangian_correspondence(Lh, n, m, samples=opts.samples, seed=opts.seed,
                                     immersions=min(opts.samples, 20))


def hs_correspondence(opts: SuiteOptions) -> Report:
    if opts.equation:
        equations, n, m = [list(opts.equation)], opts.n, opts.m
    else:
        equations, n, m = [[parse(t)] for t in ("y1_11", "y1_1", "y1_11 + y1^3")], 1, 1
    report = Report("helmholtz correspondence")
    for T in equations:
        sub = helmholtz_correspondence_from_adapted(T, n, m, samples=opts.samples, seed=opts.seed)
        label = ", ".join(t.render() for t in T)
        for c in sub.checks:
            report.add(f"{c.name} [{label}]", c.passed, c.detail)
    return report


def souriau(opts: SuiteOptions) -> Report:
    if opts.lagrangian is None:
        t = param("t")
        L, n, m = parse("y1_1^2/2"), 1, 1
        curves = [(t, 3 * t + 5), (t, t ** 2), (t + t ** 3, 3 * (t + t ** 3) + 5)]
    else:
        L, n, m, curves = opts.lagrangian, opts.n, opts.m, list(opts.curves)
    return souriau_report(L, n, m, curves)


SUITES: dict[str, Callable[[SuiteOptions], Report]] = {
    "group-axioms": group_axioms,
    "invariants": invariants_suite,
    "chart-change": chart_change,
    "ibp": integration_by_parts,
    "hom-correspondence": hom_correspondence,
    "hs-correspondence": hs_correspondence,
    "souriau": souriau,
}


def run_suite(name: str, opts: SuiteOptions) -> Report:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; available: {', '.join(SUITES)}")
    return SUITES[name](opts)
