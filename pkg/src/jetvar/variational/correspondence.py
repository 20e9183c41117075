"""Sampled comparisons between the homogeneous operators of a homogeneous
Lagrangian or equation and the adapted operators of its reduction.

Homogeneous sides are computed symbolically once and evaluated at random
regular jets; adapted sides are evaluated at the invariants of the same
jets, together with the numeric z = (x-block)^-1.
"""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import permutations
from math import comb, factorial
from typing import Iterator, Sequence

from ..grassmann import invariants, z_element
from ..jetgroup import act, prolong_immersion
from ..multiindex import MultiIndex, indices_upto, juxtapose, ordered_count, partition_blocks
from ..report import Report, Tally
from ..sampling import group_element, polynomial, regular_jet
from ..symexpr import Evaluator, as_expr, atom, jet_order
from .operators import adapted, helmholtz, homogeneous, lie_euler
from .reduction import hom_equation_reduce, homogeneous_equation, reduce


def symmetrized_z(z, js: Sequence[int], I: MultiIndex) -> Fraction:
    """S+ over (j_1..j_k) of the sum over k-block slot partitions of I of
    z^{j_1}_{I_1} ... z^{j_k}_{I_k}."""
    k = len(js)
    total = Fraction(0)
    for blocks in partition_blocks(I):
        if len(blocks) != k:
            continue
        for p in permutations(js):
            t = Fraction(1)
            for j, B in zip(p, blocks):
                t *= z[(j, B)]
            total += t
    return total / factorial(k)


def _samples(rng: random.Random, N: int, n: int, s: int, count: int) -> Iterator:
    for _ in range(count):
        jet = regular_jet(rng, N, n, s)
        yield jet, z_element(jet, verify=False), invariants(jet, verify=False)


def _fmt(lhs, rhs) -> str:
    return f"lhs={lhs} rhs={rhs}"


# --------------------------------------------------------------- Lagrangians


def lagrangian_correspondence(Lh, n: int, m: int, r: int | None = None, samples: int = 100,
                              seed: int = 0, immersions: int = 20) -> Report:
    """Euler-Lagrange and Lie-Euler expressions of Lh against those of its reduction."""
    Lh = as_expr(Lh)
    r = max(jet_order(Lh), 1) if r is None else r
    N, s = n + m, 2 * r
    L = reduce(Lh, n, m, r)
    hom, ad = homogeneous(n, N), adapted(n, m)
    ELh = {(A, J): lie_euler(Lh, A, J, hom, r) for A in range(1, N + 1) for J in indices_upto(n, r)}
    ELa = {(v, I): lie_euler(L, v, I, ad, r) for v in range(1, m + 1) for I in indices_upto(n, r)}
    report = Report("lagrangian correspondence", values={"L": L.render()})
    names = {
        "fibre-euler-lagrange": Tally("fibre-euler-lagrange"),
        "fibre-lie-euler": Tally("fibre-lie-euler"),
        "base-euler-lagrange": Tally("base-euler-lagrange"),
        "base-lie-euler-first": Tally("base-lie-euler-first"),
        "base-lie-euler-higher": Tally("base-lie-euler-higher"),
    }
    scaling = Tally("euler-lagrange-det-scaling")
    rng = random.Random(seed)
    e = MultiIndex((), n)
    for jet, z, pt in _samples(rng, N, n, s, samples):
        hv = Evaluator(jet.point())
        av = Evaluator(pt.point())
        det = jet.block().det()
        E = {k: av(v) for k, v in ELa.items()}
        L0 = av(L)
        y1 = {(v, p): pt[(v, MultiIndex((p,), n))] for v in range(1, m + 1) for p in range(1, n + 1)}
        for (A, J), expr in ELh.items():
            lhs = hv(expr)
            k = J.degree
            if A > n:
                v = A - n
                if k == 0:
                    name, rhs = "fibre-euler-lagrange", det * E[(v, e)]
                else:
                    name = "fibre-lie-euler"
                    rhs = (-1) ** k * det * sum(
                        (ordered_count(I) * (-1) ** I.degree * symmetrized_z(z, J.entries, I) * E[(v, I)]
                         for I in indices_upto(n, r, k)), Fraction(0))
            else:
                p = A
                if k == 0:
                    name = "base-euler-lagrange"
                    rhs = -det * sum((y1[(v, p)] * E[(v, e)] for v in range(1, m + 1)), Fraction(0))
                elif k == 1:
                    name, j = "base-lie-euler-first", J.entries[0]
                    tail = sum((y1[(v, p)] * ordered_count(I) * (-1) ** I.degree * z[(j, I)] * E[(v, I)]
                                for v in range(1, m + 1) for I in indices_upto(n, r, 1)), Fraction(0))
                    rhs = det * (z[(j, MultiIndex((p,), n))] * L0 + tail)
                else:
                    name = "base-lie-euler-higher"
                    rhs = (-1) ** (k + 1) * det * sum(
                        (y1[(v, p)] * ordered_count(I) * (-1) ** I.degree * symmetrized_z(z, J.entries, I)
                         * E[(v, I)] for v in range(1, m + 1) for I in indices_upto(n, r, k)), Fraction(0))
            names[name].record(lhs == rhs, lambda: f"A={A} J={J.label()} " + _fmt(lhs, rhs))
        a = group_element(rng, n, s)
        moved = Evaluator(act(jet, a).point())
        da = a.det()
        for A in range(1, N + 1):
            lhs, rhs = moved(ELh[(A, e)]), da * hv(ELh[(A, e)])
            scaling.record(lhs == rhs, lambda: f"A={A} " + _fmt(lhs, rhs))
    for name, t in names.items():
        if name == "base-lie-euler-higher" and r < 2:
            continue
        t.into(report)
    scaling.into(report)
    _pullback_check(report, [ELh[(A, e)] for A in range(1, N + 1)], n, m, s, rng, immersions)
    hom_zero = all(ELh[(A, e)].is_zero() for A in range(1, N + 1))
    ad_zero = all(ELa[(v, e)].is_zero() for v in range(1, m + 1))
    report.add("euler-lagrange-vanishing-equivalence", hom_zero == ad_zero,
               f"homogeneous zero: {hom_zero}, adapted zero: {ad_zero}")
    return report


def _pullback_check(report: Report, comps, n: int, m: int, s: int, rng: random.Random, count: int) -> None:
    """sum_A T_A x^A_j vanishes along prolonged polynomial immersions."""
    tally = Tally("equation-pullback-vanishes")
    params = [atom("p", "t" if n == 1 else f"t{a}") for a in range(1, n + 1)]
    done = 0
    while done < count:
        gamma = [polynomial(rng, params, terms=3, degree=3) for _ in range(n + m)]
        t0 = [Fraction(rng.randint(-3, 3), rng.randint(1, 2)) for _ in range(n)]
        jet = prolong_immersion(gamma, s, t0)
        if abs(jet.block().det()) < Fraction(1, 4):
            continue
        done += 1
        ev = Evaluator(jet.point())
        for j in range(1, n + 1):
            val = sum((ev(c) * jet[(A, MultiIndex((j,), n))] for A, c in enumerate(comps, 1)), Fraction(0))
            tally.record(val == 0, lambda: f"gamma={[g.render() for g in gamma]} t0={t0} value={val}")
    tally.into(report)


# --------------------------------------------------------------- equations


def helmholtz_correspondence(Th, n: int, s: int | None = None, samples: int = 100, seed: int = 0,
                             max_k: int = 2) -> Report:
    """Helmholtz-Sonin expressions of a homogeneous equation against those of
    its reduction, for index degrees k <= max_k."""
    Th = [as_expr(t) for t in Th]
    N = len(Th)
    m = N - n
    s = max([jet_order(t) for t in Th] + [1]) if s is None else s
    T = hom_equation_reduce(Th, n, s)
    Hh = helmholtz(Th, homogeneous(n, N), s)
    Ha = helmholtz(T, adapted(n, m), s)
    report = Report("helmholtz correspondence", values={"T": ", ".join(t.render() for t in T)})
    tallies = {name: Tally(name) for name in (
        "helmholtz-fibre-fibre", "helmholtz-fibre-fibre-higher",
        "helmholtz-fibre-base", "helmholtz-fibre-base-higher",
        "helmholtz-base-fibre", "helmholtz-base-fibre-higher",
        "helmholtz-base-base", "helmholtz-base-base-higher")}
    rng = random.Random(seed)
    for jet, z, pt in _samples(rng, N, n, 2 * s, samples):
        hv = Evaluator(jet.point())
        av = Evaluator(pt.point())
        det = jet.block().det()
        H = {key: av(v) for key, v in Ha.components.items()}

        def h(a, b, I):
            return H.get((a, b, I), 0)

        def y(v, I):
            return pt[(v, I)]

        def fibre_fibre(a, b, J):
            k = J.degree
            if k == 0:
                return det * h(a, b, J)
            return det * sum((ordered_count(I) * symmetrized_z(z, J.entries, I) * h(a, b, I)
                              for I in indices_upto(n, s, k)), Fraction(0))

        def fibre_base(a, q, J):
            k = J.degree
            total = Fraction(0)
            for v in range(1, m + 1):
                for I0 in indices_upto(n, s):
                    if k == 0:
                        total += ordered_count(I0) * y(v, I0.add(q)) * h(a, v, I0)
                        continue
                    for I in indices_upto(n, s - I0.degree, k):
                        total += (ordered_count(I0) * ordered_count(I) * comb(I.degree + I0.degree, I.degree)
                                  * symmetrized_z(z, J.entries, I) * y(v, I0.add(q)) * h(a, v, juxtapose(I, I0)))
            return -det * total

        for (A, B, J), expr in Hh.components.items():
            if J.degree > max_k:
                continue
            lhs = hv(expr)
            suffix = "-higher" if J.degree else ""
            if A > n and B > n:
                name, rhs = "helmholtz-fibre-fibre", fibre_fibre(A - n, B - n, J)
            elif A > n:
                name, rhs = "helmholtz-fibre-base", fibre_base(A - n, B, J)
            elif B > n:
                name = "helmholtz-base-fibre"
                rhs = -sum((y(v, MultiIndex((A,), n)) * fibre_fibre(v, B - n, J) for v in range(1, m + 1)),
                           Fraction(0))
            else:
                name = "helmholtz-base-base"
                rhs = -sum((y(v, MultiIndex((A,), n)) * fibre_base(v, B, J) for v in range(1, m + 1)),
                           Fraction(0))
            tallies[name + suffix].record(lhs == rhs, lambda: f"A={A} B={B} J={J.label()} " + _fmt(lhs, rhs))
    for name, t in tallies.items():
        if name.endswith("-higher") and min(s, max_k) < 1:
            continue
        t.into(report)
    report.add("helmholtz-vanishing-equivalence", Hh.is_zero() == Ha.is_zero(),
               f"homogeneous zero: {Hh.is_zero()}, adapted zero: {Ha.is_zero()}")
    return report


def helmholtz_correspondence_from_adapted(T, n: int, m: int, s: int | None = None, **kw) -> Report:
    T = [as_expr(t) for t in T]
    s = max([jet_order(t) for t in T] + [1]) if s is None else s
    return helmholtz_correspondence(homogeneous_equation(T, n, m, s), n, s, **kw)
