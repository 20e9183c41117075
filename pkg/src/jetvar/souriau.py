"""Second-order Lagrangian systems on Grassmann charts: the Poincaré-Cartan
form of a first-order Lagrangian, its Lagrange-Souriau form, and the local
conditions and recurrences the coefficients satisfy.

Coefficient tables are keyed by ordered index tuples:

* ``PoincareCartanForm.coefficients[(I, S)]`` is L^{I}_{S} with |I| = |S| = k;
* ``LagrangeSouriauForm.F[(i0, I, s0, S)]`` is F^{i0,I}_{s0,S};
* ``LagrangeSouriauForm.E[(I, S)]`` is E^{I}_{S} with |S| = |I| + 1.

Volume pieces use theta_{i1..ik} = C(n, k) eps_{i1..in} dx^{i_{k+1}} ∧ ... ∧ dx^{i_n}
with the free indices summed, so theta_{} = n! dx^1 ∧ ... ∧ dx^n.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import comb, factorial
from typing import Callable, Iterator, Mapping, Sequence

from . import forms
from .forms import Form
from .multiindex import MultiIndex, antisymmetric_sign, indices, symmetrize
from .report import Report, Tally
from .symexpr import Expr, as_expr, atom, jet_order, total_derivative, weighted_partial
from .symexpr.core import ONE, ZERO
from .variational import adapted, euler_lagrange, helmholtz


class SouriauError(RuntimeError):
    """An internal consistency check between two constructions failed."""


Tup = tuple[int, ...]


def _tuples(limit: int, k: int) -> Iterator[Tup]:
    return product(range(1, limit + 1), repeat=k)


def _partial(f, s: int, idx: Tup, n: int) -> Expr:
    return weighted_partial(f, "y", s, MultiIndex(tuple(idx), n))


def _double_antisymmetrize(fn: Callable[[Tup, Tup], Expr], I: Tup, S: Tup) -> Expr:
    """S-_I S-_S fn, both projections normalized by 1/k!."""
    inner = lambda Ip: as_expr(symmetrize(len(S), -1, lambda Sq: fn(Ip, Sq))(S))
    return as_expr(symmetrize(len(I), -1, inner)(I))


def theta(I: Sequence[int], n: int, m: int, r: int) -> Form:
    """theta_{i1..ik} on the order-r chart."""
    I = tuple(I)
    k = len(I)
    out = forms.chart_form(n, m, r)
    for rest in _tuples(n, n - k):
        sign = antisymmetric_sign(I + rest)
        if sign:
            term = forms.function(comb(n, k) * sign, n, m, r)
            for i in rest:
                term = forms.wedge(term, forms.dx(i, n, m, r))
            out = out + term
    return out


def _omegas(S: Sequence[int], n: int, m: int, r: int) -> Form:
    out = forms.function(ONE, n, m, r)
    for s in S:
        out = forms.wedge(out, forms.omega(s, (), n, m, r))
    return out


# ------------------------------------------------------------------- beta


@dataclass(frozen=True)
class PoincareCartanForm:
    n: int
    m: int
    lagrangian: Expr
    coefficients: Mapping[tuple[Tup, Tup], Expr] = field(repr=False)

    def __getitem__(self, key: tuple[Tup, Tup]) -> Expr:
        return self.coefficients.get(key, ZERO)

    def form(self, r: int = 1) -> Form:
        """beta = sum_k 1/k! L^{I}_{S} w^{s1} ∧ ... ∧ w^{sk} ∧ theta_I."""
        n, m = self.n, self.m
        out = forms.chart_form(n, m, r)
        for (I, S), c in self.coefficients.items():
            if c.is_zero():
                continue
            term = forms.wedge(_omegas(S, n, m, r), theta(I, n, m, r))
            out = out + term * (c * Fraction(1, factorial(len(I))))
        return out


def _require_first_order(L) -> Expr:
    L = as_expr(L)
    if jet_order(L) > 1:
        raise ValueError(f"needs a first-order Lagrangian, got order {jet_order(L)}")
    return L


def build_beta(L, n: int, m: int) -> PoincareCartanForm:
    """Coefficients L^{I}_{S} = S-_I S-_S d^{i1}_{s1} ... d^{ik}_{sk} L, k = 0..n."""
    L = _require_first_order(L)

    @lru_cache(maxsize=None)
    def raw(I: Tup, S: Tup) -> Expr:
        if not I:
            return L
        return _partial(raw(I[1:], S[1:]), S[0], (I[0],), n)

    coeffs = {}
    for k in range(n + 1):
        for I in _tuples(n, k):
            for S in _tuples(m, k):
                coeffs[(I, S)] = _double_antisymmetrize(raw, I, S)
    return PoincareCartanForm(n, m, L, coeffs)


# ------------------------------------------------------------------ alpha


@dataclass(frozen=True)
class LagrangeSouriauForm:
    n: int
    m: int
    F: Mapping[tuple[int, Tup, int, Tup], Expr] = field(repr=False)
    E: Mapping[tuple[Tup, Tup], Expr] = field(repr=False)

    def f(self, i0: int, I: Sequence[int], s0: int, S: Sequence[int]) -> Expr:
        return self.F.get((i0, tuple(I), s0, tuple(S)), ZERO)

    def e(self, I: Sequence[int], S: Sequence[int]) -> Expr:
        return self.E.get((tuple(I), tuple(S)), ZERO)

    def euler_lagrange(self) -> list[Expr]:
        return [self.e((), (s,)) for s in range(1, self.m + 1)]

    def is_zero(self) -> bool:
        return all(v.is_zero() for v in self.F.values()) and all(v.is_zero() for v in self.E.values())

    def form(self) -> Form:
        """sum_k 1/k! F w^{s0}_{i0} ∧ w^S ∧ theta_I + sum_k 1/(k+1)! E w^{s0} ∧ w^S ∧ theta_I."""
        n, m = self.n, self.m
        out = forms.chart_form(n, m, 2)
        for (i0, I, s0, S), c in self.F.items():
            if not c.is_zero():
                head = forms.wedge(forms.omega(s0, (i0,), n, m, 2), _omegas(S, n, m, 2))
                out = out + forms.wedge(head, theta(I, n, m, 2)) * (c * Fraction(1, factorial(len(I))))
        for (I, S), c in self.E.items():
            if not c.is_zero():
                term = forms.wedge(_omegas(S, n, m, 2), theta(I, n, m, 2))
                out = out + term * (c * Fraction(1, factorial(len(I) + 1)))
        return out


def alpha_from_beta(beta: PoincareCartanForm) -> Form:
    """d of beta pulled back to the second-order chart."""
    return forms.exterior_derivative(forms.lift(beta.form(1), 2))


def build_alpha(L, n: int, m: int, verify: bool = True) -> LagrangeSouriauForm:
    """F^{i0,I}_{s0,S} = d^{i0}_{s0} L^I_S - L^{i0 I}_{s0 S} and
    E^I_{s0..sk} = sum_l (-1)^l d_{s_l} L^I_{S without s_l} - d_{i0} L^{i0 I}_{s0..sk}.

    With ``verify`` the assembled form is compared with d(beta) and a
    mismatch raises SouriauError.
    """
    beta = build_beta(L, n, m)
    Lc = beta.__getitem__
    Fc, Ec = {}, {}
    for k in range(n + 1):
        for I in _tuples(n, k):
            for S in _tuples(m, k):
                for i0 in range(1, n + 1):
                    for s0 in range(1, m + 1):
                        Fc[(i0, I, s0, S)] = _partial(Lc((I, S)), s0, (i0,), n) - Lc(((i0,) + I, (s0,) + S))
            for S in _tuples(m, k + 1):
                val = ZERO
                for pos, s in enumerate(S):
                    rest = S[:pos] + S[pos + 1:]
                    val = val + _partial(Lc((I, rest)), s, (), n) * (-1) ** pos
                for i0 in range(1, n + 1):
                    val = val - total_derivative(Lc(((i0,) + I, S)), i0)
                Ec[(I, S)] = val
    alpha = LagrangeSouriauForm(n, m, Fc, Ec)
    if verify and alpha.form() != alpha_from_beta(beta):
        raise SouriauError("coefficient formulas disagree with d(beta)")
    return alpha


# ------------------------------------------------------------- conditions


def check_LS(alpha: LagrangeSouriauForm) -> Report:
    """S-S- F = 0 at every level (level 0 reads F^j_s = 0), against K alpha = 0."""
    n, m = alpha.n, alpha.m
    report = Report("lagrange-souriau condition")
    order_zero = Tally("ls-first-coefficient-vanishes")
    higher = Tally("ls-antisymmetrized-coefficients-vanish")
    holds = True
    for k in range(n + 1):
        for I in _tuples(n, k + 1):
            for S in _tuples(m, k + 1):
                val = _double_antisymmetrize(lambda Ip, Sq: alpha.f(Ip[0], Ip[1:], Sq[0], Sq[1:]), I, S)
                holds &= val.is_zero()
                (higher if k else order_zero).record(
                    val.is_zero(), lambda: f"I={I} S={S} value={val.render()}")
    order_zero.into(report)
    if n >= 1:
        higher.into(report)
    k_zero = forms.K_operator(alpha.form()).is_zero()
    report.add("ls-agrees-with-K", holds == k_zero, f"coefficients: {holds}, K alpha = 0: {k_zero}")
    return report


def check_closedness(alpha: LagrangeSouriauForm) -> Report:
    """d alpha = 0, the component identities it implies, and the Helmholtz
    conditions they give for the Euler-Lagrange expressions."""
    n, m = alpha.n, alpha.m
    R, M = range(1, n + 1), range(1, m + 1)
    d, f, e = total_derivative, alpha.f, alpha.e
    report = Report("closedness")
    report.add("closed", forms.exterior_derivative(alpha.form()).is_zero())

    def tally(name: str, residuals) -> None:
        t = Tally(name)
        for label, val in residuals:
            t.record(val.is_zero(), lambda: f"{label}: {val.render()}")
        t.into(report)

    def p(g, s, idx=()):
        return _partial(g, s, idx, n)

    tally("closedness-source-curl", (
        ((a, b), sum((d(e((j,), (a, b)), j) for j in R), ZERO) + p(e((), (b,)), a) - p(e((), (a,)), b))
        for a in M for b in M))
    tally("closedness-mixed-first-order", (
        ((j, v, s), sum((d(f(j, (l,), v, (s,)), l) for l in R), ZERO) - p(f(j, (), v, ()), s)
         + p(e((), (s,)), v, (j,)) + e((j,), (v, s)))
        for j in R for v in M for s in M))
    tally("closedness-second-order-source", (
        ((j, k, v, s), p(e((), (s,)), v, (j, k)) + (f(j, (k,), v, (s,)) + f(k, (j,), v, (s,))) * Fraction(1, 2))
        for j in R for k in R for v in M for s in M))
    tally("closedness-coefficient-exchange", (
        ((j, l, v, s), f(j, (l,), s, (v,)) - f(l, (j,), v, (s,)) - p(f(j, (), s, ()), v, (l,))
         + p(f(l, (), v, ()), s, (j,)))
        for j in R for l in R for v in M for s in M))

    E = alpha.euler_lagrange()
    tally("helmholtz-source-antisymmetric", (
        ((a, b), p(E[b - 1], a) - p(E[a - 1], b) - sum((d(p(E[b - 1], a, (j,)), j) for j in R), ZERO)
         + sum((d(d(p(E[b - 1], a, (j, l)), j), l) for j in R for l in R), ZERO))
        for a in M for b in M))
    tally("helmholtz-first-order-symmetric", (
        ((j, v, s), p(E[s - 1], v, (j,)) + p(E[v - 1], s, (j,))
         - sum((d(p(E[v - 1], s, (j, l)), l) for l in R), ZERO) * 2)
        for j in R for v in M for s in M))
    tally("helmholtz-second-order-symmetric", (
        ((j, k, v, s), p(E[s - 1], v, (j, k)) - p(E[v - 1], s, (j, k)))
        for j in R for k in R for v in M for s in M))
    report.add("helmholtz-expressions-vanish", helmholtz(E, adapted(n, m), 2).is_zero())
    return report


def e_recurrence_rhs(alpha: LagrangeSouriauForm, I: Tup, S: Tup) -> Expr:
    """-S-_I S-_S (d^{i1}_{s0} + d_l d^{l i1}_{s0}) E^{i2..ik}_{s1..sk}."""
    n = alpha.n

    def g(Ip: Tup, Sq: Tup) -> Expr:
        low = alpha.e(Ip[1:], Sq[1:])
        val = _partial(low, Sq[0], (Ip[0],), n)
        for l in range(1, n + 1):
            val = val + total_derivative(_partial(low, Sq[0], (l, Ip[0]), n), l)
        return val

    return -_double_antisymmetrize(g, I, S)


def f_recurrence_rhs(alpha: LagrangeSouriauForm, i0: int, I: Tup, s0: int, S: Tup) -> Expr:
    """S-_I S-_S d^{i1}_{s1} F^{i0, i2..ik}_{s0, s2..sk}, antisymmetrized over
    the undistinguished indices only."""
    return _double_antisymmetrize(
        lambda Ip, Sq: _partial(alpha.f(i0, Ip[1:], s0, Sq[1:]), Sq[0], (Ip[0],), alpha.n), I, S)


def check_recurrences(alpha: LagrangeSouriauForm) -> Report:
    """The E-recurrence for k = 1..n and the F-recurrence for k = 2..n, the
    latter with its constant solved per level."""
    n, m = alpha.n, alpha.m
    report = Report("recurrences")
    et = Tally("E-recurrence")
    for k in range(1, n + 1):
        for I in _tuples(n, k):
            for S in _tuples(m, k + 1):
                lhs, rhs = alpha.e(I, S), e_recurrence_rhs(alpha, I, S)
                et.record(lhs == rhs, lambda: f"I={I} S={S} lhs={lhs.render()} rhs={rhs.render()}")
    if et.count:
        et.into(report)
    else:
        report.add("E-recurrence", True, "no level k >= 1")

    constants = {}
    ft = Tally("F-recurrence")
    for k in range(2, n + 1):
        pairs = [((i0, I, s0, S), alpha.f(i0, I, s0, S), f_recurrence_rhs(alpha, i0, I, s0, S))
                 for i0 in range(1, n + 1) for I in _tuples(n, k)
                 for s0 in range(1, m + 1) for S in _tuples(m, k)]
        const = None
        for key, lhs, rhs in pairs:
            if not rhs.is_zero():
                ratio = lhs / rhs
                const = ratio.value() if ratio.is_constant() else None
                if const is None:
                    ft.record(False, f"level {k}: ratio {ratio.render()} at {key} is not constant")
                break
        constants[k] = const
        for key, lhs, rhs in pairs:
            expect = rhs * const if const is not None else ZERO
            ft.record(lhs == expect, lambda: f"level {k} at {key}: lhs={lhs.render()} rhs={rhs.render()} const={const}")
    if ft.count:
        ft.into(report)
    else:
        report.add("F-recurrence", True, "no level k >= 2")
    report.values["F-recurrence constant"] = ", ".join(
        f"k={k}: {c if c is not None else 'undetermined'}" for k, c in constants.items()) or "undetermined"
    EL = alpha.euler_lagrange()
    report.add("alpha-vanishes-iff-euler-lagrange-vanishes",
               alpha.is_zero() == all(v.is_zero() for v in EL))
    return report


def vertical_contractions_vanish(alpha: LagrangeSouriauForm) -> bool:
    """i_V1 i_V2 alpha = 0 for V1, V2 in the frame Delta^{jk}_s of the fibres over the first order."""
    n, m = alpha.n, alpha.m
    a = alpha.form()
    frame = [forms.delta_field(s, J.entries, n, m, 2)
             for s in range(1, m + 1) for J in indices(n, 2)]
    return all(forms.interior(V1, forms.interior(V2, a)).is_zero() for V1 in frame for V2 in frame)


# ------------------------------------------------------------------- sigma


@dataclass(frozen=True)
class SigmaForm:
    """The (n+1)-form on the first-order chart whose pullback is alpha."""

    n: int
    m: int
    F: Mapping[tuple[int, Tup, int, Tup], Expr] = field(repr=False)
    G: Mapping[tuple[Tup, Tup], Expr] = field(repr=False)

    def form(self) -> Form:
        n, m = self.n, self.m
        out = forms.chart_form(n, m, 1)
        for (i0, I, s0, S), c in self.F.items():
            if not c.is_zero():
                head = forms.wedge(forms.dy(s0, (i0,), n, m, 1), _omegas(S, n, m, 1))
                out = out + forms.wedge(head, theta(I, n, m, 1)) * (c * Fraction(1, factorial(len(I))))
        for (I, S), c in self.G.items():
            if not c.is_zero():
                term = forms.wedge(_omegas(S, n, m, 1), theta(I, n, m, 1))
                out = out + term * (c * Fraction(1, factorial(len(I) + 1)))
        return out


def extract_sigma(alpha: LagrangeSouriauForm) -> SigmaForm:
    """G^I_S = E^I_S + y^v_{jk} F^{j, k I}_{v, S}; raises SouriauError if some
    F or G still depends on second-order variables."""
    n, m = alpha.n, alpha.m
    for key, c in alpha.F.items():
        if jet_order(c) > 1:
            raise SouriauError(f"F{key} depends on second-order variables")
    G = {}
    for (I, S), c in alpha.E.items():
        g = c
        for j, k, v in product(range(1, n + 1), range(1, n + 1), range(1, m + 1)):
            fv = alpha.f(j, (k,) + I, v, S)
            if not fv.is_zero():
                g = g + Expr.of_atom(atom("y", v, tuple(sorted((j, k))))) * fv
        if jet_order(g) > 1:
            raise SouriauError(f"G{(I, S)} = {g.render()} depends on second-order variables")
        G[(I, S)] = g
    return SigmaForm(n, m, dict(alpha.F), G)


# ------------------------------------------------------------------ curves


@dataclass(frozen=True)
class CurveResidual:
    """Per-label coefficients of the contractions i_{Delta_s} alpha pulled back
    along the prolonged curve, and E_s along the same curve."""

    residual: list[Expr]
    euler_lagrange: list[Expr]

    @property
    def vanishes(self) -> bool:
        return all(r.is_zero() for r in self.residual)

    @property
    def consistent(self) -> bool:
        return self.vanishes == all(e.is_zero() for e in self.euler_lagrange)


def solve_el_on_curve(alpha: LagrangeSouriauForm, gamma: Sequence) -> CurveResidual:
    """Residual of the Euler-Lagrange condition along the immersion gamma(t).

    An (n+1)-form pulls back to zero on an n-dimensional parameter space, so
    the condition is read through the contractions of alpha with the
    vertical frame Delta_s; the contractions with D_i and Delta^j_s pull back
    to zero for every Lagrange-Souriau form.
    """
    n, m = alpha.n, alpha.m
    a = alpha.form()
    top = tuple(("dt", t, ()) for t in range(1, n + 1))
    residual = []
    for s in range(1, m + 1):
        pulled = forms.pullback_immersion(forms.interior(forms.delta_field(s, (), n, m, 2), a), gamma)
        residual.append(pulled.terms.get(top, ZERO))
    el = [forms.pullback_immersion(forms.function(e, n, m, 2), gamma).terms.get((), ZERO)
          for e in alpha.euler_lagrange()]
    return CurveResidual(residual, el)


# ------------------------------------------------------------------ suite


def souriau_report(L, n: int, m: int, curves: Sequence[Sequence] = ()) -> Report:
    """Every check on the Lagrange-Souriau form of L, plus curve residuals."""
    L = _require_first_order(L)
    report = Report("souriau")
    beta = build_beta(L, n, m)
    report.values["beta"] = beta.form(1).render()
    alpha = build_alpha(L, n, m, verify=False)
    a = alpha.form()
    report.values["alpha"] = a.render()
    report.values["E"] = ", ".join(e.render() for e in alpha.euler_lagrange())
    report.add("alpha-dual-construction", a == alpha_from_beta(beta))
    report.add("alpha-horizontal", forms.is_horizontal_for_K(a))
    report.add("alpha-vertical-contractions-vanish", vertical_contractions_vanish(alpha))
    report.add("euler-lagrange-coefficient", alpha.euler_lagrange() == euler_lagrange(L, adapted(n, m), 1))
    report.extend(check_LS(alpha))
    report.extend(check_closedness(alpha))
    report.extend(check_recurrences(alpha))
    try:
        sigma = extract_sigma(alpha)
    except SouriauError as exc:
        report.add("sigma-first-order", False, str(exc))
    else:
        report.add("sigma-first-order", True)
        report.add("sigma-pullback", forms.lift(sigma.form(), 2) == a)
    for gamma in curves:
        res = solve_el_on_curve(alpha, gamma)
        label = "(" + ", ".join(as_expr(g).render() for g in gamma) + ")"
        report.values[f"residual {label}"] = ", ".join(r.render() for r in res.residual)
        report.add(f"curve-residual-consistent {label}", res.consistent)
    return report
