"""Exterior forms on the adapted chart of order r, written in the contact
cobasis dx^i, w^s_J (|J| <= r-1), dy^s_I (|I| = r).

A wedge monomial is a strictly increasing tuple of covector keys.  Keys
are ``("dx", i, ())``, ``("w", s, J)``, ``("dy", s, I)`` on a chart and
``("dt", a, ())`` on a parameter space; they sort in that order, so
``dx^1∧...∧dx^n`` is the first monomial of its degree.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Iterable, Mapping, Sequence

from . import linalg
from .grassmann import TransitionData, invariants
from .jetgroup import prolong_immersion
from .multiindex import MultiIndex, antisymmetric_sign, indices, indices_upto, multiplicity_weight
from .symexpr import Expr, as_expr, jet_order, truncated_total_derivative
from .symexpr.calculus import plain_partial, substitute
from .symexpr.core import ONE, ZERO, Atom, atom

_RANK = {"dx": 0, "w": 1, "dy": 2, "dt": 3}


def _key(c: tuple) -> tuple:
    return (_RANK[c[0]], c[1], len(c[2]), c[2])


def _sort_monomial(covs: Sequence[tuple]) -> tuple[int, tuple]:
    """Sign and sorted tuple, or (0, ()) when a covector repeats."""
    keys = [_key(c) for c in covs]
    if len(set(keys)) != len(keys):
        return 0, ()
    order = sorted(range(len(covs)), key=lambda a: keys[a])
    return antisymmetric_sign(order), tuple(covs[o] for o in order)


@dataclass(frozen=True)
class Form:
    """A sum of Expr-weighted wedge monomials on a chart (n, m, r) or, when
    ``params`` > 0, on a parameter space of that dimension."""

    n: int
    m: int
    r: int
    terms: Mapping[tuple, Expr] = field(default_factory=dict, repr=False)
    params: int = 0

    def __post_init__(self) -> None:
        clean = {}
        for mono, c in self.terms.items():
            c = as_expr(c)
            if not c.is_zero():
                clean[mono] = c
        object.__setattr__(self, "terms", clean)

    # construction ----------------------------------------------------------
    def _like(self, terms: Mapping) -> "Form":
        return Form(self.n, self.m, self.r, terms, self.params)

    def zero(self) -> "Form":
        return self._like({})

    def scalar(self, f) -> "Form":
        return self._like({(): as_expr(f)})

    @property
    def space(self) -> tuple:
        return (self.n, self.m, self.r, self.params)

    @property
    def degree(self) -> int:
        degs = {len(k) for k in self.terms}
        return max(degs, default=0)

    def is_zero(self) -> bool:
        return not self.terms

    def component(self, *covs: tuple) -> Expr:
        sign, mono = _sort_monomial(covs)
        return self.terms.get(mono, ZERO) * sign if sign else ZERO

    def covectors(self) -> set:
        return {c for mono in self.terms for c in mono}

    # algebra ------------------------------------------------------------------
    def _check(self, other: "Form") -> None:
        if self.space != other.space:
            raise ValueError("forms live on different charts")

    def __add__(self, other: "Form") -> "Form":
        self._check(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, ZERO) + v
        return self._like(out)

    def __neg__(self) -> "Form":
        return self._like({k: -v for k, v in self.terms.items()})

    def __sub__(self, other: "Form") -> "Form":
        return self + (-other)

    def __mul__(self, f) -> "Form":
        f = as_expr(f)
        return self._like({k: v * f for k, v in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, Form):
            return NotImplemented
        return self.space == other.space and (self - other).is_zero()

    def __hash__(self) -> int:
        return hash(self.space)

    def map_coefficients(self, fn) -> "Form":
        return self._like({k: fn(v) for k, v in self.terms.items()})

    def render(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for mono in sorted(self.terms, key=lambda k: (len(k), [_key(c) for c in k])):
            body = "∧".join(_render_cov(c) for c in mono) or "1"
            parts.append(f"({self.terms[mono].render()})*{body}")
        return " + ".join(parts)

    __str__ = render


def _render_cov(c: tuple) -> str:
    kind, lab, idx = c
    suffix = "_" + "".join(map(str, idx)) if idx else ""
    return {"dx": f"dx{lab}", "w": f"w{lab}{suffix}", "dy": f"dy{lab}{suffix}", "dt": f"dt{lab}"}[kind]


# ------------------------------------------------------------- constructors


def chart_form(n: int, m: int, r: int, terms: Mapping | None = None) -> Form:
    return Form(n, m, r, terms or {})


def function(f, n: int, m: int, r: int) -> Form:
    return Form(n, m, r, {(): as_expr(f)})


def dx(i: int, n: int, m: int, r: int) -> Form:
    return Form(n, m, r, {(("dx", i, ()),): ONE})


def _idx(J) -> tuple:
    return J.entries if isinstance(J, MultiIndex) else tuple(sorted(J))


def omega(s: int, J, n: int, m: int, r: int) -> Form:
    """Contact form w^s_J = dy^s_J - y^s_{iJ} dx^i, |J| <= r - 1."""
    J = _idx(J)
    if len(J) > r - 1:
        raise ValueError(f"w^{s}_{J} needs |J| <= r - 1 = {r - 1}")
    return Form(n, m, r, {(("w", s, J),): ONE})


def dy(s: int, I, n: int, m: int, r: int) -> Form:
    """dy^s_I in the contact cobasis (any |I| <= r)."""
    I = _idx(I)
    if len(I) == r:
        return Form(n, m, r, {(("dy", s, I),): ONE})
    if len(I) > r:
        raise ValueError("dy beyond chart order")
    terms = {(("w", s, I),): ONE}
    for i in range(1, n + 1):
        terms[(("dx", i, ()),)] = Expr.of_atom(atom("y", s, tuple(sorted(I + (i,)))))
    return Form(n, m, r, terms)


def theta0(n: int, m: int, r: int) -> Form:
    return Form(n, m, r, {tuple(("dx", i, ()) for i in range(1, n + 1)): ONE})


def dt(a: int, dim: int) -> Form:
    return Form(dim, 0, 0, {(("dt", a, ()),): ONE}, params=dim)


def cobasis(n: int, m: int, r: int) -> list[tuple]:
    covs = [("dx", i, ()) for i in range(1, n + 1)]
    for s in range(1, m + 1):
        for J in indices_upto(n, r - 1):
            covs.append(("w", s, J.entries))
    for s in range(1, m + 1):
        for I in indices(n, r):
            covs.append(("dy", s, I.entries))
    return covs


# ------------------------------------------------------------- operations


def wedge(a: Form, b: Form) -> Form:
    a._check(b)
    out: dict = {}
    for ka, va in a.terms.items():
        for kb, vb in b.terms.items():
            sign, mono = _sort_monomial(ka + kb)
            if sign:
                out[mono] = out.get(mono, ZERO) + va * vb * sign
    return a._like(out)


def wedge_all(forms: Iterable[Form]) -> Form:
    forms = list(forms)
    out = forms[0]
    for f in forms[1:]:
        out = wedge(out, f)
    return out


def differential(f, n: int, m: int, r: int) -> Form:
    """df = (D_i f) dx^i + (∂f/∂y_J) w_J + (∂f/∂y_I) dy_I in the order-r cobasis."""
    f = as_expr(f)
    if jet_order(f) > r:
        raise ValueError(f"coefficient of order {jet_order(f)} on an order-{r} chart")
    terms: dict = {}
    for i in range(1, n + 1):
        terms[(("dx", i, ()),)] = truncated_total_derivative(f, i, r)
    for a in _leaf_atoms(f):
        if a.kind == "y":
            kind = "dy" if len(a.index) == r else "w"
            terms[((kind, a.label, a.index),)] = plain_partial(f, a)
        elif a.kind == "x" and a.index:
            raise ValueError("adapted-chart forms cannot carry mixed-chart variables")
        elif a.kind not in ("x", "y", "p"):
            raise ValueError(f"unexpected variable {a} in a form coefficient")
    return Form(n, m, r, terms)


def _leaf_atoms(f: Expr) -> set[Atom]:
    out = set()
    for a in f.atoms():
        if a.kind == "f":
            out |= _leaf_atoms(a.arg)
        else:
            out.add(a)
    return out


def _d_covector(c: tuple, n: int, m: int, r: int) -> Form:
    kind, s, J = c
    if kind != "w":
        return Form(n, m, r, {})
    # d w_J = -w_{Ji} ∧ dx^i, with dy_{Ji} in place of w_{Ji} at top order
    terms = {}
    for i in range(1, n + 1):
        Ji = tuple(sorted(J + (i,)))
        k2 = "dy" if len(Ji) == r else "w"
        sign, mono = _sort_monomial([(k2, s, Ji), ("dx", i, ())])
        terms[mono] = Expr.const(-sign)
    return Form(n, m, r, terms)


def exterior_derivative(alpha: Form) -> Form:
    if alpha.params:
        return _param_derivative(alpha)
    n, m, r = alpha.n, alpha.m, alpha.r
    out = alpha.zero()
    for mono, c in alpha.terms.items():
        rest = Form(n, m, r, {mono: ONE})
        out = out + wedge(differential(c, n, m, r), rest)
        for pos, cov in enumerate(mono):
            dc = _d_covector(cov, n, m, r)
            if dc.is_zero():
                continue
            left = Form(n, m, r, {mono[:pos]: c})
            right = Form(n, m, r, {mono[pos + 1:]: ONE})
            term = wedge(wedge(left, dc), right)
            out = out + (term if pos % 2 == 0 else -term)
    return out


def _param_derivative(alpha: Form) -> Form:
    out = alpha.zero()
    for mono, c in alpha.terms.items():
        for a in range(1, alpha.params + 1):
            dc = plain_partial(c, _param_atom(a, alpha.params))
            if dc.is_zero():
                continue
            out = out + wedge(alpha._like({(("dt", a, ()),): dc}), alpha._like({mono: ONE}))
    return out


def _param_atom(a: int, dim: int) -> Atom:
    return atom("p", "t" if dim == 1 else f"t{a}")


# ------------------------------------------------------------- tangent fields


@dataclass(frozen=True)
class TangentField:
    """Coefficients over the frame D_i (key ("D", i, ())) and the weighted
    Delta^J_s (key ("Delta", s, J)), dual to the contact cobasis."""

    n: int
    m: int
    r: int
    coeffs: Mapping[tuple, Expr] = field(repr=False)

    def pairing(self, cov: tuple) -> Expr:
        kind, lab, idx = cov
        if kind == "dx":
            return as_expr(self.coeffs.get(("D", lab, ()), ZERO))
        if kind in ("w", "dy"):
            c = self.coeffs.get(("Delta", lab, idx))
            if c is None:
                return ZERO
            return as_expr(c) * multiplicity_weight(MultiIndex(idx, self.n))
        return ZERO


def total_field(i: int, n: int, m: int, r: int) -> TangentField:
    return TangentField(n, m, r, {("D", i, ()): ONE})


def delta_field(s: int, J, n: int, m: int, r: int) -> TangentField:
    return TangentField(n, m, r, {("Delta", s, _idx(J)): ONE})


def interior(V: TangentField, alpha: Form) -> Form:
    out: dict = {}
    for mono, c in alpha.terms.items():
        for pos, cov in enumerate(mono):
            p = V.pairing(cov)
            if p.is_zero():
                continue
            rest = mono[:pos] + mono[pos + 1:]
            val = c * p
            out[rest] = out.get(rest, ZERO) + (val if pos % 2 == 0 else -val)
    return alpha._like(out)


def is_horizontal_for_K(alpha: Form) -> bool:
    return not any(c[0] == "dy" for c in alpha.covectors())


def K_operator(alpha: Form) -> Form:
    """K alpha = i_{D_{j1}} i_{Delta^{j1..j_{r-1}}_s} (w^s_{j2..j_{r-1}} ∧ alpha), summed
    over ordered index tuples."""
    n, m, r = alpha.n, alpha.m, alpha.r
    if r < 2:
        raise ValueError("K is defined for r >= 2")
    if not is_horizontal_for_K(alpha):
        raise ValueError("K needs a form without top-order dy components")
    out = alpha.zero()
    for js in product(range(1, n + 1), repeat=r - 1):
        for s in range(1, m + 1):
            w = omega(s, js[1:], n, m, r)
            inner = interior(delta_field(s, js, n, m, r), wedge(w, alpha))
            out = out + interior(total_field(js[0], n, m, r), inner)
    return out


# ----------------------------------------------------------- contact forms


@dataclass(frozen=True)
class ContactDecomposition:
    """alpha = with_omega + sum_{s,I} d(w^s_I) ∧ psi[(s, I)] (|I| = r - 1)."""

    with_omega: Form
    psi: Mapping[tuple, Form]


def is_contact(alpha: Form) -> tuple[bool, ContactDecomposition | None]:
    """Decide membership in the contact ideal, returning a decomposition."""
    n, m, r = alpha.n, alpha.m, alpha.r
    with_w = {k: v for k, v in alpha.terms.items() if any(c[0] == "w" for c in k)}
    rest = {k: v for k, v in alpha.terms.items() if k not in with_w}
    w_part = alpha._like(with_w)
    if not rest:
        return True, ContactDecomposition(w_part, {})
    q = alpha.degree
    if q < 2 or any(all(c[0] == "dx" for c in k) for k in rest):
        return False, None
    # rest must be a combination of eta^s_I ∧ mu with eta = sum_i dy_{Ii} ∧ dx^i
    # and mu a monomial in dx, dy of degree q - 2
    free = [("dx", i, ()) for i in range(1, n + 1)] + \
        [("dy", s, I.entries) for s in range(1, m + 1) for I in indices(n, r)]
    gens = []
    for s in range(1, m + 1):
        for I in indices(n, r - 1):
            eta = -_d_covector(("w", s, I.entries), n, m, r)
            for mu in combinations(free, q - 2):
                prod_ = wedge(eta, alpha._like({mu: ONE}))
                if not prod_.is_zero():
                    gens.append(((s, I.entries), mu, prod_))
    monos = sorted({k for _, _, g in gens for k in g.terms} | set(rest),
                   key=lambda k: [_key(c) for c in k])
    A = [[g.terms.get(k, ZERO) for _, _, g in gens] for k in monos]
    b = [rest.get(k, ZERO) for k in monos]
    sol = linalg.solve(A, b)
    if sol is None:
        return False, None
    psi: dict = {}
    for (key, mu, _), c in zip(gens, sol):
        if as_expr(c).is_zero():
            continue
        # eta ∧ mu = -d(w) ∧ mu
        psi[key] = psi.get(key, alpha.zero()) + alpha._like({mu: -as_expr(c)})
    return True, ContactDecomposition(w_part, psi)


def lift(alpha: Form, r_new: int) -> Form:
    """Pull a form back from order r to order r_new >= r."""
    if r_new < alpha.r:
        raise ValueError("can only lift to a higher order")
    n, m = alpha.n, alpha.m
    out = Form(n, m, r_new, {})
    for mono, c in alpha.terms.items():
        factors = []
        for kind, s, idx in mono:
            if kind == "dx":
                factors.append(dx(s, n, m, r_new))
            elif kind == "w":
                factors.append(omega(s, idx, n, m, r_new))
            else:
                factors.append(dy(s, idx, n, m, r_new))
        term = wedge_all(factors) if factors else Form(n, m, r_new, {(): ONE})
        out = out + term * c
    return out


# ------------------------------------------------------------------ pullback


def pullback_immersion(alpha: Form, gamma: Sequence, params: Sequence[Expr] | None = None) -> Form:
    """Pull a chart form back along the prolonged immersion gamma(t)."""
    n, r = alpha.n, alpha.r
    gamma = [as_expr(g) for g in gamma]
    if params is None:
        params = [Expr.of_atom(_param_atom(a, n)) for a in range(1, n + 1)]
    patoms = [p.atoms()[0] for p in params]
    jet = prolong_immersion(gamma, r, params=params)
    pt = invariants(jet, verify=False)
    sub: dict = {atom("x", i): gamma[i - 1] for i in range(1, n + 1)}
    for (s, I), v in pt.items():
        sub[atom("y", s, I.entries)] = v

    def dt_of(f: Expr) -> Form:
        return Form(n, 0, 0, {(("dt", a, ()),): plain_partial(f, patoms[a - 1])
                              for a in range(1, n + 1)}, params=n)

    images: dict = {}

    def image(cov: tuple) -> Form:
        if cov not in images:
            kind, s, idx = cov
            if kind == "dx":
                images[cov] = dt_of(gamma[s - 1])
            elif kind == "dy":
                images[cov] = dt_of(sub[atom("y", s, idx)])
            else:
                f = dt_of(sub[atom("y", s, idx)])
                for i in range(1, n + 1):
                    f = f - dt_of(gamma[i - 1]) * sub[atom("y", s, tuple(sorted(idx + (i,))))]
                images[cov] = f
        return images[cov]

    out = Form(n, 0, 0, {}, params=n)
    for mono, c in alpha.terms.items():
        term = Form(n, 0, 0, {(): substitute(c, sub)}, params=n)
        for cov in mono:
            term = wedge(term, image(cov))
        out = out + term
    return out


# -------------------------------------------------------------- chart change


def barred_contact_form(tr: TransitionData, s: int, I, r: int) -> Form:
    """wbar^s_I = d(ybar^s_I) - ybar^s_{jI} d(xbar^j) in the unbarred order-r cobasis."""
    n, m = tr.n, tr.m
    I = _idx(I)
    out = differential(tr.ybar[(s, MultiIndex(I, n))], n, m, r)
    for j in range(1, n + 1):
        out = out - differential(tr.F[j - 1], n, m, r) * tr.ybar[(s, MultiIndex(I + (j,), n))]
    return out


def contact_transformation_law(tr: TransitionData, s: int, I, r: int) -> Form:
    """sum_{|J| <= |I|} (Delta^J_v ybar^s_I) w^v_J - ybar^s_{jI} (Delta_v xbar^j) w^v."""
    n, m = tr.n, tr.m
    I = MultiIndex(_idx(I), n)
    target = tr.ybar[(s, I)]
    out = Form(n, m, r, {})
    for v in range(1, m + 1):
        for J in indices_upto(n, I.degree):
            c = plain_partial(target, atom("y", v, J.entries))
            if not c.is_zero():
                out = out + omega(v, J, n, m, r) * c
        for j in range(1, n + 1):
            c = tr.ybar[(s, I.add(j))] * plain_partial(tr.F[j - 1], atom("y", v))
            if not c.is_zero():
                out = out - omega(v, (), n, m, r) * c
    return out


def chart_pullback(alpha_bar: Form, tr: TransitionData) -> Form:
    """Express a form written in the barred chart in the unbarred cobasis."""
    n, m, r = alpha_bar.n, alpha_bar.m, alpha_bar.r
    if tr.r < r:
        raise ValueError("transition order is below the form's chart order")
    images: dict = {}

    def image(cov: tuple) -> Form:
        if cov not in images:
            kind, s, idx = cov
            if kind == "dx":
                images[cov] = differential(tr.F[s - 1], n, m, r)
            elif kind == "w":
                images[cov] = barred_contact_form(tr, s, idx, r)
            else:
                images[cov] = differential(tr.ybar[(s, MultiIndex(idx, n))], n, m, r)
        return images[cov]

    out = Form(n, m, r, {})
    for mono, c in alpha_bar.terms.items():
        term = Form(n, m, r, {(): tr.pullback(c)})
        for cov in mono:
            term = wedge(term, image(cov))
        out = out + term
    return out
