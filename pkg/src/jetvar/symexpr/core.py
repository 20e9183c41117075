"""Atoms and the exact rational-function expression type.

An :class:`Expr` is a quotient ``numerator / prod(factor**exp)``.  The
numerator is an expanded polynomial; the denominator is kept factored into
normalized polynomials (single atoms are split off as their own factors).
Every arithmetic step cancels denominator factors that divide the
numerator, so for the denominators that occur in practice (powers of
determinants and of coordinates) the representation is canonical.  Zero
testing never depends on that: an expression is zero iff its numerator is.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key
from typing import Callable, Iterable, Mapping

from . import poly as P

# ---------------------------------------------------------------- atoms

KIND_RANK = {"x": 0, "X": 1, "y": 2, "xi": 3, "a": 4, "p": 5, "f": 6}


@dataclass(frozen=True, eq=False)
class Atom:
    """An indeterminate: jet variable, parameter or function application.

    kinds: ``x`` adapted/mixed base-side coordinate x^i_I, ``X`` homogeneous
    coordinate X^A_I, ``y`` fibre jet coordinate y^s_I, ``xi`` jet of a
    vector-field component, ``a`` jet-group coordinate, ``p`` named
    parameter, ``f`` registered function applied to ``arg``.
    """

    kind: str
    label: object
    index: tuple[int, ...] = ()
    arg: "Expr | None" = None
    uid: int = -1

    @property
    def order(self) -> int:
        return len(self.index)

    def sort_key(self) -> tuple:
        lab = self.label
        return (
            KIND_RANK[self.kind],
            lab if isinstance(lab, int) else 0,
            lab if isinstance(lab, str) else "",
            len(self.index),
            self.index,
            self.arg.render() if self.arg is not None else "",
        )

    def render(self) -> str:
        if self.kind == "p":
            return str(self.label)
        if self.kind == "f":
            return f"{self.label}({self.arg.render()})"
        head = f"{self.kind}{self.label}"
        if not self.index and self.kind in ("x", "X", "y"):
            return head
        if all(e <= 9 for e in self.index):
            return head + "_" + "".join(map(str, self.index))
        return head + "_[" + ",".join(map(str, self.index)) + "]"

    def __repr__(self) -> str:
        return self.render()

    def __hash__(self) -> int:
        return hash(self.uid)

    def __eq__(self, other) -> bool:
        return isinstance(other, Atom) and other.uid == self.uid

    def __lt__(self, other: "Atom") -> bool:
        return self.sort_key() < other.sort_key()


_ATOMS: list[Atom] = []
_ATOM_IDS: dict[tuple, int] = {}
_SORT_KEYS: list[tuple] = []


def atom(kind: str, label, index: Iterable[int] = (), arg: "Expr | None" = None) -> Atom:
    index = tuple(sorted(index))
    key = (kind, label, index, arg._struct_key() if arg is not None else None)
    uid = _ATOM_IDS.get(key)
    if uid is None:
        uid = len(_ATOMS)
        a = Atom(kind, label, index, arg, uid)
        _ATOMS.append(a)
        _SORT_KEYS.append(a.sort_key())
        _ATOM_IDS[key] = uid
        return a
    return _ATOMS[uid]


def atom_by_id(uid: int) -> Atom:
    return _ATOMS[uid]


def sort_key_of(uid: int) -> tuple:
    return _SORT_KEYS[uid]


_rng_values: dict[int, int] = {}


def _mod_value(uid: int) -> int:
    v = _rng_values.get(uid)
    if v is None:
        v = random.Random(uid * 1000003 + 17).randrange(2, P.MODULUS - 1)
        _rng_values[uid] = v
    return v


# ------------------------------------------------------ registered functions


@dataclass(frozen=True)
class FunctionRule:
    name: str
    derivative: Callable[["Expr"], "Expr"]
    evaluate: Callable[[Fraction], Fraction]


def _exact_sqrt(q: Fraction) -> Fraction:
    from math import isqrt

    q = Fraction(q)
    if q < 0:
        raise ValueError("square root of a negative number")
    a, b = isqrt(q.numerator), isqrt(q.denominator)
    if a * a != q.numerator or b * b != q.denominator:
        raise ValueError(f"square root of {q} is not rational")
    return Fraction(a, b)


def _no_exact(name: str, at: Fraction, value: Fraction) -> Callable[[Fraction], Fraction]:
    def ev(q: Fraction) -> Fraction:
        if q == at:
            return value
        raise ValueError(f"{name}({q}) has no exact rational value")
    return ev


FUNCTIONS: dict[str, FunctionRule] = {}


def register_function(rule: FunctionRule) -> None:
    FUNCTIONS[rule.name] = rule


# ----------------------------------------------------------- factors


@dataclass
class _Factor:
    poly: dict
    atoms: frozenset
    degree: int
    points: list  # modular points on the zero set, or [] when unavailable


_FACTORS: dict[tuple, _Factor] = {}


def _factor_info(fkey: tuple) -> _Factor:
    info = _FACTORS.get(fkey)
    if info is None:
        p = dict(fkey)
        info = _Factor(p, frozenset(P.atoms(p)), P.degree(p), _variety_points(p))
        _FACTORS[fkey] = info
    return info


def _variety_points(p: dict) -> list:
    if len(p) == 1:
        return []
    # pick an atom appearing linearly: p = v*g + h, then v = -h/g on the zero set
    linear = None
    for k in sorted(P.atoms(p)):
        if all(e == 1 for m in p for kk, e in m if kk == k):
            linear = k
            break
    if linear is None:
        return []
    g: dict = {}
    h: dict = {}
    for m, c in p.items():
        d = dict(m)
        if linear in d:
            del d[linear]
            g[tuple(sorted(d.items()))] = c
        else:
            h[m] = c
    rng = random.Random(len(p) * 7919 + linear)
    points = []
    for _ in range(12):
        vals = {k: rng.randrange(2, P.MODULUS - 1) for k in P.atoms(p) if k != linear}
        gv = P.eval_mod(g, vals)
        if gv == 0:
            continue
        vals[linear] = (-P.eval_mod(h, vals)) * pow(gv, -1, P.MODULUS) % P.MODULUS
        points.append(vals)
        if len(points) == 2:
            break
    return points


def _maybe_divides(info: _Factor, num: dict) -> bool:
    if len(info.poly) == 1:
        ((m, _),) = info.poly.items()
        return all(P.mono_div(t, m) is not None for t in num)
    if not info.atoms <= P.atoms(num) or info.degree > P.degree(num):
        return False
    for pt in info.points:
        vals = dict(pt)
        for k in P.atoms(num):
            if k not in vals:
                vals[k] = _mod_value(k)
        if P.eval_mod(num, vals) != 0:
            return False
    return True


def _divide_by_factor(info: _Factor, num: dict) -> dict | None:
    if len(info.poly) == 1:
        ((m, c),) = info.poly.items()
        out = {}
        for t, v in num.items():
            q = P.mono_div(t, m)
            if q is None:
                return None
            out[q] = P.norm_coeff(Fraction(v) / c) if c != 1 else v
        return out
    return P.exact_divide(num, info.poly)


def _display_cmp(a: P.Mono, b: P.Mono) -> int:
    da, db = P.mono_degree(a), P.mono_degree(b)
    if da != db:
        return -1 if da > db else 1
    ka, kb = _display_lex(a), _display_lex(b)
    return -1 if ka < kb else (1 if ka > kb else 0)


def _display_lex(m: P.Mono) -> tuple:
    return tuple(sorted((_SORT_KEYS[k], -e) for k, e in m)) + (((99,), 0),)


def display_order(monos: Iterable[P.Mono]) -> list:
    return sorted(monos, key=cmp_to_key(_display_cmp))


def _split_polynomial(p: dict):
    """Write p = c * mono * rest with rest normalized; returns (c, mono, rest)."""
    mono = P.common_monomial(p)
    if mono:
        p = {P.mono_div(m, mono): c for m, c in p.items()}
    if P.is_const(p):
        return P.const_value(p), mono, None
    lead = display_order(p)[0]
    c = p[lead]
    rest = P.scale(p, Fraction(1) / c) if c != 1 else p
    return c, mono, rest


# ------------------------------------------------------------------ Expr

Number = (int, Fraction)


class Expr:
    """Immutable exact rational function of atoms; see module docstring."""

    __slots__ = ("num", "den", "_atoms", "_hash")

    def __init__(self, num: dict, den: tuple = ()) -> None:
        self.num = num
        self.den = den
        self._atoms = None
        self._hash = None

    # construction ------------------------------------------------------
    @staticmethod
    def const(c) -> "Expr":
        return Expr(P.const(Fraction(c) if not isinstance(c, int) else c))

    @staticmethod
    def of_atom(a: Atom) -> "Expr":
        return Expr(P.atom_poly(a.uid))

    @staticmethod
    def from_poly(p: dict) -> "Expr":
        return Expr(p)

    @staticmethod
    def _build(num: dict, den: dict) -> "Expr":
        if not num:
            return ZERO
        den = {f: e for f, e in den.items() if e > 0}
        if den:
            num, den = _cancel(num, den)
        return Expr(num, tuple(sorted(den.items())))

    def _struct_key(self) -> tuple:
        return (P.freeze(self.num), self.den)

    # inspection ----------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.num

    def is_constant(self) -> bool:
        return not self.den and P.is_const(self.num)

    def is_polynomial(self) -> bool:
        return not self.den

    def value(self):
        """The rational value of a constant expression."""
        if not self.is_constant():
            raise ValueError(f"not a constant: {self.render()}")
        return P.norm_coeff(Fraction(self.num.get(P.ONE_MONO, 0)))

    def atom_ids(self) -> frozenset:
        if self._atoms is None:
            s = set(P.atoms(self.num))
            for f, _ in self.den:
                s |= _factor_info(f).atoms
            self._atoms = frozenset(s)
        return self._atoms

    def atoms(self) -> list[Atom]:
        return sorted((_ATOMS[k] for k in self.atom_ids()), key=Atom.sort_key)

    def den_poly(self) -> dict:
        out = P.const(1)
        for f, e in self.den:
            out = P.mul(out, P.power(_factor_info(f).poly, e))
        return out

    def numerator(self) -> "Expr":
        return Expr(self.num)

    def denominator(self) -> "Expr":
        return Expr(self.den_poly())

    # arithmetic ------------------------------------------------------------
    def __add__(self, other) -> "Expr":
        other = _coerce(other)
        if other is NotImplemented:
            return other
        if not other.num:
            return self
        if not self.num:
            return other
        if self.den == other.den:
            if not self.den:
                return Expr(P.add(self.num, other.num))
            return Expr._build(P.add(self.num, other.num), dict(self.den))
        da, db = dict(self.den), dict(other.den)
        lcm = dict(da)
        for f, e in db.items():
            if e > lcm.get(f, 0):
                lcm[f] = e
        na = P.mul(self.num, _expand({f: e - da.get(f, 0) for f, e in lcm.items()}))
        nb = P.mul(other.num, _expand({f: e - db.get(f, 0) for f, e in lcm.items()}))
        return Expr._build(P.add(na, nb), lcm)

    __radd__ = __add__

    def __neg__(self) -> "Expr":
        return Expr(P.neg(self.num), self.den)

    def __sub__(self, other) -> "Expr":
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> "Expr":
        return _coerce(other) - self

    def __mul__(self, other) -> "Expr":
        other = _coerce(other)
        if other is NotImplemented:
            return other
        if not self.num or not other.num:
            return ZERO
        num = P.mul(self.num, other.num)
        if not self.den and not other.den:
            return Expr(num)
        den = dict(self.den)
        for f, e in other.den:
            den[f] = den.get(f, 0) + e
        return Expr._build(num, den)

    __rmul__ = __mul__

    def reciprocal(self) -> "Expr":
        if not self.num:
            raise ZeroDivisionError("division by the zero expression")
        c, mono, rest = _split_polynomial(self.num)
        den: dict = {}
        for k, e in mono:
            den[P.freeze(P.atom_poly(k))] = e
        if rest is not None:
            den[P.freeze(rest)] = 1
        num = P.scale(self.den_poly(), Fraction(1) / Fraction(c))
        return Expr._build(num, den)

    def __truediv__(self, other) -> "Expr":
        other = _coerce(other)
        if other is NotImplemented:
            return other
        if other.is_constant():
            c = other.value()
            if c == 0:
                raise ZeroDivisionError("division by zero")
            return Expr(P.scale(self.num, Fraction(1) / Fraction(c)), self.den)
        return self * other.reciprocal()

    def __rtruediv__(self, other) -> "Expr":
        return _coerce(other) / self

    def __pow__(self, e: int) -> "Expr":
        if not isinstance(e, int):
            raise TypeError("only integer powers are supported")
        if e < 0:
            return self.reciprocal() ** (-e)
        if e == 0:
            return ONE
        if not self.den:
            return Expr(P.power(self.num, e))
        return Expr(P.power(self.num, e), tuple((f, k * e) for f, k in self.den))

    # comparison ----------------------------------------------------------------
    def __eq__(self, other) -> bool:
        other = _coerce(other)
        if other is NotImplemented:
            return False
        if self.den == other.den:
            return self.num == other.num
        return (self - other).is_zero()

    def __ne__(self, other) -> bool:
        return not self.__eq__(other)

    def __bool__(self) -> bool:
        return bool(self.num)

    def __hash__(self) -> int:
        if self._hash is None:
            if self.is_constant():
                self._hash = hash(self.value())
            else:
                vals = {k: _mod_value(k) for k in self.atom_ids()}
                n = P.eval_mod(self.num, vals)
                d = P.eval_mod(self.den_poly(), vals)
                self._hash = hash(n * pow(d, -1, P.MODULUS) % P.MODULUS) if d else 0
        return self._hash

    # rendering -----------------------------------------------------------------
    def render(self) -> str:
        num = _render_poly(self.num)
        if not self.den:
            return num
        parts = []
        for f, e in sorted(self.den, key=lambda fe: _factor_sort_key(fe[0])):
            body = _render_poly(_factor_info(f).poly)
            if len(f) > 1:
                body = f"({body})"
            parts.append(body if e == 1 else f"{body}^{e}")
        if len(self.num) > 1:
            num = f"({num})"
        den = parts[0] if len(parts) == 1 else "(" + "*".join(parts) + ")"
        return f"{num}/{den}"

    __str__ = render

    def __repr__(self) -> str:
        return f"Expr({self.render()!r})"


def _factor_sort_key(fkey: tuple):
    return _display_lex(display_order(dict(fkey))[0]) if fkey else ()


def _coerce(x) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, bool):
        return NotImplemented
    if isinstance(x, Number):
        return Expr.const(x)
    if isinstance(x, Atom):
        return Expr.of_atom(x)
    return NotImplemented


def as_expr(x) -> Expr:
    e = _coerce(x)
    if e is NotImplemented:
        raise TypeError(f"cannot convert {type(x).__name__} to Expr")
    return e


def _expand(den: Mapping[tuple, int]) -> dict:
    out = P.const(1)
    for f, e in den.items():
        if e:
            out = P.mul(out, P.power(_factor_info(f).poly, e))
    return out


def _cancel(num: dict, den: dict) -> tuple[dict, dict]:
    for f in list(den):
        info = _factor_info(f)
        while den[f] > 0 and _maybe_divides(info, num):
            q = _divide_by_factor(info, num)
            if q is None:
                break
            num = q
            den[f] -= 1
        if den[f] == 0:
            del den[f]
    return num, den


def _render_coeff(c) -> str:
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _render_mono(m: P.Mono) -> str:
    parts = []
    for k, e in sorted(m, key=lambda ke: _SORT_KEYS[ke[0]]):
        s = _ATOMS[k].render()
        parts.append(s if e == 1 else f"{s}^{e}")
    return "*".join(parts)


def _render_poly(p: dict) -> str:
    if not p:
        return "0"
    out = []
    for i, m in enumerate(display_order(p)):
        c = Fraction(p[m])
        neg = c < 0
        a = -c if neg else c
        if not m:
            body = _render_coeff(a)
        elif a == 1:
            body = _render_mono(m)
        else:
            body = f"{_render_coeff(a)}*{_render_mono(m)}"
        if i == 0:
            out.append(("-" if neg else "") + body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out)


ZERO = Expr({})
ONE = Expr(P.const(1))


# ------------------------------------------------------------ function atoms


def apply_function(name: str, arg) -> Expr:
    if name not in FUNCTIONS:
        raise KeyError(f"unknown function {name!r}")
    arg = as_expr(arg)
    return Expr.of_atom(atom("f", name, (), arg))


register_function(FunctionRule("sqrt", lambda u: Fraction(1, 2) / apply_function("sqrt", u), _exact_sqrt))
register_function(FunctionRule("exp", lambda u: apply_function("exp", u), _no_exact("exp", Fraction(0), Fraction(1))))
register_function(FunctionRule("log", lambda u: ONE / u, _no_exact("log", Fraction(1), Fraction(0))))
