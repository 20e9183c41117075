"""Sparse multivariate polynomials with exact rational coefficients.

A polynomial is a plain ``dict`` mapping monomials to nonzero coefficients
(``int`` or ``Fraction``).  A monomial is a tuple of ``(atom_id, exponent)``
pairs sorted by atom id; the empty tuple is the constant monomial.  The
functions here never mutate their arguments.
"""

from __future__ import annotations

import heapq
from fractions import Fraction
from typing import Dict, Tuple

Mono = Tuple[Tuple[int, int], ...]
Poly = Dict[Mono, object]

ONE_MONO: Mono = ()
MODULUS = (1 << 61) - 1


def norm_coeff(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


def const(c) -> Poly:
    c = norm_coeff(c)
    return {ONE_MONO: c} if c != 0 else {}


def mono_mul(a: Mono, b: Mono) -> Mono:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for k, e in b:
        d[k] = d.get(k, 0) + e
    return tuple(sorted(d.items()))


def mono_div(a: Mono, b: Mono) -> Mono | None:
    """a / b when b divides a, else None."""
    if not b:
        return a
    d = dict(a)
    for k, e in b:
        have = d.get(k, 0)
        if have < e:
            return None
        if have == e:
            del d[k]
        else:
            d[k] = have - e
    return tuple(sorted(d.items()))


def mono_degree(m: Mono) -> int:
    return sum(e for _, e in m)


def add(p: Poly, q: Poly) -> Poly:
    if len(p) < len(q):
        p, q = q, p
    out = dict(p)
    for m, c in q.items():
        v = out.get(m, 0) + c
        if v:
            out[m] = norm_coeff(v)
        else:
            out.pop(m, None)
    return out


def add_into(out: Poly, q: Poly, scale=1) -> None:
    """out += scale * q, in place (out must be owned by the caller)."""
    for m, c in q.items():
        v = out.get(m, 0) + c * scale
        if v:
            out[m] = norm_coeff(v)
        else:
            out.pop(m, None)


def neg(p: Poly) -> Poly:
    return {m: -c for m, c in p.items()}


def sub(p: Poly, q: Poly) -> Poly:
    out = dict(p)
    add_into(out, q, -1)
    return out


def scale(p: Poly, c) -> Poly:
    c = norm_coeff(c)
    if c == 0:
        return {}
    if c == 1:
        return p
    return {m: norm_coeff(v * c) for m, v in p.items()}


def mul(p: Poly, q: Poly) -> Poly:
    if not p or not q:
        return {}
    if len(p) == 1 and ONE_MONO in p:
        return scale(q, p[ONE_MONO])
    if len(q) == 1 and ONE_MONO in q:
        return scale(p, q[ONE_MONO])
    out: Poly = {}
    get = out.get
    for m1, c1 in p.items():
        for m2, c2 in q.items():
            m = mono_mul(m1, m2)
            out[m] = get(m, 0) + c1 * c2
    return {m: norm_coeff(c) for m, c in out.items() if c}


def power(p: Poly, e: int) -> Poly:
    if e < 0:
        raise ValueError("negative polynomial power")
    result = const(1)
    base = p
    while e:
        if e & 1:
            result = mul(result, base)
        e >>= 1
        if e:
            base = mul(base, base)
    return result


def mono_poly(m: Mono, c=1) -> Poly:
    return {m: c}


def atom_poly(atom_id: int) -> Poly:
    return {((atom_id, 1),): 1}


def is_const(p: Poly) -> bool:
    return not p or (len(p) == 1 and ONE_MONO in p)


def const_value(p: Poly):
    return p.get(ONE_MONO, 0) if is_const(p) else None


def atoms(p: Poly) -> set[int]:
    return {k for m in p for k, _ in m}


def degree(p: Poly) -> int:
    return max((mono_degree(m) for m in p), default=0)


def diff(p: Poly, atom_id: int) -> Poly:
    out: Poly = {}
    for m, c in p.items():
        for pos, (k, e) in enumerate(m):
            if k == atom_id:
                if e == 1:
                    nm = m[:pos] + m[pos + 1:]
                else:
                    nm = m[:pos] + ((k, e - 1),) + m[pos + 1:]
                v = out.get(nm, 0) + c * e
                if v:
                    out[nm] = v
                else:
                    out.pop(nm, None)
                break
    return out


def common_monomial(p: Poly) -> Mono:
    it = iter(p)
    first = next(it, None)
    if first is None:
        return ONE_MONO
    d = dict(first)
    for m in it:
        md = dict(m)
        for k in list(d):
            e = md.get(k)
            if e is None:
                del d[k]
            elif e < d[k]:
                d[k] = e
        if not d:
            break
    return tuple(sorted(d.items()))


def freeze(p: Poly) -> tuple:
    return tuple(sorted(p.items()))


def _lex_heap_key(m: Mono) -> tuple:
    # ascending heap order == descending lex order on atom ids
    return tuple((k, -e) for k, e in m) + ((1 << 62, 0),)


def exact_divide(p: Poly, f: Poly) -> Poly | None:
    """Quotient p / f if f divides p exactly, else None."""
    if not p:
        return {}
    lead = min(f, key=_lex_heap_key)
    lc = f[lead]
    rest = [(m, c) for m, c in f.items() if m != lead]
    r = dict(p)
    heap = [(_lex_heap_key(m), m) for m in r]
    heapq.heapify(heap)
    q: Poly = {}
    while heap:
        _, m = heapq.heappop(heap)
        c = r.pop(m, None)
        if not c:
            continue
        t = mono_div(m, lead)
        if t is None:
            return None
        if isinstance(c, int) and isinstance(lc, int) and c % lc == 0:
            coef = c // lc
        else:
            coef = norm_coeff(Fraction(c) / lc)
        q[t] = coef
        for fm, fc in rest:
            mm = mono_mul(t, fm)
            old = r.get(mm)
            v = (old or 0) - coef * fc
            if v:
                r[mm] = v
                if old is None:
                    heapq.heappush(heap, (_lex_heap_key(mm), mm))
            elif old is not None:
                del r[mm]
    return q


def _mod_coeff(c) -> int:
    if isinstance(c, int):
        return c % MODULUS
    return c.numerator * pow(c.denominator, -1, MODULUS) % MODULUS


def eval_mod(p: Poly, values: dict[int, int]) -> int:
    total = 0
    for m, c in p.items():
        t = _mod_coeff(c)
        for k, e in m:
            t = t * pow(values[k], e, MODULUS) % MODULUS
        total += t
    return total % MODULUS


def evaluate(p: Poly, values: dict) -> object:
    total = 0
    for m, c in p.items():
        t = c
        for k, e in m:
            v = values[k]
            t = t * (v if e == 1 else v ** e)
        total = total + t
    return total
