"""Exact sparse log-power series  sum c * x^s * log(x)^j  with rational s.

Used to apply theta-form operators to truncated solutions without any
floating point.  Keys are (s, j) with s a Fraction and j >= 0; values are
Fractions (or any field elements supporting + and *).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping

Terms = dict


def clean(t: Mapping) -> Terms:
    return {k: v for k, v in t.items() if v != 0}


def add(*ts: Mapping) -> Terms:
    out: Terms = {}
    for t in ts:
        for k, v in t.items():
            out[k] = out.get(k, 0) + v
    return clean(out)


def scale(t: Mapping, c) -> Terms:
    return clean({k: c * v for k, v in t.items()})


def sub(a: Mapping, b: Mapping) -> Terms:
    return add(a, scale(b, -1))


def theta(t: Mapping) -> Terms:
    """x d/dx: theta(x^s log^j) = s x^s log^j + j x^s log^(j-1)."""
    out: Terms = {}
    for (s, j), c in t.items():
        if s != 0:
            out[(s, j)] = out.get((s, j), 0) + s * c
        if j:
            out[(s, j - 1)] = out.get((s, j - 1), 0) + j * c
    return clean(out)


def shift(t: Mapping, p) -> Terms:
    """Multiply by x^p."""
    p = Fraction(p)
    return {(s + p, j): c for (s, j), c in t.items()}


def apply_theta_poly(coeffs: Iterable, t: Mapping) -> Terms:
    """Apply sum_i coeffs[i] theta^i."""
    out: Terms = {}
    cur = dict(t)
    for i, c in enumerate(coeffs):
        if i:
            cur = theta(cur)
        if c:
            out = add(out, scale(cur, c))
    return out


def poly_from_roots(params: Iterable) -> list:
    """Coefficients (ascending) of prod (theta + p) over p in params."""
    coeffs = [Fraction(1)]
    for p in params:
        nxt = [Fraction(0)] * (len(coeffs) + 1)
        for i, c in enumerate(coeffs):
            nxt[i] += c * p
            nxt[i + 1] += c
        coeffs = nxt
    return coeffs


def multiply(a: Mapping, b: Mapping, max_exponent=None) -> Terms:
    out: Terms = {}
    for (s1, j1), c1 in a.items():
        for (s2, j2), c2 in b.items():
            s = s1 + s2
            if max_exponent is not None and s > max_exponent:
                continue
            key = (s, j1 + j2)
            out[key] = out.get(key, 0) + c1 * c2
    return clean(out)


def truncate(t: Mapping, max_exponent) -> Terms:
    return {k: v for k, v in t.items() if k[0] <= max_exponent}


def min_exponent(t: Mapping):
    return min((s for s, _ in t), default=None)
