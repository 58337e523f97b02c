"""Oscillating integrals of z^m Omega over Lefschetz thimble classes.

For f_a = sum z_i^N - a prod z_i (N = n+1) and the product cycle gamma_h the
integral reduces to

    sum_d prod_i (1 - xi_N^(h_i (d+m_i+1))) Gamma((d+m_i+1)/N) a^d / d!

Grouping d = N l + delta and applying the Gauss multiplication formula gives
a closed form in terms of the hypergeometric series of the period module.
Root-of-unity identities are checked exactly in Z[zeta_N].
"""

from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from mpmath import mp

from .errors import ConvergenceError, DomainError, InadmissibleDelta
from .frobenius import eval_rgs
from .numeric import GUARD_BITS, gamma, resolve_precision, to_mp, xi
from .pfode import admissible_deltas
from .sectors import sector_grading


@dataclass(frozen=True)
class ThimbleIndex:
    h: tuple[int, ...]
    n: int

    def __post_init__(self):
        if len(self.h) != self.n + 1:
            raise DomainError(f"thimble index needs {self.n + 1} entries")
        if any(not 1 <= x <= self.n for x in self.h):
            raise DomainError("thimble entries must lie in 1..n")

    @classmethod
    def all(cls, n: int) -> Iterable["ThimbleIndex"]:
        for h in itertools.product(range(1, n + 1), repeat=n + 1):
            yield cls(h, n)


@dataclass(frozen=True)
class OscillatingValue:
    value: object
    terms_used: int
    tail_bound: object


def _root_factor(n: int, m, h, d: int, prec: int):
    N = n + 1
    out = mp.mpc(1)
    for hi, mi in zip(h, m):
        e = (hi * (d + mi + 1)) % N
        if e == 0:
            return mp.mpc(0)
        out *= 1 - xi(N, e, prec)
    return out


def _h_tuple(h, n):
    return h.h if isinstance(h, ThimbleIndex) else ThimbleIndex(tuple(h), n).h


def _key(a):
    return str(a) if isinstance(a, (int, Fraction)) else repr(complex(a))


def _unkey(k: str):
    try:
        return Fraction(k)
    except ValueError:
        return complex(k.strip("()"))


def oscillating_series(n: int, m: Sequence[int], h, a, tol=None,
                       precision: int | None = None) -> OscillatingValue:
    """Direct summation over d.

    The terms behave like (a/N)^d times a power of d, so the series converges
    for |a| < N = n+1 (equivalently |b| < 1).  Partial sums are kept per
    residue class of d mod N, since the root-of-unity factor only depends on
    that class; they are shared between thimbles.
    """
    prec = resolve_precision(precision)
    m = sector_grading(m, n).m
    h = _h_tuple(h, n)
    sums, terms, bound = _class_sums(n, m, _key(a), prec, None if tol is None else str(tol))
    with mp.workprec(prec + GUARD_BITS):
        total = mp.mpc(0)
        for delta, s in enumerate(sums):
            total += _root_factor(n, m, h, delta, prec) * s
        return OscillatingValue(total, terms, bound)


@lru_cache(maxsize=512)
def _class_sums(n: int, m: tuple, akey: str, prec: int, tol):
    N = n + 1
    with mp.workprec(prec + GUARD_BITS):
        a = mp.mpc(to_mp(_unkey(akey)))
        tol = mp.mpf(2) ** (-prec) if tol is None else mp.mpf(tol)
        q_lim = abs(a) / N
        if q_lim >= 0.95:
            raise ConvergenceError(f"|a| = {mp.nstr(abs(a), 6)} too close to the radius {N}")
        sums = [mp.mpc(0)] * N
        envelope = None
        fact = mp.mpf(1)
        d = 0
        while True:
            if d:
                fact *= d
            g = mp.mpf(1)
            for mi in m:
                g *= gamma(Fraction(d + mi + 1, N), prec + GUARD_BITS)
            env = g * abs(a) ** d / fact
            sums[d % N] += g * a ** d / fact
            if envelope is not None and d > 2 * N:
                ratio = env / envelope if envelope else mp.mpf(0)
                q = max(ratio, q_lim) * mp.mpf(1.05)
                if q < 1:
                    bound = 2 ** N * env * q / (1 - q)
                    if bound < tol * max(1, max(abs(x) for x in sums)):
                        return tuple(sums), d + 1, bound
            envelope = env
            d += 1
            if d > 200 * prec:
                raise ConvergenceError("oscillating series did not reach the requested tolerance")


def gamma_closed_form(n: int, m: Sequence[int], h, delta: int, a,
                      precision: int | None = None):
    """The delta-component of the oscillating integral in hypergeometric form.

    prod(1 - xi^(h_i(delta+m_i+1))) (2 pi)^(n/2) N^(-delta-1/2)
      * prod Gamma((delta+m_i+1)/N) / prod_{j=1..N} Gamma((delta+j)/N)
      * a^delta * G(upper=(delta+m_i+1)/N; lower=(delta+j)/N, j=1..N; b),  b = (a/N)^N
    """
    prec = resolve_precision(precision)
    m = sector_grading(m, n).m
    h = _h_tuple(h, n)
    if delta not in admissible_deltas(n, m):
        raise InadmissibleDelta(f"delta={delta} is not admissible for m={m}")
    part = _closed_component(n, m, delta, _key(a), prec)
    with mp.workprec(prec + GUARD_BITS):
        return _root_factor(n, m, h, delta, prec) * part


@lru_cache(maxsize=512)
def _closed_component(n: int, m: tuple, delta: int, akey: str, prec: int):
    N = n + 1
    upper = [Fraction(delta + mi + 1, N) for mi in m]
    lower = [Fraction(delta + j, N) for j in range(1, N + 1)]
    work = prec + GUARD_BITS
    with mp.workprec(work):
        a = mp.mpc(to_mp(_unkey(akey)))
        b = (a / N) ** N
        series = eval_rgs(upper, lower, b, precision=work).value
        num = mp.mpf(1)
        for u in upper:
            num *= gamma(u, work)
        den = mp.mpf(1)
        for l in lower:
            den *= gamma(l, work)
        pref = (2 * mp.pi) ** (mp.mpf(n) / 2) * mp.mpf(N) ** (-delta - mp.mpf(1) / 2)
        return pref * num / den * a ** delta * series


def closed_form_sum(n, m, h, a, precision: int | None = None):
    prec = resolve_precision(precision)
    with mp.workprec(prec + GUARD_BITS):
        total = mp.mpc(0)
        for delta in admissible_deltas(n, m):
            total += gamma_closed_form(n, m, h, delta, a, prec)
        return total


def two_path_error(n, m, h, a, precision: int | None = None):
    """Relative difference between the direct series and the closed form."""
    prec = resolve_precision(precision)
    s = oscillating_series(n, m, h, a, precision=prec).value
    c = closed_form_sum(n, m, h, a, prec)
    with mp.workprec(prec):
        scale = max(abs(s), abs(c))
        return abs(s - c) / scale if scale else abs(s - c)


SAMPLE_POINTS = (Fraction(1, 3), complex(0.5, 0.25), Fraction(-2, 3))


# ---------------------------------------------------------------- cyclotomic integers


@lru_cache(maxsize=None)
def cyclotomic_polynomial(k: int) -> tuple[int, ...]:
    """Coefficients of Phi_k, lowest degree first."""
    poly = [-1] + [0] * (k - 1) + [1]  # t^k - 1
    for d in range(1, k):
        if k % d == 0:
            poly = _poly_divexact(poly, cyclotomic_polynomial(d))
    return tuple(poly)


def _poly_divexact(num, den):
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    for i in range(len(out) - 1, -1, -1):
        c = num[i + len(den) - 1] // den[-1]
        out[i] = c
        for j, dj in enumerate(den):
            num[i + j] -= c * dj
    assert not any(num), "inexact division"
    return out


@dataclass(frozen=True)
class Cyclotomic:
    """Element of Z[zeta_k] stored reduced modulo Phi_k."""

    k: int
    coeffs: tuple[int, ...]

    @classmethod
    def from_powers(cls, k: int, powers: dict) -> "Cyclotomic":
        raw = [0] * k
        for e, c in powers.items():
            raw[e % k] += c
        return cls(k, _reduce(raw, k))

    @classmethod
    def zeta(cls, k: int, e: int = 1) -> "Cyclotomic":
        return cls.from_powers(k, {e: 1})

    @classmethod
    def one(cls, k: int) -> "Cyclotomic":
        return cls.from_powers(k, {0: 1})

    def __add__(self, other):
        return Cyclotomic(self.k, _reduce([x + y for x, y in itertools.zip_longest(self.coeffs, other.coeffs, fillvalue=0)], self.k))

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c: int):
        return Cyclotomic(self.k, tuple(c * x for x in self.coeffs))

    def __mul__(self, other):
        raw = [0] * (len(self.coeffs) + len(other.coeffs))
        for i, x in enumerate(self.coeffs):
            if x:
                for j, y in enumerate(other.coeffs):
                    raw[i + j] += x * y
        return Cyclotomic(self.k, _reduce(raw, self.k))

    def conjugate(self):
        return Cyclotomic.from_powers(self.k, {-i: c for i, c in enumerate(self.coeffs) if c})

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __eq__(self, other):
        return isinstance(other, Cyclotomic) and self.k == other.k and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.k, self.coeffs))

    def to_complex(self, precision: int | None = None):
        prec = resolve_precision(precision)
        with mp.workprec(prec):
            return sum((c * xi(self.k, i, prec) for i, c in enumerate(self.coeffs) if c), mp.mpc(0))


def _reduce(raw, k: int) -> tuple[int, ...]:
    phi = cyclotomic_polynomial(k)
    deg = len(phi) - 1
    raw = list(raw)
    for i in range(len(raw) - 1, deg - 1, -1):
        c = raw[i]
        if c:
            for j, pj in enumerate(phi):
                raw[i - deg + j] -= c * pj
    raw = raw[:deg] + [0] * max(0, deg - len(raw))
    return tuple(raw)


# ---------------------------------------------------------------- cubic real structure


def chi_minus3(x: int) -> int:
    """The nontrivial character mod 3: 0, 1, -1 on 0, 1, 2."""
    return (0, 1, -1)[x % 3]


def thimble_factor(x: int) -> Cyclotomic:
    """1 - xi_3^x inside Z[zeta_12]."""
    return Cyclotomic.one(12) - Cyclotomic.zeta(12, 4 * x)


SQRT3 = Cyclotomic.from_powers(12, {1: 1, -1: 1})  # 2 cos(pi/6)


def chi_identity_table(literal: bool = True):
    """Compare 1 - xi_3^(h(m+1)) with xi_12^(-chi(h) chi(m+1)) over all 3^6 inputs.

    With literal=False the right side carries the factor sqrt(3) = |1 - xi_3|.
    Returns (checked, failures) where failures lists the offending (h_i, m_i + 1).
    Inputs whose left side vanishes are skipped.
    """
    checked = 0
    failures = []
    for h in itertools.product(range(3), repeat=3):
        for m in itertools.product(range(3), repeat=3):
            lhs = Cyclotomic.one(12)
            rhs = Cyclotomic.one(12)
            for hi, mi in zip(h, m):
                x = hi * (mi + 1)
                lhs = lhs * thimble_factor(x)
                rhs = rhs * Cyclotomic.zeta(12, -chi_minus3(hi) * chi_minus3(mi + 1))
                if not literal:
                    rhs = rhs * SQRT3
            if lhs.is_zero():
                continue
            checked += 1
            if lhs != rhs:
                failures.append((h, tuple(x + 1 for x in m)))
    return checked, failures


def cubic_real_structure(mu, m: Sequence[int], precision: int | None = None) -> dict:
    """Coefficients of mu c_m^-1 [z^m Omega] + conj(mu) c_(1-m)^-1 [z^(1-m) Omega] over h in {0,1,2}^3.

    Also checks exactly that the coefficient vector of 1-m is the complex
    conjugate of that of m.  The coefficients are real.
    """
    m = tuple(int(x) for x in m)
    if len(m) != 3 or any(x not in (0, 1) for x in m):
        raise DomainError("the cubic real structure is defined for m in {0,1}^3")
    prec = resolve_precision(precision)
    dual = tuple(1 - x for x in m)
    out = {}
    with mp.workprec(prec + GUARD_BITS):
        mu = mp.mpc(to_mp(mu))
        for h in itertools.product(range(3), repeat=3):
            cm = Cyclotomic.one(12)
            cd = Cyclotomic.one(12)
            for hi, mi, di in zip(h, m, dual):
                cm = cm * thimble_factor(hi * (mi + 1))
                cd = cd * thimble_factor(hi * (di + 1))
            if cd != cm.conjugate():
                raise AssertionError(f"conjugation pairing fails at h={h}")
            out[h] = mu * cm.to_complex(prec + GUARD_BITS) + mp.conj(mu) * cd.to_complex(prec + GUARD_BITS)
    with mp.workprec(prec):
        return {h: +v for h, v in out.items()}


def cubic_display_value(m: Sequence[int], h, a, precision: int | None = None):
    """The single-delta hypergeometric display for the cubic sectors m = (1,0,0), (0,1,1)."""
    deltas = admissible_deltas(2, m)
    if len(deltas) != 1:
        raise InadmissibleDelta(f"m={tuple(m)} has {len(deltas)} admissible deltas")
    return gamma_closed_form(2, m, h, deltas[0], a, precision)


# ---------------------------------------------------------------- reports


def sweep(ns: Sequence[int] = (2, 3), points=SAMPLE_POINTS, precision: int | None = None):
    """Two-path comparison over orbit representatives with beta < 1 and all thimbles."""
    from .sectors import sector_orbits

    rows = []
    for n in ns:
        for sec in sector_orbits(n, 1):
            if sec.beta >= 1:
                continue
            for h in ThimbleIndex.all(n):
                for a in points:
                    rows.append({"n": n, "m": sec.m, "h": h.h, "a": a,
                                 "error": two_path_error(n, sec.m, h, a, precision)})
    return rows


def dump_csv(path, n: int, m: Sequence[int], points=SAMPLE_POINTS, precision: int | None = None) -> int:
    """Write (m, h, a, value_re, value_im, method) rows; returns the row count."""
    prec = resolve_precision(precision)
    count = 0
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["m", "h", "a", "value_re", "value_im", "method"])
        for h in ThimbleIndex.all(n):
            for a in points:
                for method, val in (("series", oscillating_series(n, m, h, a, precision=prec).value),
                                    ("closed_form", closed_form_sum(n, m, h, a, prec))):
                    w.writerow(["".join(map(str, m)), "".join(map(str, h.h)), str(a),
                                mp.nstr(val.real, 50), mp.nstr(val.imag, 50), method])
                    count += 1
    return count
