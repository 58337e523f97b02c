"""Local Frobenius bases with logarithms, and direct hypergeometric summation.

Every local operator is brought to the shape  sum_r x^r P_r(theta_x)  with
rational polynomial P_r, so a solution  x^rho sum c_k x^k  obeys

    P_0(rho + k) c_k = - sum_{r >= 1} P_r(rho + k - r) c_{k-r}.

Roots in one class modulo the recurrence step are handled together: each
c_k is a vector of coefficients of log(x)^j / j!, on which theta acts as
(rho + k) plus a nilpotent shift, so resonant indices contribute new free
entries (and logarithms) instead of a division by zero.  All arithmetic is
exact over the rationals.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from mpmath import mp

from . import series as S
from .errors import ConvergenceError, IrregularPoint, ParameterPole, PrecisionExhausted
from .numeric import GUARD_BITS, decimal_string, resolve_precision, to_mp
from .pfode import ThetaOperator

log = logging.getLogger(__name__)

DEFAULT_TRUNC = 200
POINTS = (0, 1, "inf")


def _norm_point(point):
    if point in (0, "0"):
        return 0
    if point in (1, "1"):
        return 1
    if point in ("inf", "oo", "∞", math.inf):
        return "inf"
    raise IrregularPoint(f"unsupported expansion point {point!r}")


# ---------------------------------------------------------------- helpers


def _taylor_at(poly: Sequence[Fraction], x0: Fraction, width: int) -> list[Fraction]:
    """[P(x0), P'(x0), P''(x0)/2!, ...] truncated to width, via repeated synthetic division."""
    coeffs = list(poly)
    out = []
    for _ in range(width):
        if not coeffs:
            out.append(Fraction(0))
            continue
        acc = Fraction(0)
        quotient = []
        for c in reversed(coeffs):
            acc = acc * x0 + c
            quotient.append(acc)
        out.append(quotient.pop())  # remainder = P(x0)
        coeffs = list(reversed(quotient))
    return out


# ---------------------------------------------------------------- local operators


@dataclass(frozen=True)
class LocalOperator:
    """sum_r x^r P_r(theta) with exact coefficients plus the indicial roots of P_0."""

    terms: tuple[tuple[int, tuple[Fraction, ...]], ...]
    roots: tuple[Fraction, ...]
    radius: float

    @property
    def order(self) -> int:
        return len(self.roots)

    def step(self) -> int:
        return math.gcd(*[r for r, _ in self.terms if r > 0])

    def apply(self, t) -> dict:
        out = {}
        for r, coeffs in self.terms:
            out = S.add(out, S.shift(S.apply_theta_poly(coeffs, t), r))
        return out


def _stirling2(j: int, i: int) -> int:
    return _stirling2_table(j)[i]


@lru_cache(maxsize=None)
def _stirling2_table(j: int) -> tuple[int, ...]:
    row = [1]
    for n in range(1, j + 1):
        nxt = [0] * (n + 1)
        for i in range(1, n + 1):
            nxt[i] = (row[i] if i < len(row) else 0) * i + row[i - 1]
        row = nxt
    return tuple(row + [0] * (j + 1 - len(row)))


@lru_cache(maxsize=None)
def falling_factorial_poly(i: int) -> tuple[int, ...]:
    """Ascending coefficients of theta(theta-1)...(theta-i+1) = x^i d^i/dx^i."""
    coeffs = [1]
    for j in range(i):
        nxt = [0] * (len(coeffs) + 1)
        for t, c in enumerate(coeffs):
            nxt[t] += -j * c
            nxt[t + 1] += c
        coeffs = nxt
    return tuple(coeffs)


def derivative_form(op: ThetaOperator) -> list[tuple[Fraction, Fraction]]:
    """q_i(x) = x^i (A_i - B_i x) with op = sum_i q_i(x) d^i/dx^i, as [(A_i, B_i)]."""
    if not op.is_b_form:
        raise ValueError("derivative form needs monomial_power 1")
    L, U = op.L(), op.U()
    k = op.order
    out = []
    for i in range(k + 1):
        a = sum(_stirling2(j, i) * L[j] for j in range(i, k + 1))
        b = sum(_stirling2(j, i) * U[j] for j in range(i, k + 1)) * op.scale
        out.append((Fraction(a), Fraction(b)))
    return out


def local_operator(op: ThetaOperator, point) -> LocalOperator:
    point = _norm_point(point)
    if point == 0:
        terms = op.recurrence_terms()
        roots = tuple(-l for l in op.lower_params)
        radius = float(abs(1 / op.scale)) ** (1.0 / op.monomial_power)
        return LocalOperator(tuple((r, tuple(c)) for r, c in sorted(terms.items())), roots, radius)
    if not op.is_b_form:
        raise IrregularPoint("expansions at 1 and infinity need the b-form")
    if point == "inf":
        inv = op.at_infinity()
        lo = local_operator(inv, 0)
        return lo
    if op.scale != 1:
        raise IrregularPoint("expansion at 1 needs unit scale; rescale first")
    return _local_at_one(op)


def _poly_mul(a: list, b: list) -> list:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _local_at_one(op: ThetaOperator) -> LocalOperator:
    k = op.order
    q = derivative_form(op)
    # q_i(1 - s) as polynomial in s, times (-1)^i and s^(k-1-i); for i = k the factor s cancels
    columns = []
    for i, (A, B) in enumerate(q):
        one_minus_s_i = [Fraction(1)]
        for _ in range(i):
            one_minus_s_i = _poly_mul(one_minus_s_i, [Fraction(1), Fraction(-1)])
        if i == k:
            poly = one_minus_s_i  # (1-s)^k (A - B(1-s)) / s with A = B = 1
            assert A == B
            poly = [A * c for c in poly]
        else:
            poly = _poly_mul(one_minus_s_i, [A - B, B])
            poly = [Fraction(0)] * (k - 1 - i) + poly
        sign = -1 if i % 2 else 1
        columns.append([sign * c for c in poly])
    width = max(len(c) for c in columns)
    terms = {}
    for r in range(width):
        P = [Fraction(0)] * (k + 1)
        for i, col in enumerate(columns):
            if r < len(col) and col[r]:
                for t, f in enumerate(falling_factorial_poly(i)):
                    P[t] += col[r] * f
        if any(P):
            terms[r] = tuple(P)
    gamma = sum(op.lower_params) - sum(op.upper_params) + k - 1
    roots = tuple(Fraction(j) for j in range(k - 1)) + (gamma,)
    _check_roots(terms[0], roots)
    return LocalOperator(tuple(sorted(terms.items())), tuple(sorted(roots)), 1.0)


def _check_roots(P0, roots) -> None:
    expected = S.poly_from_roots([-r for r in roots])
    lead = P0[-1]
    if [c / lead for c in P0] != expected:
        raise ArithmeticError("indicial polynomial disagrees with the predicted exponents")


def indicial_roots(op: ThetaOperator, point) -> tuple[Fraction, ...]:
    """Local exponents: {-l} at 0, {u} at infinity (in 1/x), {0..k-2, gamma} at 1."""
    return tuple(sorted(local_operator(op, point).roots))


# ---------------------------------------------------------------- log series


@dataclass(frozen=True)
class LogSeries:
    """sum_{j <= L} log(x)^j x^rho sum_k coeffs[j][k] x^k."""

    exponent: Fraction
    log_degree: int
    coeffs: tuple[tuple, ...]
    trunc: int

    def terms(self) -> dict:
        return S.clean({(self.exponent + k, j): c for j, row in enumerate(self.coeffs)
                        for k, c in enumerate(row)})

    def coefficient(self, j: int, k: int):
        return self.coeffs[j][k]

    def theta(self) -> "LogSeries":
        rows = []
        for j in range(self.log_degree + 1):
            row = []
            for k in range(self.trunc + 1):
                c = (self.exponent + k) * self.coeffs[j][k]
                if j < self.log_degree:
                    c += (j + 1) * self.coeffs[j + 1][k]
                row.append(c)
            rows.append(tuple(row))
        return LogSeries(self.exponent, self.log_degree, tuple(rows), self.trunc)

    def evaluate(self, x, precision: int | None = None, terms: int | None = None):
        prec = resolve_precision(precision)
        n = self.trunc if terms is None else min(terms, self.trunc)
        with mp.workprec(prec + GUARD_BITS):
            x = mp.mpc(to_mp(x))
            lg = mp.log(x)
            total = mp.mpc(0)
            lpow = mp.mpc(1)
            for j in range(self.log_degree + 1):
                row = self.coeffs[j]
                acc = mp.mpc(0)
                for k in range(n, -1, -1):
                    acc = acc * x + _mp_coeff(row[k])
                total += lpow * acc
                lpow *= lg
            total *= mp.power(x, to_mp(self.exponent))
        return total

    def theta_values(self, x, count: int, precision: int | None = None) -> list:
        out = []
        cur = self
        for i in range(count):
            if i:
                cur = cur.theta()
            out.append(cur.evaluate(x, precision))
        return out

    def to_json(self, digits: int = 50) -> dict:
        records = []
        with mp.workprec(int(digits * 3.33) + 32):
            for j, row in enumerate(self.coeffs):
                for k, c in enumerate(row):
                    if c == 0:
                        continue
                    v = mp.mpc(_mp_coeff(c))
                    records.append({"j": j, "k": k, "re": decimal_string(v.real, digits),
                                    "im": decimal_string(v.imag, digits)})
        return {"exponent": f"{self.exponent.numerator}/{self.exponent.denominator}",
                "log_degree": self.log_degree, "trunc": self.trunc, "coefficients": records}


def _mp_coeff(c):
    if isinstance(c, Fraction):
        return mp.mpf(c.numerator) / c.denominator
    if isinstance(c, int):
        return mp.mpf(c)
    return c


@dataclass(frozen=True)
class FrobeniusBasis:
    point: object
    solutions: tuple[LogSeries, ...]
    radius: float
    operator: ThetaOperator = field(repr=False, default=None)

    @property
    def exponents(self) -> list[Fraction]:
        return [s.exponent for s in self.solutions]

    def local_coordinate(self, b):
        if self.point == 0:
            return b
        if self.point == 1:
            return 1 - b
        return 1 / b

    def jet(self, b, order: int | None = None, precision: int | None = None) -> list[list]:
        """Rows [y, y', y''/2!, ...] (derivatives in the global variable) for each solution."""
        prec = resolve_precision(precision)
        order = order or len(self.solutions)
        with mp.workprec(prec + GUARD_BITS):
            b = mp.mpc(to_mp(b))
            x = self.local_coordinate(b)
            rows = []
            for sol in self.solutions:
                th = sol.theta_values(x, order, prec + GUARD_BITS)
                if self.point == "inf":
                    th = [(-1) ** i * v for i, v in enumerate(th)]
                    base = b
                elif self.point == 1:
                    base = x
                else:
                    base = b
                row = []
                for i in range(order):
                    ff = falling_factorial_poly(i)
                    d = sum(c * th[j] for j, c in enumerate(ff)) / base ** i
                    if self.point == 1 and i % 2:
                        d = -d
                    row.append(d / math.factorial(i))
                rows.append(row)
        return rows

    def to_json(self, digits: int = 50) -> dict:
        return {"point": "inf" if self.point == "inf" else self.point, "radius": self.radius,
                "solutions": [s.to_json(digits) for s in self.solutions]}


def _classes(roots: Sequence[Fraction], step: int) -> list[list[Fraction]]:
    groups: dict[Fraction, list[Fraction]] = {}
    for r in roots:
        groups.setdefault(r % step, []).append(r)
    return [sorted(g) for _, g in sorted(groups.items())]


def _solve_local(lop: LocalOperator, trunc: int) -> list[LogSeries]:
    """Solve the recurrence on log-coefficient vectors for every root class.

    c_N is a vector (c_N[j] = coefficient of x^(rho0+N) log(x)^j / j!), and theta
    acts on it as (rho0 + N) + S with S the shift c[j] <- c[j+1].  At a
    resonance, P_0(rho0 + N + S) = S^v * unit, which leaves v new free
    entries; each free entry is one basis element.
    """
    step = lop.step() if len(lop.terms) > 1 else 1
    out = []
    P0 = dict(lop.terms)[0]
    for cls in _classes(lop.roots, step):
        rho0 = cls[0]
        width = len(cls)
        mult = {}
        for r in cls:
            mult[r - rho0] = mult.get(r - rho0, 0) + 1
        # c[N] is a list over log index j of lists over free parameters
        params = 0
        c: list[list[list[Fraction]]] = []
        for N in range(trunc + 1):
            if N % step:
                # only multiples of the step are reachable from rho0
                c.append([[Fraction(0)] * width for _ in range(width)])
                continue
            rhs = [[Fraction(0)] * width for _ in range(width)]  # [j][param], param padded later
            for r, P in lop.terms:
                if r == 0 or r > N:
                    continue
                prev = c[N - r]
                t = _taylor_at(P, rho0 + N - r, width)
                for j in range(width):
                    for tt in range(width - j):
                        if t[tt]:
                            row = prev[j + tt]
                            target = rhs[j]
                            for q in range(params):
                                if row[q]:
                                    target[q] -= t[tt] * row[q]
            v = mult.get(N, 0)
            new = [[Fraction(0)] * width for _ in range(width)]
            if v:
                tden = _taylor_at(P0, rho0 + N, width)
                assert all(x == 0 for x in tden[:v])
                for j in range(width - v, width):
                    if any(rhs[j][q] for q in range(params)):
                        raise ArithmeticError("Frobenius recurrence inconsistent at a resonance")
                for j in range(width - 1 - v, -1, -1):
                    for q in range(params):
                        acc = rhs[j][q]
                        for tt in range(v + 1, width - j):
                            acc -= tden[tt] * new[j + tt][q]
                        new[j + v][q] = acc / tden[v]
                for j in range(v):
                    new[j][params + j] = Fraction(1)
                params += v
            else:
                tden = _taylor_at(P0, rho0 + N, width)
                for j in range(width - 1, -1, -1):
                    for q in range(params):
                        acc = rhs[j][q]
                        for tt in range(1, width - j):
                            acc -= tden[tt] * new[j + tt][q]
                        new[j][q] = acc / tden[0]
            c.append(new)
        for q in range(params):
            rows = [[c[N][j][q] / math.factorial(j) for N in range(trunc + 1)] for j in range(width)]
            out.append(_normalise(rho0, rows, trunc))
    return out


def _normalise(rho0: Fraction, rows: list[list[Fraction]], trunc: int) -> LogSeries:
    while len(rows) > 1 and not any(rows[-1]):
        rows.pop()
    first = min(k for row in rows for k, v in enumerate(row) if v != 0)
    log_degree = len(rows) - 1
    lead_row = max(j for j, row in enumerate(rows) if row[first] != 0)
    shifted = [row[first:] + [Fraction(0)] * first for row in rows]
    lead = shifted[lead_row][0]
    factor = Fraction(1, math.factorial(lead_row)) / lead
    shifted = [tuple(v * factor for v in row[: trunc - first + 1]) for row in shifted]
    return LogSeries(rho0 + first, log_degree, tuple(shifted), trunc - first)


@lru_cache(maxsize=256)
def _basis_cached(op: ThetaOperator, point, trunc: int) -> FrobeniusBasis:
    lop = local_operator(op, point)
    sols = _solve_local(lop, trunc)
    sols.sort(key=lambda s: (s.exponent, s.log_degree))
    return FrobeniusBasis(point, tuple(sols), lop.radius, op)


def frobenius_basis(op: ThetaOperator, point=0, trunc: int = DEFAULT_TRUNC) -> FrobeniusBasis:
    """Exact Frobenius basis at 0, 1 or infinity, ordered by (exponent, log degree).

    Each solution is normalised so that its leading term is
    x^rho log(x)^L / L!.  Coefficients are exact Fractions.
    """
    if trunc < 2 * op.order:
        raise ValueError("trunc must be at least twice the order")
    return _basis_cached(op, _norm_point(point), int(trunc))


def residual(op: ThetaOperator, sol: LogSeries, point=0) -> dict:
    """Exact residual of a solution, restricted to the range the truncation determines."""
    lop = local_operator(op, point)
    res = lop.apply(sol.terms())
    limit = sol.exponent + sol.trunc
    return {k: v for k, v in res.items() if k[0] <= limit}


# ---------------------------------------------------------------- direct summation


@dataclass(frozen=True)
class RgsValue:
    value: object
    terms: int
    tail_bound: object


def eval_rgs(upper: Sequence, lower: Sequence, z, trunc: int | None = None,
             margin: float = 0.05, precision: int | None = None) -> RgsValue:
    """sum_k prod (upper_i)_k / prod (lower_j)_k z^k, with an a-posteriori tail bound.

    The series has no k! in the denominator; a classical pFq is obtained by
    appending 1 to the lower list.  With trunc=None the sum runs until the
    tail bound is below 2^-precision relative to the partial sum.
    """
    prec = resolve_precision(precision)
    up = [Fraction(x) if isinstance(x, (int, Fraction, str)) else x for x in upper]
    lo = [Fraction(x) if isinstance(x, (int, Fraction, str)) else x for x in lower]
    for b in lo:
        if isinstance(b, Fraction) and b <= 0 and b.denominator == 1:
            if trunc is None or -b < trunc:
                raise ParameterPole(f"lower parameter {b} is a non-positive integer")
    terminating = any(isinstance(a, Fraction) and a <= 0 and a.denominator == 1 for a in up)
    with mp.workprec(prec + GUARD_BITS):
        zz = mp.mpc(to_mp(z))
        if len(up) > len(lo) and not terminating and zz != 0:
            raise ConvergenceError("series with more upper than lower parameters diverges")
        if len(up) == len(lo) and not terminating and abs(zz) >= 1 - margin:
            raise ConvergenceError(f"|z| = {mp.nstr(abs(zz), 8)} outside the disk of radius {1 - margin}")
        ua = [to_mp(a) for a in up]
        la = [to_mp(b) for b in lo]
        eps = mp.mpf(2) ** (-prec - 8)
        term = mp.mpc(1)
        total = mp.mpc(1)
        k = 0
        cap = trunc if trunc is not None else 10 ** 6
        tail = mp.inf
        while k < cap:
            num = mp.mpf(1)
            for a in ua:
                num *= a + k
            den = mp.mpf(1)
            for b in la:
                den *= b + k
            term = term * num / den * zz
            k += 1
            total += term
            if term == 0 and terminating:
                tail = mp.mpf(0)
                break
            tail = _tail_bound(ua, la, zz, k, abs(term))
            if trunc is None and tail < eps * max(abs(total), eps):
                break
        if trunc is None and not tail < eps * max(abs(total), eps) and tail != 0:
            raise PrecisionExhausted("hypergeometric series did not reach the requested accuracy")
    with mp.workprec(prec):
        return RgsValue(+total, k, +tail)


def _tail_bound(ua, la, z, k, last):
    """Geometric bound on sum_{j > k} |t_j| from the monotone ratio majorant at index k."""
    if len(ua) < len(la):
        # factorial decay: majorant ratio still geometric once k exceeds the parameters
        pass
    ratio = abs(z)
    for a in ua:
        ratio *= abs(a) + k
    for b in la:
        d = k - abs(b)
        if d <= 0:
            return mp.inf
        ratio /= d
    if ratio >= 1:
        return mp.inf
    return last * ratio / (1 - ratio)
