"""Genus-zero A-side series for the quartic K3 and its quotients, and the quintic
Yamaguchi-Yau relations.

All arithmetic is exact over Q.  Cohomology classes enter only through
eps = P/z, which is nilpotent: eps^4 = 0 on P^3, and eps^c = 0 on a fixed
component of the maximal quotient whose coarse space is P^(c-1).  The descendant
variable z only ever appears through eps and the fractional twisted-sector
grading, which is carried as a label.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .errors import TruncationError, VerificationFailed
from .pfode import ThetaOperator, pf_operator, quintic_operator, reduce, sector_operator

Q = Fraction
UNTWISTED = (Q(0),) * 4


# ---------------------------------------------------------------- eps series
# A truncated power series in eps is a tuple of Fractions of fixed length K.


def eps_mul(a: Sequence, b: Sequence, K: int) -> tuple:
    out = [Q(0)] * K
    for i, x in enumerate(a[:K]):
        if x:
            for j, y in enumerate(b[:K - i]):
                out[i + j] += x * y
    return tuple(out)


def eps_inv(a: Sequence, K: int) -> tuple:
    if a[0] == 0:
        raise ZeroDivisionError("eps series with zero constant term is not invertible")
    out = [Q(0)] * K
    out[0] = 1 / Q(a[0])
    for k in range(1, K):
        s = sum((a[j] * out[k - j] for j in range(1, min(k, len(a) - 1) + 1)), Q(0))
        out[k] = -s * out[0]
    return tuple(out)


def eps_linear(slope, const, K: int) -> tuple:
    """slope*eps + const."""
    out = [Q(0)] * K
    out[0] = Q(const)
    if K > 1:
        out[1] = Q(slope)
    return tuple(out)


def eps_product(factors, K: int) -> tuple:
    out = eps_linear(0, 1, K)
    for slope, const in factors:
        out = eps_mul(out, eps_linear(slope, const, K), K)
    return out


def eps_add(a: Sequence, b: Sequence, s=1) -> tuple:
    return tuple(x + s * y for x, y in zip(a, b))


# ---------------------------------------------------------------- containers


@dataclass
class CohSeries:
    """Coefficients keyed by (degree, eps power, sector label).

    The degree is the exponent of e^t (an int or a Fraction) or, for the
    minimal quotient, a tuple (d, k0, k1, k2, k3).  The prefactor z e^(t eps)
    is implicit.
    """

    trunc_q: int
    trunc_eps: int
    coeffs: dict = field(default_factory=dict)

    def slice(self, power: int, label=UNTWISTED) -> dict:
        return {d: c for (d, p, b), c in self.coeffs.items() if p == power and b == label}

    def eps_series(self, degree, label=UNTWISTED) -> tuple:
        return tuple(self.coeffs.get((degree, p, label), Q(0)) for p in range(self.trunc_eps + 1))

    def labels(self) -> set:
        return {b for (_, _, b) in self.coeffs}

    def __eq__(self, other) -> bool:
        if not isinstance(other, CohSeries):
            return NotImplemented
        keys = set(self.coeffs) | set(other.coeffs)
        return all(self.coeffs.get(k, 0) == other.coeffs.get(k, 0) for k in keys)


@dataclass(frozen=True)
class Report:
    name: str
    trunc: int
    residual_norm: Fraction
    verdict: bool
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"name": self.name, "trunc": self.trunc, "residual_norm": str(self.residual_norm),
                "verdict": "pass" if self.verdict else "fail", **self.detail}


def _max_abs(values) -> Fraction:
    return max((abs(Q(v)) for v in values), default=Q(0))


# ---------------------------------------------------------------- quartic I-function


@lru_cache(maxsize=None)
def _quartic_terms(trunc_q: int, K: int) -> tuple:
    """A_d(eps) = prod_{l<=4d}(4eps+l) / prod_{l<=d}(eps+l)^4 for d = 0..trunc_q."""
    out = [eps_linear(0, 1, K)]
    for d in range(1, trunc_q + 1):
        num = eps_product([(4, l) for l in range(4 * d - 3, 4 * d + 1)], K)
        den = eps_inv(eps_product([(1, d)] * 4, K), K)
        out.append(eps_mul(eps_mul(out[-1], num, K), den, K))
    return tuple(out)


def i_function_quartic(trunc_q: int, trunc_eps: int = 3) -> CohSeries:
    """I_Q / (z e^(t eps)) = sum_d e^(dt) A_d(eps) with eps = P/z and eps^4 = 0."""
    if trunc_eps > 3 or trunc_eps < 0:
        raise TruncationError("eps^4 = 0 on P^3: trunc_eps must be between 0 and 3")
    if trunc_q < 0:
        raise TruncationError("trunc_q must be non-negative")
    series = CohSeries(trunc_q, trunc_eps)
    for d, a in enumerate(_quartic_terms(trunc_q, trunc_eps + 1)):
        for p, c in enumerate(a):
            if c:
                series.coeffs[(d, p, UNTWISTED)] = c
    return series


def f_coefficients(trunc: int) -> list[int]:
    """(4d)!/(d!)^4."""
    return [math.factorial(4 * d) // math.factorial(d) ** 4 for d in range(trunc + 1)]


def hypergeometric_3f2_coefficients(trunc: int) -> list[Fraction]:
    """Coefficients of 3F2(1/4, 2/4, 3/4; 1, 1; 4^4 x) in x."""
    out = [Q(1)]
    for d in range(1, trunc + 1):
        r = Q(256)
        for a in (Q(1, 4), Q(2, 4), Q(3, 4)):
            r *= a + d - 1
        out.append(out[-1] * r / Q(d) ** 3)
    return out


def qde_check(series: CohSeries, trunc: int | None = None, constant: int = 4 ** 4) -> Report:
    """Apply d_t^3 - constant e^t prod_{k=1..3}(d_t + k/4) to I_Q.

    On e^((d+eps)t) the operator d_t acts as d + eps.  The only term allowed
    to survive is eps^3 at d = 0, which is the class P^3 of the ideal.
    """
    trunc = series.trunc_q if trunc is None else min(trunc, series.trunc_q)
    K = series.trunc_eps + 1
    residual = {}
    for d in range(trunc + 1):
        cur = eps_mul(eps_product([(1, d)] * 3, K), series.eps_series(d), K)
        if d:
            prev = series.eps_series(d - 1)
            shifted = eps_product([(1, Q(d - 1) + Q(k, 4)) for k in (1, 2, 3)], K)
            cur = eps_add(cur, eps_mul(shifted, prev, K), -constant)
        for p, c in enumerate(cur):
            if c:
                residual[(d, p)] = c
    ideal = {key: c for key, c in residual.items() if key == (0, 3)}
    bad = {key: c for key, c in residual.items() if key != (0, 3)}
    first = min(bad) if bad else None
    return Report("qde", trunc, _max_abs(bad.values()), not bad,
                  {"constant": constant, "ideal_term": {str(k): str(v) for k, v in ideal.items()},
                   "first_nonzero": None if first is None else {"d": first[0], "eps_power": first[1],
                                                                 "value": str(bad[first])}})


# ---------------------------------------------------------------- mirror map


@dataclass(frozen=True)
class MirrorMap:
    """T = t + sum_{d>=1} t_d e^(dt);  J = I / F."""

    F: tuple
    G: tuple
    t_coeffs: tuple

    def j_leading(self) -> Fraction:
        return Q(self.F[0]) / self.F[0]


def series_divide(num: Sequence, den: Sequence, trunc: int) -> list[Fraction]:
    inv = eps_inv(den, trunc + 1)
    return list(eps_mul(num, inv, trunc + 1))


def mirror_map_quartic(trunc: int) -> MirrorMap:
    if trunc < 2:
        raise TruncationError("trunc must be at least 2")
    I = i_function_quartic(trunc, 1)
    F = tuple(I.eps_series(d)[0] for d in range(trunc + 1))
    G = tuple(I.eps_series(d)[1] for d in range(trunc + 1))
    t_coeffs = tuple(series_divide(G, F, trunc))
    return MirrorMap(F, G, t_coeffs)


def harmonic(n: int) -> Fraction:
    return sum((Q(1, k) for k in range(1, n + 1)), Q(0))


def g_coefficients(trunc: int) -> list[Fraction]:
    """Closed form of the eps^1 slice: (4d)!/(d!)^4 * 4 (H_4d - H_d)."""
    return [Q(f) * 4 * (harmonic(4 * d) - harmonic(d)) for d, f in enumerate(f_coefficients(trunc))]


def mirror_map_from_periods(trunc: int) -> list[Fraction]:
    """T - t from the Frobenius basis of the marginal quartic operator at b = infinity.

    With w = 1/b = 4^4 e^t (the substitution e^t = a^-4, b = a^4/4^4) the
    solutions there are w^(1/4) f0 and w^(1/4) (f0 log w + f1); hence
    f1/f0 = sum_d t_d (w/256)^d.
    """
    from .frobenius import frobenius_basis

    basis = frobenius_basis(sector_operator(3, (0, 0, 0, 0)), "inf", trunc)
    y0 = next(s for s in basis.solutions if s.log_degree == 0)
    y1 = next(s for s in basis.solutions if s.log_degree == 1)
    if list(y1.coeffs[1]) != list(y0.coeffs[0]):
        raise VerificationFailed("log solution is not normalised against the holomorphic one")
    ratio = series_divide(y1.coeffs[0], y0.coeffs[0], trunc)
    return [c * Q(256) ** d for d, c in enumerate(ratio)]


# ---------------------------------------------------------------- minimal quotient


def _label_min(k: Sequence[int]) -> Fraction:
    return Q((k[1] + 2 * k[2] + 3 * k[3]) % 4, 4)


def i_tw_minimal(trunc: int, trunc_eps: int = 3) -> CohSeries:
    """Twisted I-function of Q x B(mu_4), summed term by term over (d, k0..k3).

    Degrees are tuples (d, k0, k1, k2, k3) with every entry at most trunc; the
    label is the inertia component <(k1 + 2k2 + 3k3)/4>.  The monomial
    x^k / z^|k| is recorded by the degree tuple.
    """
    if trunc < 1:
        raise TruncationError("trunc must be at least 1")
    K = trunc_eps + 1
    out = CohSeries(trunc, trunc_eps)
    for d in range(trunc + 1):
        m = eps_product([(4, l) for l in range(1, 4 * d + 1)], K)
        i_part = eps_inv(eps_product([(1, l) for l in range(1, d + 1)] * 4, K), K)
        base = eps_mul(m, i_part, K)
        for k in itertools.product(range(trunc + 1), repeat=4):
            w = Q(1, math.prod(math.factorial(x) for x in k))
            for p, c in enumerate(base):
                if c:
                    out.coeffs[((d,) + k, p, _label_min(k))] = c * w
    return out


def exponential_factor(trunc: int) -> CohSeries:
    """sum_k prod x_j^k_j / (z^k_j k_j!) 1_<(k1+2k2+3k3)/4>, eps-free."""
    out = CohSeries(trunc, 0)
    for k in itertools.product(range(trunc + 1), repeat=4):
        out.coeffs[(k, 0, _label_min(k))] = Q(1, math.prod(math.factorial(x) for x in k))
    return out


def product_untwisted(untwisted: CohSeries, factor: CohSeries) -> CohSeries:
    """untwisted(t, eps) * factor(x) with labels taken from the factor."""
    trunc_eps = untwisted.trunc_eps + factor.trunc_eps
    out = CohSeries(min(untwisted.trunc_q, factor.trunc_q), trunc_eps)
    for (d, p, b), c in untwisted.coeffs.items():
        if b != UNTWISTED:
            raise ValueError("left factor must be untwisted")
        for (k, q, lab), e in factor.coeffs.items():
            key = ((d,) + tuple(k), p + q, lab)
            out.coeffs[key] = out.coeffs.get(key, 0) + c * e
    return out


def minimal_split_check(trunc: int = 6) -> Report:
    direct = i_tw_minimal(trunc)
    product = product_untwisted(i_function_quartic(trunc), exponential_factor(trunc))
    keys = set(direct.coeffs) | set(product.coeffs)
    diff = [direct.coeffs.get(k, 0) - product.coeffs.get(k, 0) for k in keys]
    norm = _max_abs(diff)
    return Report("i_tw_minimal_split", trunc, norm, norm == 0, {"terms": len(keys)})


# ---------------------------------------------------------------- maximal quotient


def _frac(x: Fraction) -> Fraction:
    return x - math.floor(x)


def _pochhammer_eps(f: Fraction, n: int, K: int) -> tuple:
    """(eps + f)_n for n >= 0."""
    return eps_product([(1, f + i) for i in range(n)], K)


def _gamma_ratio_eps(c: Fraction, K: int) -> tuple:
    """Gamma(eps + 1 - <-c>) / Gamma(eps + c + 1) as an exact eps series."""
    f = 1 - _frac(-c)
    n = c + 1 - f  # an integer, the ceiling of c
    n = int(n)
    if n >= 0:
        return eps_inv(_pochhammer_eps(f, n, K), K)
    return _pochhammer_eps(f + n, -n, K)


@dataclass(frozen=True)
class TwistedClass:
    """The part of I_tw,k with d = <k_j*/4> mod 1."""

    residue: Fraction
    label: tuple
    eps_order: int  # eps^eps_order = 0 on the ambient fixed component
    terms: tuple  # A(d) for d = residue, residue + 1, ...

    @property
    def degrees(self) -> list[Fraction]:
        return [self.residue + i for i in range(len(self.terms))]


def _normalise_k(k: Sequence[int]) -> tuple:
    k = tuple(int(x) for x in k)
    if len(k) != 4 or any(x < 0 for x in k):
        raise ValueError("k must be four non-negative integers")
    return k


def i_tw_maximal(k: Sequence[int], trunc: int) -> list[TwistedClass]:
    """I_tw,k split by the component j* with <d - k_j*/4> = 0.

    Each term is prod_j Gamma(eps+1-<k_j/4-d>)/Gamma(eps+d-k_j/4+1) times
    Gamma(4eps+4d+1)/Gamma(4eps+1), expanded exactly in eps up to the
    nilpotency order of the component.
    """
    if trunc < 1:
        raise TruncationError("trunc must be at least 1")
    k = _normalise_k(k)
    classes = []
    residues = sorted({Q(x % 4, 4) for x in k})
    for r in residues:
        K = sum(1 for x in k if Q(x % 4, 4) == r)
        label = tuple(_frac(Q(x, 4) - r) for x in k)
        terms = []
        for i in range(trunc + 1):
            d = r + i
            a = eps_linear(0, 1, K)
            for x in k:
                a = eps_mul(a, _gamma_ratio_eps(d - Q(x, 4), K), K)
            a = eps_mul(a, eps_product([(4, l) for l in range(1, int(4 * d) + 1)], K), K)
            terms.append(a)
        classes.append(TwistedClass(r, label, K, tuple(terms)))
    return classes


def i_tw_maximal_residual(k: Sequence[int], trunc: int) -> dict:
    """(prod_j(d_t - k_j/4) - 4^4 e^t prod_i(d_t + i/4)) I_tw,k, nonzero coefficients only."""
    k = _normalise_k(k)
    out = {}
    for cl in i_tw_maximal(k, trunc):
        K = cl.eps_order
        for i, d in enumerate(cl.degrees):
            cur = eps_mul(eps_product([(1, d - Q(x, 4)) for x in k], K), cl.terms[i], K)
            if i:
                prev = cl.terms[i - 1]
                cur = eps_add(cur, eps_mul(eps_product([(1, d - 1 + Q(j, 4)) for j in range(1, 5)], K),
                                           prev, K), -256)
            for p, c in enumerate(cur):
                if c:
                    out[(cl.residue, d, p)] = c
    return out


def twisted_operator(k: Sequence[int]) -> ThetaOperator:
    """prod_j(theta_t - k_j/4) - 4^4 e^t prod_{i=1..4}(theta_t + i/4), variable x = e^t."""
    k = _normalise_k(k)
    return ThetaOperator("t", [-Q(x, 4) for x in k], [Q(i, 4) for i in range(1, 5)], Q(256), 1)


def dictionary_operator(k: Sequence[int]) -> ThetaOperator:
    """The same operator after e^t = a^-4: theta_t + c becomes -(theta_a - 4c)/4.

    Multiplying on the left by -a^4 4^4 yields prod(theta_a - i) - a^4/4^4 prod(theta_a + k_j).
    """
    op = twisted_operator(k)
    return ThetaOperator("a", [-4 * u for u in op.upper_params], [-4 * l for l in op.lower_params],
                         Q(1, 256), 4)


def dictionary_matches(k: Sequence[int]) -> bool:
    """Parameter multisets agree with a o (operator of a . zeta[z^k Omega]) o a^-1."""
    return dictionary_operator(k) == pf_operator(3, k).twist(1)


def n_k(k: Sequence[int]) -> int:
    return 4 - len(set(_normalise_k(k)))


def reduced_twisted_operator(k: Sequence[int]) -> ThetaOperator:
    return reduce(twisted_operator(k))[0]


def _mod1(params) -> Counter:
    return Counter(_frac(Q(p)) for p in params)


def shift_matches(k: Sequence[int]) -> bool:
    """k + (1,1,1,1) gives the e^(-t/4) twist of the reduced operator, parameters mod 1.

    The shift is the diagonal group action, so the shifted k is read mod 4.
    """
    k = _normalise_k(k)
    a = reduced_twisted_operator(k).twist(Q(1, 4))
    b = reduced_twisted_operator(tuple((x + 1) % 4 for x in k))
    return (a.order == b.order and _mod1(a.lower_params) == _mod1(b.lower_params)
            and _mod1(a.upper_params) == _mod1(b.upper_params))


def orbit_representatives(max_entry: int = 4) -> list[tuple]:
    """Non-decreasing k with entries 0..max_entry (70 for max_entry = 4)."""
    return list(itertools.combinations_with_replacement(range(max_entry + 1), 4))


def maximal_quotient_report(trunc: int = 12) -> Report:
    bad = {}
    for k in orbit_representatives():
        res = i_tw_maximal_residual(k, trunc)
        if res:
            bad[k] = min(res)
    order_mismatch = [k for k in itertools.product(range(4), repeat=4)
                      if n_k(k) != sector_operator(3, k).order
                      or n_k(k) != reduced_twisted_operator(k).order]
    dictionary_fail = [k for k in itertools.product(range(4), repeat=4) if not dictionary_matches(k)]
    shift_fail = [k for k in orbit_representatives(3) if not shift_matches(k)]
    ok = not (bad or order_mismatch or dictionary_fail or shift_fail)
    return Report("i_tw_maximal", trunc, Q(len(bad)), ok,
                  {"representatives": len(orbit_representatives()),
                   "ode_failures": [list(k) for k in bad],
                   "order_mismatches": [list(k) for k in order_mismatch],
                   "dictionary_failures": [list(k) for k in dictionary_fail],
                   "shift_failures": [list(k) for k in shift_fail]})


# ---------------------------------------------------------------- Chen-Ruan census


def chen_ruan_census() -> dict:
    """Ambient contributions of the inertia components of Q/G, G = (Z/4)^4 / diagonal.

    For each g the fixed locus in P^3 is a union of projectivised eigenspaces.
    An eigenspace of dimension c meets the quartic in a hypersurface of
    P^(c-1) whose ambient cohomology has rank c - 1 (zero for a point, which
    misses the Fermat quartic).
    """
    seen = set()
    census = Counter()
    total = 0
    for g in itertools.product(range(4), repeat=4):
        rep = tuple((x - g[0]) % 4 for x in g)
        if rep in seen:
            continue
        seen.add(rep)
        for c in Counter(rep).values():
            if c >= 2:
                census[c - 1] += 1
                total += c - 1
    return {"components": dict(sorted(census.items())), "group_order": len(seen), "total": total}


def chen_ruan_dimension() -> int:
    return chen_ruan_census()["total"]


# ---------------------------------------------------------------- Yamaguchi-Yau


class LogPoly:
    """sum_j log(z)^j f_j(z) with f_j dense exact power series of length N."""

    __slots__ = ("N", "parts")

    def __init__(self, N: int, parts: dict | None = None):
        self.N = N
        self.parts = {j: list(f) for j, f in (parts or {}).items() if any(f)}

    @classmethod
    def series(cls, coeffs: Sequence, N: int) -> "LogPoly":
        f = [Q(c) for c in coeffs[:N]] + [Q(0)] * max(0, N - len(coeffs))
        return cls(N, {0: f})

    def __add__(self, other):
        other = self._coerce(other)
        parts = {j: list(f) for j, f in self.parts.items()}
        for j, f in other.parts.items():
            g = parts.setdefault(j, [Q(0)] * self.N)
            for i, c in enumerate(f):
                g[i] += c
        return LogPoly(self.N, parts)

    __radd__ = __add__

    def __neg__(self):
        return LogPoly(self.N, {j: [-c for c in f] for j, f in self.parts.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def _coerce(self, x):
        if isinstance(x, LogPoly):
            return x
        return LogPoly.series([Q(x)], self.N)

    def __mul__(self, other):
        if not isinstance(other, LogPoly):
            c = Q(other)
            return LogPoly(self.N, {j: [c * x for x in f] for j, f in self.parts.items()})
        parts = {}
        for i, f in self.parts.items():
            for j, g in other.parts.items():
                h = parts.setdefault(i + j, [Q(0)] * self.N)
                for a, x in enumerate(f):
                    if x:
                        for b in range(self.N - a):
                            h[a + b] += x * g[b]
        return LogPoly(self.N, parts)

    __rmul__ = __mul__

    def inverse(self) -> "LogPoly":
        if set(self.parts) - {0}:
            raise ValueError("only log-free series can be inverted")
        return LogPoly(self.N, {0: list(eps_inv(self.parts[0], self.N))})

    def __truediv__(self, other):
        other = self._coerce(other)
        return self * other.inverse()

    def theta(self) -> "LogPoly":
        parts = {}
        for j, f in self.parts.items():
            g = parts.setdefault(j, [Q(0)] * self.N)
            for k, c in enumerate(f):
                g[k] += k * c
            if j:
                h = parts.setdefault(j - 1, [Q(0)] * self.N)
                for k, c in enumerate(f):
                    h[k] += j * c
        return LogPoly(self.N, parts)

    def truncated(self, order: int) -> dict:
        """Nonzero coefficients (log power, z power) with z power <= order."""
        return {(j, k): c for j, f in self.parts.items() for k, c in enumerate(f[:order + 1]) if c}

    def is_log_free(self) -> bool:
        return set(self.parts) <= {0}


@dataclass
class YYState:
    """Quintic periods and the Yamaguchi-Yau generators; ' is theta = z d/dz."""

    N: int
    I: tuple  # I0..I3 as LogPoly
    T: LogPoly
    I20: LogPoly
    I30: LogPoly
    C: LogPoly
    E: LogPoly  # 5^5 z / (1 - 5^5 z)

    @property
    def A(self) -> tuple:
        """theta^j I0 / I0 for j = 1..4."""
        i0 = self.I[0]
        inv = i0.inverse()
        out, cur = [], i0
        for _ in range(4):
            cur = cur.theta()
            out.append(cur * inv)
        return tuple(out)


def _geometric(first, ratio, N: int, start: int = 0) -> list[Fraction]:
    return [Q(0)] * start + [Q(first) * Q(ratio) ** i for i in range(N - start)]


def yy_state(trunc: int) -> YYState:
    from .frobenius import frobenius_basis

    N = trunc + 1
    basis = frobenius_basis(quintic_operator(), 0, trunc)
    sols = sorted(basis.solutions, key=lambda s: s.log_degree)
    I = tuple(LogPoly(N, {j: list(row[:N]) for j, row in enumerate(s.coeffs)}) for s in sols)
    inv0 = I[0].inverse()
    C = LogPoly.series(_geometric(5, 5 ** 5, N), N)
    E = LogPoly.series(_geometric(5 ** 5, 5 ** 5, N, 1), N)
    return YYState(N, I, I[1] * inv0, I[2] * inv0 * 5, I[3] * inv0 * 5, C, E)


def yy_relations(state: YYState, coupling: str = "C") -> dict[str, LogPoly]:
    """Residuals of the three relations (LHS - RHS), theta derivatives throughout.

    coupling selects the rational function in the third relation: "C" for
    5/(1 - 5^5 z) and "eps" for 5^5 z/(1 - 5^5 z).  Relation 1 is returned in
    its printed form under "1" and in Wronskian form under "1w".
    """
    T, I20, I30 = state.T, state.I20, state.I30
    Tp = T.theta()
    Tpp = Tp.theta()
    Tppp = Tpp.theta()
    I20p = I20.theta()
    A1, A2 = state.A[0], state.A[1]
    X = state.C if coupling == "C" else state.E
    Xp = X.theta()
    i0sq = (state.I[0] * state.I[0])
    r1 = I30.theta() - (I20 * (-2) + T * I20)
    r1w = I30.theta() - (T * I20p - I20 * Tp)
    r2 = I20p.theta() - (I20p * Tpp / Tp + state.C / (i0sq * Tp))
    r3 = Tppp - (Tpp * (A1 * (-2) + X) + Tp * (A2 * (-4) + A1 * A1 * 2 - Xp + A1 * X * 2 + X * X + X * Q(7, 5)))
    return {"1": r1, "1w": r1w, "2": r2, "3": r3}


def yy_closure(state: YYState) -> dict[str, LogPoly]:
    """theta of each generator minus its rewriting as a polynomial in the generators over Q(z).

    Generators: A1, A2, A3 (theta^j I0 / I0) and B = T''/T'.  A4 comes from the
    Picard-Fuchs equation and T''' from the third relation with 5^5 z/(1 - 5^5 z).
    The C(z)-algebra they generate is the one generated by the d/dz versions.
    """
    A1, A2, A3, A4 = state.A
    E = state.E
    Tp = state.T.theta()
    B = Tp.theta() / Tp
    a4 = E * (A3 * 2 + A2 * Q(7, 5) + A1 * Q(2, 5) + Q(24, 625))
    t3_over_t1 = B * (A1 * (-2) + E) + (A2 * (-4) + A1 * A1 * 2 - E.theta() + A1 * E * 2 + E * E + E * Q(7, 5))
    return {
        "A4": A4 - a4,
        "A1": A1.theta() - (A2 - A1 * A1),
        "A2": A2.theta() - (A3 - A1 * A2),
        "A3": A3.theta() - (a4 - A1 * A3),
        "B": B.theta() - (t3_over_t1 - B * B),
    }


def yy_check(trunc: int = 20) -> dict:
    """Relation residuals through z^trunc, for the literal and corrected forms.

    The periods are built four orders deeper than checked so that every
    coefficient compared is exact.
    """
    if trunc < 10:
        raise TruncationError("trunc must be at least 10")
    state = yy_state(trunc + 4)
    order = trunc
    literal = yy_relations(state, "C")
    corrected = yy_relations(state, "eps")
    closure = yy_closure(state)

    def summary(res: LogPoly):
        t = res.truncated(order)
        first = min(t) if t else None
        return {"residual_norm": str(_max_abs(t.values())), "zero": not t,
                "first_nonzero": None if first is None else {"log_power": first[0], "z_power": first[1],
                                                             "value": str(t[first])}}

    out = {
        "trunc": trunc,
        "C_at_0": str(state.C.parts[0][0]),
        "I0_z1": str(state.I[0].parts[0][1]),
        "literal": {"1": summary(literal["1"]), "2": summary(literal["2"]), "3": summary(literal["3"])},
        "corrected": {"1": summary(literal["1w"]), "2": summary(literal["2"]), "3": summary(corrected["3"])},
        "closure": {name: summary(r) for name, r in closure.items()},
    }
    out["literal_pass"] = all(v["zero"] for v in out["literal"].values())
    out["corrected_pass"] = all(v["zero"] for v in out["corrected"].values())
    out["closure_pass"] = all(v["zero"] for v in out["closure"].values())
    return out
