"""Hypergeometric theta-form operators for the Fermat sectors.

An operator is stored by its parameter multisets:

    L(theta) - scale * x^power * U(theta),
    L = prod (theta + l),  U = prod (theta + u).

For the sector m of the degree n+1 Fermat polynomial the operator in the
deformation parameter a has lower parameters i - n (i = 0..n), upper
parameters m_i + 1, scale (n+1)^-(n+1) and power n+1.  Substituting
b = a^(n+1)/(n+1)^(n+1) divides all parameters by n+1.  In the b-form a
pair u = l + 1 factors off on the left, since (theta + l) b = b (theta + l + 1).
"""

from __future__ import annotations

import logging
import random
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from . import series as S
from .errors import DimensionError, NotCanonicalForm, OrderError, VerificationFailed
from .sectors import sector_grading

log = logging.getLogger(__name__)

VARIABLES = ("a", "b", "z", "t", "w")


def _params(xs: Iterable) -> tuple[Fraction, ...]:
    return tuple(sorted(Fraction(x) for x in xs))


def _fmt_frac(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class ThetaOperator:
    variable: str
    lower_params: tuple[Fraction, ...]
    upper_params: tuple[Fraction, ...]
    scale: Fraction = Fraction(1)
    monomial_power: int = 1

    def __post_init__(self):
        object.__setattr__(self, "lower_params", _params(self.lower_params))
        object.__setattr__(self, "upper_params", _params(self.upper_params))
        object.__setattr__(self, "scale", Fraction(self.scale))
        if self.variable not in VARIABLES:
            raise ValueError(f"unknown variable {self.variable!r}")
        if len(self.lower_params) != len(self.upper_params):
            raise OrderError("lower and upper parameter multisets must have equal size")
        if self.monomial_power < 1:
            raise ValueError("monomial_power must be positive")

    @property
    def order(self) -> int:
        return len(self.lower_params)

    @property
    def is_b_form(self) -> bool:
        return self.monomial_power == 1

    def L(self) -> list[Fraction]:
        return S.poly_from_roots(self.lower_params)

    def U(self) -> list[Fraction]:
        return S.poly_from_roots(self.upper_params)

    def recurrence_terms(self) -> dict[int, list[Fraction]]:
        """Operator as {shift r: coefficients of P_r(theta)} meaning sum x^r P_r(theta)."""
        return {0: self.L(), self.monomial_power: [-self.scale * c for c in self.U()]}

    # -- transformations -------------------------------------------------

    def twist(self, c) -> "ThetaOperator":
        """x^c o op o x^-c: every parameter decreases by c."""
        c = Fraction(c)
        return ThetaOperator(self.variable, [l - c for l in self.lower_params],
                             [u - c for u in self.upper_params], self.scale, self.monomial_power)

    def rescaled(self, variable: str | None = None) -> "ThetaOperator":
        """Absorb the scale into the variable so that the operator reads L - x'^p U."""
        return ThetaOperator(variable or self.variable, self.lower_params, self.upper_params,
                             Fraction(1), self.monomial_power)

    def at_infinity(self, variable: str = "w") -> "ThetaOperator":
        """Same operator in w = 1/x (b-form only); lower and upper swap with a sign."""
        if not self.is_b_form:
            raise NotCanonicalForm("inversion implemented for monomial_power 1 only")
        return ThetaOperator(variable, [-u for u in self.upper_params],
                             [-l for l in self.lower_params], 1 / self.scale, 1)

    def apply(self, terms) -> dict:
        """Apply to an exact log-power series."""
        lt = S.apply_theta_poly(self.L(), terms)
        ut = S.apply_theta_poly(self.U(), terms)
        return S.sub(lt, S.scale(S.shift(ut, self.monomial_power), self.scale))

    # -- presentation ----------------------------------------------------

    def _factors(self, params: Sequence[Fraction]) -> str:
        th = f"θ_{self.variable}" if self.variable not in ("b",) else "θ"
        counts = Counter(params)
        parts = []
        for p in sorted(counts):
            if p == 0:
                base = th
            else:
                sign = "+" if p > 0 else "-"
                base = f"({th}{sign}{_fmt_frac(abs(p))})"
            parts.append(base if counts[p] == 1 else f"{base}^{counts[p]}")
        return "".join(parts) if parts else "1"

    def pretty(self) -> str:
        x = self.variable
        mono = x if self.monomial_power == 1 else f"{x}^{self.monomial_power}"
        coef = "" if self.scale == 1 else f"{_fmt_frac(self.scale)}·"
        return f"{self._factors(self.lower_params)} - {coef}{mono}·{self._factors(self.upper_params)}"

    __str__ = pretty

    def to_json(self) -> dict:
        return {
            "variable": self.variable,
            "lower_params": [_fmt_frac(x) for x in self.lower_params],
            "upper_params": [_fmt_frac(x) for x in self.upper_params],
            "scale": _fmt_frac(self.scale),
            "monomial_power": self.monomial_power,
            "order": self.order,
            "pretty": self.pretty(),
        }

    @classmethod
    def from_json(cls, d: dict) -> "ThetaOperator":
        return cls(d["variable"], [Fraction(x) for x in d["lower_params"]],
                   [Fraction(x) for x in d["upper_params"]], Fraction(d["scale"]),
                   int(d["monomial_power"]))


@dataclass(frozen=True)
class ReductionCertificate:
    cancelled_pairs: tuple[tuple[Fraction, Fraction], ...]  # (lower l, upper u) with u = l + 1
    reduced_order: int
    original_order: int

    def to_json(self) -> dict:
        return {
            "cancelled_pairs": [[_fmt_frac(l), _fmt_frac(u)] for l, u in self.cancelled_pairs],
            "reduced_order": self.reduced_order,
            "original_order": self.original_order,
        }


# ---------------------------------------------------------------- constructors


def pf_operator(n: int, m: Sequence[int]) -> ThetaOperator:
    """Unreduced operator in the variable a annihilating the sector-m periods."""
    if len(m) != n + 1:
        raise DimensionError(f"expected {n + 1} exponents, got {len(m)}")
    if any(int(x) < 0 for x in m):
        raise DimensionError("exponents must be non-negative")
    return ThetaOperator("a", [i - n for i in range(n + 1)], [int(x) + 1 for x in m],
                         Fraction(1, (n + 1) ** (n + 1)), n + 1)


def base_change_to_b(op: ThetaOperator) -> ThetaOperator:
    if op.variable == "b" and op.is_b_form:
        return op
    if op.variable != "a":
        raise NotCanonicalForm(f"base change expects the variable a, got {op.variable}")
    k = op.monomial_power
    if op.scale != Fraction(1, k ** k):
        raise NotCanonicalForm("a-form scale must be (n+1)^-(n+1)")
    return ThetaOperator("b", [l / k for l in op.lower_params], [u / k for u in op.upper_params],
                         Fraction(1), 1)


def to_a_form(op: ThetaOperator, n: int) -> ThetaOperator:
    """Inverse of base_change_to_b for a b-form operator of a degree n+1 sector."""
    if not (op.variable == "b" and op.is_b_form and op.scale == 1):
        raise NotCanonicalForm("expected b-form with unit scale")
    k = n + 1
    return ThetaOperator("a", [l * k for l in op.lower_params], [u * k for u in op.upper_params],
                         Fraction(1, k ** k), k)


def reduce(op: ThetaOperator) -> tuple[ThetaOperator, ReductionCertificate]:
    """Cancel every left factor (theta + l) with a matching upper parameter u = l + 1.

    Pairs are removed smallest lower parameter first, which fixes the
    certificate; the reduced operator itself is a multiset difference.
    """
    if not op.is_b_form:
        raise NotCanonicalForm("reduce expects monomial_power 1 (the b variable)")
    lower = list(op.lower_params)
    upper = Counter(op.upper_params)
    kept_lower = []
    pairs = []
    for l in sorted(lower):
        if upper[l + 1] > 0:
            upper[l + 1] -= 1
            pairs.append((l, l + 1))
        else:
            kept_lower.append(l)
    kept_upper = sorted(upper.elements())
    reduced = ThetaOperator(op.variable, kept_lower, kept_upper, op.scale, 1)
    cert = ReductionCertificate(tuple(pairs), reduced.order, op.order)
    log.debug("reduced %s -> %s", op.pretty(), reduced.pretty())
    return reduced, cert


def sector_operator(n: int, m: Sequence[int]) -> ThetaOperator:
    """Reduced b-form operator of the sector m."""
    return reduce(base_change_to_b(pf_operator(n, m)))[0]


def expected_reduced_order(n: int, m: Sequence[int]) -> int:
    return (n + 1) - len({int(x) + 1 for x in m})


def admissible_deltas(n: int, m: Sequence[int]) -> list[int]:
    """delta in 0..n with delta + m_i + 1 nonzero mod n+1 for every i."""
    return [d for d in range(n + 1) if all((d + int(x) + 1) % (n + 1) for x in m)]


def quintic_operator() -> ThetaOperator:
    """theta^4 - 5^5 z prod_k (theta + k/5) in the standard quintic variable z."""
    return ThetaOperator("z", [0, 0, 0, 0], [Fraction(k, 5) for k in range(1, 5)], Fraction(5 ** 5), 1)


def quintic_from_sector() -> ThetaOperator:
    """The n=4, m=0 sector operator moved to b = infinity and twisted by w^(1/5).

    Agrees with quintic_operator().rescaled("w") where w = 5^5 z = 1/b.
    """
    op = sector_operator(4, (0, 0, 0, 0, 0)).at_infinity("w")
    return op.twist(Fraction(-1, 5))


# ---------------------------------------------------------------- shift relation


def _a_form_unreduced(n: int, m: Sequence[int]) -> ThetaOperator:
    return pf_operator(n, m)


def _d_da(terms) -> dict:
    """d/da = a^-1 theta."""
    return S.shift(S.theta(terms), -1)


def shift_relation_check(n: int, m: Sequence[int], trunc: int = 40, seed: int = 0) -> bool:
    """Check D_{m+1} o d/da = a^-1 (theta - n - 1) o D_m on exact series.

    Both sides are applied to a random rational series a^rho sum c_k a^k
    (rho generic rational) and to every Frobenius solution of the reduced
    D_m; the images of the solutions under d/da must be annihilated by the
    reduced D_{m+1} through order trunc.
    """
    from .frobenius import frobenius_basis

    if trunc < 10:
        raise ValueError("trunc must be at least 10")
    sector_grading(m, n)  # validates the length
    m = tuple(int(x) for x in m)
    m1 = tuple(x + 1 for x in m)
    dm = _a_form_unreduced(n, m)
    dm1 = _a_form_unreduced(n, m1)
    rng = random.Random(seed)
    rho = Fraction(rng.randint(1, 97), 101)
    generic = {(rho + k, 0): Fraction(rng.randint(-50, 50), rng.randint(1, 20)) for k in range(trunc)}
    generic[(rho, 1)] = Fraction(3, 7)  # a log term exercises the theta-log rule
    lhs = dm1.apply(_d_da(generic))
    rhs_inner = dm.apply(generic)
    rhs = S.shift(S.sub(S.theta(rhs_inner), S.scale(rhs_inner, n + 1)), -1)
    diff = S.sub(lhs, rhs)
    if diff:
        key = min(diff)
        raise VerificationFailed(f"operator identity fails at a^{key[0]} log^{key[1]}: {diff[key]}")

    # solution-level isomorphism for the reduced operators
    red_m = to_a_form(sector_operator(n, m), n)
    red_m1 = to_a_form(sector_operator(n, m1), n)
    basis = frobenius_basis(red_m, 0, trunc)
    images = []
    for sol in basis.solutions:
        # the truncated series is exact through a^(exponent + trunc)
        limit = sol.exponent + sol.trunc - 1
        image = _d_da(sol.terms())
        residual = S.truncate(red_m1.apply(image), limit - 1)
        if residual:
            key = min(residual)
            raise VerificationFailed(f"d/da image of {sol.exponent} not annihilated at a^{key[0]}")
        images.append(S.truncate(image, limit))
    nonzero = [im for im in images if im]
    leading = {min(im) for im in nonzero}
    if len(leading) != len(nonzero):
        raise VerificationFailed("images of the solution basis are linearly dependent")
    return True


# ---------------------------------------------------------------- symmetric powers


def symmetric_power(op: ThetaOperator, k: int) -> ThetaOperator:
    """Operator annihilating all degree-k products of solutions of op.

    Order-1 operators give order 1 (parameters scale by k).  For order 2 the
    derivatives theta^j(y^k) are expressed in the basis y^(k-i) (theta y)^i over
    Q(x) and the linear dependency among j = 0..k+1 is returned in
    hypergeometric form.
    """
    import sympy as sp

    if k < 1:
        raise OrderError("k must be positive")
    if not op.is_b_form:
        raise NotCanonicalForm("symmetric_power expects a b-form operator")
    if op.order == 1:
        return ThetaOperator(op.variable, [k * l for l in op.lower_params],
                             [k * u for u in op.upper_params], op.scale, 1)
    if op.order != 2:
        raise OrderError(f"symmetric_power implemented for orders 1 and 2, got {op.order}")
    if k == 1:
        return op
    x = sp.Symbol("x")
    L = [sp.Rational(c.numerator, c.denominator) for c in op.L()]
    U = [sp.Rational(c.numerator, c.denominator) for c in op.U()]
    s = sp.Rational(op.scale.numerator, op.scale.denominator)
    a = [sp.expand(L[i] - s * x * U[i]) for i in range(3)]  # a2 theta^2 + a1 theta + a0

    def th(expr):
        return sp.together(x * sp.diff(expr, x))

    def theta_vec(vec):
        # vec[i] is the coefficient of Y_i = y^(k-i) (theta y)^i
        out = [sp.Integer(0)] * (k + 1)
        for i, c in enumerate(vec):
            if c == 0:
                continue
            out[i] += th(c)
            if i < k:
                out[i + 1] += c * (k - i)
            if i > 0:
                # i * y^(k-i) (theta y)^(i-1) * theta^2 y, theta^2 y = -(a1 theta y + a0 y)/a2
                out[i] += -c * i * a[1] / a[2]
                out[i - 1] += -c * i * a[0] / a[2]
        return [sp.cancel(t) for t in out]

    vecs = [[sp.Integer(1)] + [sp.Integer(0)] * k]
    for _ in range(k + 1):
        vecs.append(theta_vec(vecs[-1]))
    mat = sp.Matrix(k + 1, k + 2, lambda r, c: vecs[c][r])
    null = mat.nullspace()
    if len(null) != 1:
        raise VerificationFailed("symmetric power does not have the expected order")
    v = null[0]
    v = v / v[k + 1]
    den = sp.lcm([sp.fraction(sp.cancel(t))[1] for t in v])
    coeffs = [sp.Poly(sp.cancel(t * den), x) for t in v]
    if any(c.degree() > 1 for c in coeffs):
        raise VerificationFailed("symmetric power is not of hypergeometric shape")
    lead = coeffs[k + 1]
    l_poly = [c.coeff_monomial(1) for c in coeffs]
    u_poly = [-c.coeff_monomial(x) for c in coeffs]
    l0 = lead.coeff_monomial(1)
    t = sp.Symbol("t")
    lp = sp.Poly(sum(c * t ** i for i, c in enumerate(l_poly)) / l0, t)
    u_lead = u_poly[k + 1]
    up = sp.Poly(sum(c * t ** i for i, c in enumerate(u_poly)) / u_lead, t)
    new_scale = u_lead / l0
    lower = _rational_roots(lp)
    upper = _rational_roots(up)
    return ThetaOperator(op.variable, [-r for r in lower], [-r for r in upper],
                         Fraction(int(sp.numer(new_scale)), int(sp.denom(new_scale))), 1)


def _rational_roots(poly) -> list[Fraction]:
    import sympy as sp

    roots = sp.roots(poly, multiple=True)
    if len(roots) != poly.degree() or any(not r.is_rational for r in roots):
        raise VerificationFailed(f"polynomial {poly} does not split over Q")
    return [Fraction(int(r.p), int(r.q)) for r in roots]
