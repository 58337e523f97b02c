"""Marginal quartic sector: symmetric-square structure, a quadratic hypergeometric
transformation, connection constants, and the integral K3 monodromy triple.

Operators used here (b-form):

    D_quartic     theta(theta - 1/4)(theta - 1/2) - b (theta + 1/4)^3
    D_triangular  theta(theta - 1/4) - b (theta + 1/8)^2
    twisted       b^(1/4) o D_quartic o b^(-1/4)  and  b^(1/8) o D_triangular o b^(-1/8)
    elliptic      theta_t(theta_t - 1/2) - t (theta_t + 1/4)^2, twisted by t^(1/4)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath as mp

from . import constants
from . import series as S
from .frobenius import eval_rgs, frobenius_basis, indicial_roots
from .monodromy import charpoly_distance, continue_basis, monodromy_rep, refine
from .numeric import (GUARD_BITS, exact_identity, exact_matmul, exact_power, exact_transpose,
                      gamma, resolve_precision, to_mp)
from .pfode import ThetaOperator, sector_operator, symmetric_power

Q = Fraction

D_QUARTIC = sector_operator(3, (0, 0, 0, 0))
D_TRIANGULAR = ThetaOperator("b", [0, Q(-1, 4)], [Q(1, 8), Q(1, 8)])
QUARTIC_TWISTED = D_QUARTIC.twist(Q(1, 4))
TRIANGULAR_TWISTED = D_TRIANGULAR.twist(Q(1, 8))
ELLIPTIC = ThetaOperator("t", [0, Q(-1, 2)], [Q(1, 4), Q(1, 4)])
ELLIPTIC_TWISTED = ELLIPTIC.twist(Q(1, 4))


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    residual: object = None
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        res = self.residual
        if res is not None and not isinstance(res, (int, str)):
            res = mp.nstr(res, 10) if isinstance(res, (mp.mpf, mp.mpc)) else str(res)
        return {"name": self.name, "verdict": "pass" if self.passed else "fail",
                "residual_norm": res, **self.detail}


# ---------------------------------------------------------------- Taylor jets
# A jet is a list [y_0, ..., y_{K-1}] of Taylor coefficients at a point.


def _jet_mul(a, b):
    K = len(a)
    return [mp.fsum(a[i] * b[k - i] for i in range(k + 1)) for k in range(K)]


def _jet_compose(derivs, inner):
    """f(g) where derivs[j] = f^(j)(g_0) and inner is the jet of g."""
    K = len(inner)
    h = [mp.mpc(0)] + list(inner[1:])
    out = [mp.mpc(0)] * K
    power = [mp.mpc(1)] + [mp.mpc(0)] * (K - 1)
    for j in range(K):
        coef = derivs[j] / math.factorial(j)
        for k in range(K):
            out[k] += coef * power[k]
        power = _jet_mul(power, h)
    return out


def _hyp_derivs(a, b, c, x, K, prec):
    """d^j/dx^j 2F1(a, b; c; x) for j < K."""
    out = []
    coef = mp.mpf(1)
    for j in range(K):
        val = eval_rgs([a + j, b + j], [c + j, 1], x, precision=prec).value
        out.append(coef * val)
        coef *= (a + j) * (b + j) / (c + j)
    return out


def _inner_jet(kind: str, b0, K):
    """Jet of x(b) = 1/b ('inv') or 1 - 1/b ('comp') at b0."""
    jet = [(-1) ** k / b0 ** (k + 1) for k in range(K)]
    if kind == "comp":
        jet = [1 - jet[0]] + [-v for v in jet[1:]]
    return jet


def _power_derivs(x0, e, K):
    out, coef = [], mp.mpf(1)
    for j in range(K):
        out.append(coef * mp.power(x0, e - j))
        coef *= e - j
    return out


def hyp_jet(a, b, c, kind: str, b0, K: int, prefactor_power=None, precision: int | None = None):
    """Jet in b at b0 of x^p 2F1(a, b; c; x) with x = 1/b or 1 - 1/b."""
    prec = resolve_precision(precision)
    with mp.workprec(prec + GUARD_BITS):
        b0 = mp.mpc(b0)
        inner = _inner_jet(kind, b0, K)
        x0 = inner[0]
        jet = _jet_compose(_hyp_derivs(to_mp(a), to_mp(b), to_mp(c), x0, K, prec + GUARD_BITS), inner)
        if prefactor_power is not None:
            jet = _jet_mul(jet, _jet_compose(_power_derivs(x0, to_mp(prefactor_power), K), inner))
        return jet


def _theta_jet(jet, b0):
    """Jet of b d/db y at b0 (one order shorter)."""
    d = [(k + 1) * jet[k + 1] for k in range(len(jet) - 1)]
    return [b0 * d[k] + (d[k - 1] if k else 0) for k in range(len(d))]


def apply_operator_to_jet(op: ThetaOperator, jet, b0):
    """Value at b0 of op applied to the function with the given Taylor jet (b-form, power 1)."""
    L, U = op.L(), op.U()
    th, cur = [], list(jet)
    for _ in range(len(L)):
        th.append(cur[0])
        cur = _theta_jet(cur, b0)
    lval = mp.fsum(to_mp(c) * th[i] for i, c in enumerate(L))
    uval = mp.fsum(to_mp(c) * th[i] for i, c in enumerate(U))
    return lval - to_mp(op.scale) * b0 * uval


# ---------------------------------------------------------------- constants


def connection_constants(precision: int | None = None) -> dict:
    """c1, c2 and the normalisations kappa_E = i/sqrt 2, kappa = 2 c1 kappa_E."""
    prec = resolve_precision(precision)
    with mp.workprec(prec + GUARD_BITS):
        half, e58, e78 = mp.mpf(1) / 2, mp.mpf(5) / 8, mp.mpf(7) / 8
        c1 = gamma(half, prec + GUARD_BITS) / (gamma(e58, prec + GUARD_BITS) * gamma(e78, prec + GUARD_BITS))
        c2 = gamma(-half, prec + GUARD_BITS) / (gamma(mp.mpf(1) / 8, prec + GUARD_BITS)
                                               * gamma(mp.mpf(3) / 8, prec + GUARD_BITS))
        kappa_e = mp.mpc(0, 1) / mp.sqrt(2)
        kappa = 2 * c1 * kappa_e
        kappa_alt = -gamma(mp.mpf(1) / 8) * gamma(mp.mpf(3) / 8) / (2 * mp.pi * mp.mpc(0, 1) * gamma(half))
    with mp.workprec(prec):
        return {"c1": +c1, "c2": +c2, "kappa_E": +kappa_e, "kappa": +kappa, "kappa_gamma": +kappa_alt}


def v_jets(b0, K: int = 4, precision: int | None = None) -> dict:
    """Jets of v1, v2, v6 (solutions of the twisted triangular operator) at b0."""
    prec = resolve_precision(precision)
    return {
        "v1": hyp_jet(Q(1, 8), Q(3, 8), 1, "inv", b0, K, None, prec),
        "v2": hyp_jet(Q(1, 8), Q(3, 8), Q(1, 2), "comp", b0, K, None, prec),
        "v6": hyp_jet(Q(7, 8), Q(5, 8), Q(3, 2), "comp", b0, K, Q(1, 2), prec),
    }


def connection_check(b0=2, precision: int | None = None) -> Check:
    """v1 = c1 v2 + c2 v6 two ways: direct series at b0, and by ODE continuation.

    The continuation route carries the holomorphic solution at infinity,
    which is v1, from b = 4 to b = 3/2 and reads off its coordinates in the
    Frobenius basis at 1.  On 1 < b there v2 is the holomorphic solution and
    v6 = -i (1-b)^(1/2)(1 + ...) with the principal square root.
    """
    prec = resolve_precision(precision)
    k = connection_constants(prec)
    with mp.workprec(prec + GUARD_BITS):
        v = v_jets(mp.mpf(b0), 1, prec)
        direct = abs(v["v1"][0] - (k["c1"] * v["v2"][0] + k["c2"] * v["v6"][0]))
        op = TRIANGULAR_TWISTED
        src = frobenius_basis(op, "inf", 8)
        dst = frobenius_basis(op, 1, 8)
        path = refine([mp.mpf(4), mp.mpf(3) / 2])
        C = continue_basis(op, src, path, dst, prec)
        col = next(i for i, s in enumerate(src.solutions) if s.exponent == 0 and s.log_degree == 0)
        rows = {s.exponent: i for i, s in enumerate(dst.solutions)}
        a = C[rows[Q(0)], col]
        bcoef = C[rows[Q(1, 2)], col]
        cont = max(abs(a - k["c1"]), abs(bcoef - k["c2"] * mp.mpc(0, -1)))
        kappa_gap = abs(k["kappa"] - k["kappa_gamma"])
    residual = max(direct, cont, kappa_gap)
    ok = residual < mp.mpf(10) ** -35 and mp.im(k["c2"]) == 0 and k["c2"] < 0
    return Check("connection_constants", bool(ok), residual,
                 {"direct": mp.nstr(direct, 5), "continuation": mp.nstr(cont, 5),
                  "kappa_identity": mp.nstr(kappa_gap, 5), "c1": mp.nstr(k["c1"], 30),
                  "c2": mp.nstr(k["c2"], 30)})


# ---------------------------------------------------------------- Clausen


def clausen_check(trunc: int = 40, samples=(2, 3, Q(5, 2)), precision: int | None = None) -> Check:
    """Sym^2 of the triangular operator is the quartic one, checked three ways.

    * parameters: symmetric_power(D_triangular, 2) == D_quartic, and the same for
      the twisted pair;
    * exact series: every product of two Frobenius solutions of D_triangular at 0
      is annihilated by D_quartic through b^trunc;
    * numerically: (e1^2, e1 e2, -2 e2^2) built from v1, v2 are annihilated by
      the twisted quartic operator at the sample points.
    """
    prec = resolve_precision(precision)
    sym = symmetric_power(D_TRIANGULAR, 2)
    sym_tw = symmetric_power(TRIANGULAR_TWISTED, 2)
    params_ok = sym == D_QUARTIC and sym_tw == QUARTIC_TWISTED
    sym_first = symmetric_power(ThetaOperator("b", [0], [Q(1, 3)]), 2)

    basis = frobenius_basis(D_TRIANGULAR, 0, trunc + 2)
    exact_bad = []
    sols = basis.solutions
    for i in range(len(sols)):
        for j in range(i, len(sols)):
            prod = S.multiply(sols[i].terms(), sols[j].terms())
            limit = sols[i].exponent + sols[j].exponent + trunc
            res = S.truncate(D_QUARTIC.apply(S.truncate(prod, limit)), limit)
            if res:
                exact_bad.append((i, j, str(min(res))))

    k = connection_constants(prec)
    worst = mp.mpf(0)
    with mp.workprec(prec + GUARD_BITS):
        for b0 in samples:
            b0 = mp.mpc(mp.mpf(Q(b0).numerator) / Q(b0).denominator)
            v = v_jets(b0, 4, prec)
            e1 = v["v1"]
            e2 = [-k["kappa_E"] * x + k["kappa"] * y for x, y in zip(v["v1"], v["v2"])]
            for f in (_jet_mul(e1, e1), _jet_mul(e1, e2), [-2 * x for x in _jet_mul(e2, e2)]):
                scale = max(abs(x) for x in f)
                worst = max(worst, abs(apply_operator_to_jet(QUARTIC_TWISTED, f, b0)) / scale)
    ok = params_ok and not exact_bad and worst < mp.mpf(10) ** -50 and sym_first.order == 1
    return Check("clausen", bool(ok), worst,
                 {"sym2": sym.pretty(), "sym2_twisted": sym_tw.pretty(), "exact_failures": exact_bad,
                  "trunc": trunc, "first_order_control": sym_first.pretty()})


# ---------------------------------------------------------------- quadratic transformation

QT_SAMPLES = (Q(0), Q(1, 4), Q(-1, 3), complex(0.3, 0.2), complex(0.2, -0.25))
QT_PARAMS = ((Q(1, 4), Q(1, 4)), (Q(3, 4), Q(3, 4)), (Q(1, 3), Q(2, 5)))


def quadratic_sides(alpha, beta, t, precision: int | None = None):
    """Both sides of 2F1(a,b;2b;t) = (1-t)^(-a/2) 2F1(a/2, b-a/2; b+1/2; t^2/(4t-4))."""
    prec = resolve_precision(precision)
    with mp.workprec(prec + GUARD_BITS):
        t = mp.mpc(t) if not isinstance(t, Q) else mp.mpc(mp.mpf(t.numerator) / t.denominator)
        a, b = Q(alpha), Q(beta)
        lhs = eval_rgs([a, b], [2 * b, 1], t, precision=prec + GUARD_BITS).value
        if t == 0:
            rhs = mp.mpc(1)
        else:
            x = t ** 2 / (4 * t - 4)
            rhs = mp.power(1 - t, -to_mp(a) / 2) * eval_rgs([a / 2, b - a / 2], [b + Q(1, 2), 1], x,
                                                               precision=prec + GUARD_BITS).value
    return lhs, rhs


def quadratic_transform_check(samples=QT_SAMPLES, precision: int | None = None) -> Check:
    prec = resolve_precision(precision)
    worst = mp.mpf(0)
    rows = []
    for t in samples:
        for a, b in QT_PARAMS:
            lhs, rhs = quadratic_sides(a, b, t, prec)
            err = abs(lhs - rhs) / abs(lhs)
            worst = max(worst, err)
            rows.append({"t": str(t), "alpha": str(a), "beta": str(b), "rel_error": mp.nstr(err, 5)})
    pairing = solution_pairing(precision=prec)
    ok = worst < mp.mpf(10) ** -40 and pairing["ok"]
    return Check("quadratic_transform", bool(ok), max(worst, pairing["error"]),
                 {"samples": rows, "pairing": {k: v for k, v in pairing.items() if k != "error"}})


def solution_pairing(ts=(Q(1, 4), Q(1, 2), Q(3, 10)), precision: int | None = None) -> dict:
    """Triangular solutions in b = t^2/(4t-4) against (1-t)^(1/8) times elliptic ones.

    2F1(1/8,1/8;3/4;b) = (1-t)^(1/8) 2F1(1/4,1/4;1/2;t) exactly; the exponent-1/4
    solutions b^(1/4) 2F1(3/8,3/8;5/4;b) and (1-t)^(1/8) t^(1/2) 2F1(3/4,3/4;3/2;t)
    differ by a fourth root of (-4)^(-1), namely e^(i pi/4)/sqrt 2 for principal branches
    with 0 < t < 1.
    The variable map also carries the exponents at 0: 2 * {0, 1/4} = {0, 1/2}.
    """
    prec = resolve_precision(precision)
    err = mp.mpf(0)
    with mp.workprec(prec + GUARD_BITS):
        const = mp.exp(mp.mpc(0, 1) * mp.pi / 4) / mp.sqrt(2)
        for t in ts:
            t = mp.mpc(t) if not isinstance(t, Q) else mp.mpc(mp.mpf(t.numerator) / t.denominator)
            b = t ** 2 / (4 * t - 4)
            w = mp.power(1 - t, mp.mpf(1) / 8)
            y0 = eval_rgs([Q(1, 8), Q(1, 8)], [Q(3, 4), 1], b, precision=prec + GUARD_BITS).value
            u0 = eval_rgs([Q(1, 4), Q(1, 4)], [Q(1, 2), 1], t, precision=prec + GUARD_BITS).value
            y1 = mp.power(b, mp.mpf(1) / 4) * eval_rgs([Q(3, 8), Q(3, 8)], [Q(5, 4), 1], b,
                                                       precision=prec + GUARD_BITS).value
            u1 = mp.sqrt(t) * eval_rgs([Q(3, 4), Q(3, 4)], [Q(3, 2), 1], t, precision=prec + GUARD_BITS).value
            err = max(err, abs(y0 - w * u0) / abs(y0))
            ratio = y1 / (w * u1)
            err = max(err, abs(ratio - const), abs(ratio * ratio * ratio * ratio + mp.mpf(1) / 4))
    tri = indicial_roots(D_TRIANGULAR, 0)
    ell = indicial_roots(ELLIPTIC, 0)
    exponents_ok = sorted(2 * r for r in tri) == sorted(ell)
    return {"error": err, "ok": bool(err < mp.mpf(10) ** -40 and exponents_ok),
            "constant": "exp(i pi/4)/sqrt(2)", "max_error": mp.nstr(err, 5)}


# ---------------------------------------------------------------- Gram matrix and monodromy


def _is_maximally_unipotent(T) -> bool:
    """(T - I)^n = 0 and (T - I)^(n-1) != 0."""
    n = len(T)
    N = tuple(tuple(T[i][j] - (1 if i == j else 0) for j in range(n)) for i in range(n))
    zero = tuple(tuple(0 for _ in range(n)) for _ in range(n))
    return exact_power(N, n) == zero and exact_power(N, n - 1) != zero


def _projective_order_exact(T, cap: int = 24):
    n = len(T)
    P = exact_identity(n)
    for ell in range(1, cap + 1):
        P = exact_matmul(P, T)
        d = P[0][0]
        if d and all(P[i][j] == (d if i == j else 0) for i in range(n) for j in range(n)):
            return ell
    return math.inf


def k3_triple() -> dict:
    k3 = constants.load()["k3"]
    return {name: constants.integer_matrix(k3[name]) for name in ("T0", "T1", "Tinf", "gram")}


def gram_preservation(precision: int | None = None, numeric: bool = True) -> Check:
    """T G T^t = G exactly, orders (4, 2, inf), and char-poly agreement with numerics.

    The numeric side is the monodromy of b^(1/4) o D_quartic o b^(-1/4); its
    matrices satisfy Minf M1 M0 = I (loops composed right to left), whereas the
    integral triple is normalised by the product of its own ordering below.
    """
    m = k3_triple()
    G = m["gram"]
    preserved = {}
    for name in ("T0", "T1", "Tinf"):
        T = m[name]
        preserved[name] = exact_matmul(exact_matmul(T, G), exact_transpose(T)) == G
    orders = tuple(_projective_order_exact(m[name]) for name in ("T0", "T1", "Tinf"))
    expected = constants.group(constants.load()["k3"]["orders"])
    unip = _is_maximally_unipotent(m["Tinf"])
    t1_square = exact_power(m["T1"], 2) == exact_identity(3)
    t0_fourth = exact_power(m["T0"], 4) == exact_identity(3)
    products = {
        "T0*T1*Tinf": [list(r) for r in exact_matmul(exact_matmul(m["T0"], m["T1"]), m["Tinf"])],
        "Tinf*T1*T0": [list(r) for r in exact_matmul(exact_matmul(m["Tinf"], m["T1"]), m["T0"])],
    }
    ok = all(preserved.values()) and orders == expected and unip and t1_square and t0_fourth
    detail = {"preserved": preserved, "orders": [("inf" if o == math.inf else o) for o in orders],
              "unipotent_inf": unip, "relation_products": products}
    residual = 0
    if numeric:
        prec = resolve_precision(precision)
        rep = monodromy_rep(QUARTIC_TWISTED, precision=prec)
        dist = {}
        with mp.workprec(prec):
            for name, M in (("T0", rep.M0), ("T1", rep.M1), ("Tinf", rep.Minf)):
                dist[name] = charpoly_distance(constants.printed_matrix([list(r) for r in m[name]], prec), M, prec)
        residual = max(dist.values())
        detail["charpoly_distance"] = {k: mp.nstr(v, 5) for k, v in dist.items()}
        detail["numeric_signature"] = rep.signature.to_json()
        ok = ok and residual < mp.mpf(10) ** -30 and rep.orders == expected
    return Check("gram_preservation", bool(ok), residual, detail)


def elliptic_check(precision: int | None = None) -> Check:
    """Exponents {1/4, 3/4} of the twisted elliptic operator at 0 and the printed triple's product."""
    roots = indicial_roots(ELLIPTIC_TWISTED, 0)
    ell = constants.load()["k3"]["elliptic"]
    T0, T1, Tinf = (constants.integer_matrix(ell[k]) for k in ("T0", "T1", "Tinf"))
    product = exact_matmul(exact_matmul(T0, T1), Tinf)
    prec = resolve_precision(precision)
    rep = monodromy_rep(ELLIPTIC_TWISTED, precision=prec)
    with mp.workprec(prec):
        dist = max(charpoly_distance(constants.printed_matrix([list(r) for r in T], prec), M, prec)
                   for T, M in ((T0, rep.M0), (T1, rep.M1), (Tinf, rep.Minf)))
    ok = tuple(roots) == (Q(1, 4), Q(3, 4)) and product == exact_identity(2) and dist < mp.mpf(10) ** -30
    return Check("elliptic", bool(ok), dist, {"exponents": [str(r) for r in roots],
                                             "T0*T1*Tinf": [list(r) for r in product]})


def run_all(precision: int | None = None) -> list[Check]:
    return [clausen_check(precision=precision), quadratic_transform_check(precision=precision),
            connection_check(precision=precision), gram_preservation(precision=precision)]
