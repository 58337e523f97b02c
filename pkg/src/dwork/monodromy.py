"""Monodromy of b-form hypergeometric operators by Taylor-series continuation.

Solutions are carried as jets (y, y', y''/2!, ..., y^(k-1)/(k-1)!) in the
global variable b.  One step from a center c to c + h re-expands the
solution space at c through the operator written as sum_i q_i(b) d^i/db^i
and sums the local Taylor series at h; the local radius is the distance
from c to {0, 1}, and steps never exceed step_safety times that radius.

Convention: continuing the row of basis functions f along a path gives
f . M, so M for "first gamma, then delta" is M_delta M_gamma.  The loops
at the default base point 2/5 are: around 0 counterclockwise (radius 1/8),
around 1 counterclockwise (radius 1/8), and around infinity along |b| = 8
clockwise, reached through 8i.  These satisfy Minf M1 M0 = I.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import mpmath
from mpmath import mp

from .errors import PrecisionExhausted, ReducibleParameters, StepTooClose
from .frobenius import FrobeniusBasis, derivative_form, frobenius_basis
from .numeric import (GUARD_BITS, as_fraction, charpoly, complex_record, decimal_string,
                      exp2pii, max_abs, resolve_precision, to_mp)
from .pfode import NotCanonicalForm, ThetaOperator

log = logging.getLogger(__name__)

INF = math.inf
DEFAULT_BASEPOINT = Fraction(2, 5)
LOOP_RADIUS = Fraction(1, 8)
INFINITY_RADIUS = 8
STEP_SAFETY = 0.5


# ---------------------------------------------------------------- paths


@dataclass(frozen=True)
class PathPlan:
    centers: tuple
    step_safety: float = STEP_SAFETY

    def __post_init__(self):
        if not 0 < self.step_safety < 1:
            raise ValueError("step_safety must lie in (0, 1)")

    @property
    def start(self):
        return self.centers[0]

    @property
    def end(self):
        return self.centers[-1]

    def validate(self) -> None:
        for c, d in zip(self.centers, self.centers[1:]):
            radius = _dist(c)
            if radius == 0 or abs(d - c) > self.step_safety * radius * (1 + 1e-12):
                raise StepTooClose(f"step {mp.nstr(c, 6)} -> {mp.nstr(d, 6)} exceeds the safety margin")

    def __len__(self) -> int:
        return len(self.centers)


def _dist(c):
    return min(abs(c), abs(c - 1))


def _arc_points(center, radius, start_angle, sweep, pieces):
    return [center + radius * mp.expj(start_angle + sweep * j / pieces) for j in range(1, pieces + 1)]


def refine(anchors: Sequence, step_safety: float = STEP_SAFETY) -> PathPlan:
    """Insert centers along the polyline through anchors so every step is safe."""
    pts = [anchors[0]]
    c = anchors[0]
    for a in anchors[1:]:
        while True:
            gap = abs(a - c)
            if gap == 0:
                break
            h = step_safety * _dist(c) * 0.97
            if gap <= h:
                c = a
                pts.append(c)
                break
            c = c + (a - c) * (h / gap)
            pts.append(c)
    plan = PathPlan(tuple(pts), step_safety)
    plan.validate()
    return plan


def loop_path(basepoint, around, step_safety: float = STEP_SAFETY, precision: int | None = None) -> PathPlan:
    """Closed loop from basepoint encircling one of 0, 1, 'inf' once (positively)."""
    prec = resolve_precision(precision)
    with mp.workprec(prec + GUARD_BITS):
        p = mp.mpc(to_mp(basepoint))
        if around == "inf":
            R = mp.mpf(INFINITY_RADIUS)
            top = mp.mpc(0, R)
            arc = _arc_points(mp.mpc(0), R, mp.pi / 2, -2 * mp.pi, 64)
            anchors = [p, top] + arc + [p]
            return refine(anchors, step_safety)
        s = mp.mpf(around)
        r = mp.mpf(LOOP_RADIUS.numerator) / LOOP_RADIUS.denominator
        other = 1 - s
        # approach along the straight line if it stays clear of the other singularity
        direction = (p - s) / abs(p - s)
        touch = s + r * direction
        route = [p]
        if _segment_clearance(p, touch, other) < 2 * r:
            waypoint = mp.mpc((p.real + s) / 2, mp.mpf(0.6))
            direction = (waypoint - s) / abs(waypoint - s)
            touch = s + r * direction
            route.append(waypoint)
        start_angle = mp.arg(direction)
        arc = _arc_points(s, r, start_angle, 2 * mp.pi, 48)
        anchors = route + [touch] + arc + list(reversed(route))
        return refine(anchors, step_safety)


def _segment_clearance(p, q, z):
    d = q - p
    t = max(0, min(1, mp.re((z - p) * mp.conj(d)) / abs(d) ** 2))
    return abs(p + t * d - z)


def contractible_path(basepoint, step_safety: float = STEP_SAFETY, precision: int | None = None) -> PathPlan:
    """A small closed loop around a regular point, for the trivial-monodromy check."""
    with mp.workprec(resolve_precision(precision) + GUARD_BITS):
        p = mp.mpc(to_mp(basepoint))
        center = p + mp.mpc(0, mp.mpf(0.1))
        arc = _arc_points(center, mp.mpf(0.1), -mp.pi / 2, 2 * mp.pi, 24)
        return refine([p] + arc, step_safety)


# ---------------------------------------------------------------- stepping


class _Stepper:
    """Taylor transfer matrices for one operator at one precision."""

    def __init__(self, op: ThetaOperator, prec: int):
        if not op.is_b_form or op.scale != 1:
            raise NotCanonicalForm("continuation expects a b-form operator with unit scale")
        self.op = op
        self.k = op.order
        self.prec = prec
        self.work = prec + GUARD_BITS
        with mp.workprec(self.work):
            self.AB = [(to_mp(a), to_mp(b)) for a, b in derivative_form(op)]

    def _q_coeffs(self, c):
        """q_i(c + h) = sum_r q[i][r] h^r with q_i(b) = b^i (A_i - B_i b)."""
        out = []
        for i, (A, B) in enumerate(self.AB):
            row = [mp.mpc(0)] * (i + 2)
            base = A - B * c
            for r in range(i + 1):
                binom = math.comb(i, r)
                row[r] += binom * c ** (i - r) * base
                row[r + 1] -= B * binom * c ** (i - r)
            out.append(row)
        return out

    def transfer(self, c, d):
        """k x k matrix T with jet(d) = T jet(c) for every solution."""
        k = self.k
        with mp.workprec(self.work):
            h = d - c
            q = self._q_coeffs(c)
            lead = q[k][0]
            pairs = []
            for i in range(k + 1):
                for r in range(len(q[i])):
                    if (i, r) == (k, 0) or q[i][r] == 0:
                        continue
                    pairs.append((i, r, q[i][r] * h ** (k + r - i) / lead))
            # alpha[n][col] = a_n h^n; initial jets are unit vectors
            alpha = [[(h ** j if col == j else mp.mpc(0)) for col in range(k)] for j in range(k)]
            tol = mp.mpf(2) ** (-self.work)
            ratio = abs(h) / _dist(c)
            cap = 40 * self.work
            N = 0
            quiet = 0
            while True:
                n_new = N + k
                scale = mp.mpf(1) / math.perm(n_new, k)
                acc = [mp.mpc(0)] * k
                for i, r, w in pairs:
                    idx = N - r + i
                    if N - r < 0:
                        continue
                    f = w * math.perm(idx, i)
                    row = alpha[idx]
                    for col in range(k):
                        if row[col]:
                            acc[col] += f * row[col]
                alpha.append([-x * scale for x in acc])
                size = max(abs(x) for x in alpha[-1])
                quiet = quiet + 1 if size < tol else 0
                N += 1
                if quiet >= k + 1 and N > 4:
                    break
                if N > cap:
                    raise PrecisionExhausted(f"Taylor series at {mp.nstr(c, 8)} did not converge")
            T = mp.matrix(k, k)
            for j in range(k):
                hj = h ** j
                for col in range(k):
                    s = mp.mpc(0)
                    for n in range(j, len(alpha)):
                        if alpha[n][col]:
                            s += math.comb(n, j) * alpha[n][col]
                    T[j, col] = s / hj
            self.last_terms = len(alpha)
            self.last_tail = size * (1 / (1 - ratio) if ratio < 1 else mp.inf)
            return T

    def propagate(self, path: PathPlan, jets):
        with mp.workprec(self.work):
            J = jets
            for c, d in zip(path.centers, path.centers[1:]):
                J = self.transfer(c, d) * J
            return J


def _jet_matrix(basis: FrobeniusBasis, b, prec: int):
    rows = basis.jet(b, len(basis.solutions), prec + GUARD_BITS)
    k = len(rows)
    with mp.workprec(prec + GUARD_BITS):
        J = mp.matrix(k, k)
        for col, row in enumerate(rows):
            for i, v in enumerate(row):
                J[i, col] = v
    return J


def _basis_for_point(op: ThetaOperator, point, x_abs, radius, prec: int) -> FrobeniusBasis:
    ratio = float(x_abs) / radius
    if ratio >= 0.95:
        raise StepTooClose("path does not start inside the Frobenius disk")
    needed = int((prec + GUARD_BITS + 24) / -math.log2(ratio)) + 3 * op.order + 10
    return frobenius_basis(op, point, max(needed, 2 * op.order))


def continue_basis(op: ThetaOperator, basis: FrobeniusBasis, path: PathPlan,
                   target: FrobeniusBasis | None = None, precision: int | None = None):
    """Transfer matrix C with  (continued basis) = (target basis) . C.

    target defaults to basis itself (use a closed path).  Both bases are
    recomputed internally with enough terms for the working precision.
    """
    prec = resolve_precision(precision)
    path.validate()
    target = target or basis
    with mp.workprec(prec + GUARD_BITS):
        start = basis.local_coordinate(mp.mpc(path.start))
        end = target.local_coordinate(mp.mpc(path.end))
        src = _basis_for_point(op, basis.point, abs(start), basis.radius, prec)
        dst = _basis_for_point(op, target.point, abs(end), target.radius, prec)
        stepper = _Stepper(op, prec)
        J0 = _jet_matrix(src, path.start, prec)
        J1 = stepper.propagate(path, J0)
        Jt = J0 if (dst is src and path.start == path.end) else _jet_matrix(dst, path.end, prec)
        C = mp.inverse(Jt) * J1
    with mp.workprec(prec):
        return C * 1


# ---------------------------------------------------------------- representations


@dataclass(frozen=True)
class Signature:
    l0: float
    l1: float
    linf: float

    def as_tuple(self):
        return (self.l0, self.l1, self.linf)

    def to_json(self):
        return [_order_json(x) for x in self.as_tuple()]

    def __str__(self):
        return "(" + ",".join("∞" if x == INF else str(int(x)) for x in self.as_tuple()) + ")"


def _order_json(x):
    return "inf" if x == INF else int(x)


@dataclass(frozen=True)
class MonodromyRep:
    basepoint: object
    M0: mpmath.matrix = field(repr=False)
    M1: mpmath.matrix = field(repr=False)
    Minf: mpmath.matrix = field(repr=False)
    orders: tuple
    relation_residual: object
    precision: int

    @property
    def signature(self) -> Signature:
        return Signature(*self.orders)

    def matrices(self):
        return {"M0": self.M0, "M1": self.M1, "Minf": self.Minf}

    def to_json(self, digits: int = 50) -> dict:
        def mat(m):
            return [[complex_record(m[i, j], digits) for j in range(m.cols)] for i in range(m.rows)]

        return {
            "basepoint": complex_record(to_mp(self.basepoint), digits),
            "matrices": {k: mat(v) for k, v in self.matrices().items()},
            "orders": [_order_json(x) for x in self.orders],
            "relation_residual": decimal_string(self.relation_residual, 10),
            "precision": self.precision,
        }


def _prepare(op: ThetaOperator) -> ThetaOperator:
    if not op.is_b_form:
        raise NotCanonicalForm("monodromy expects a b-form operator")
    if op.scale != 1:
        log.info("rescaling %s to unit scale", op.pretty())
        op = op.rescaled()
    return op


def monodromy_rep(op: ThetaOperator, basepoint=DEFAULT_BASEPOINT, precision: int | None = None,
                  step_safety: float = STEP_SAFETY) -> MonodromyRep:
    """Local monodromies at 0, 1, infinity in the Frobenius basis at 0."""
    prec = resolve_precision(precision)
    key = str(basepoint) if isinstance(basepoint, (Fraction, int, str)) else repr(complex(basepoint))
    return _monodromy_cached(_prepare(op), key, prec, float(step_safety))


def _parse_basepoint(key: str):
    try:
        return Fraction(key)
    except ValueError:
        return complex(key.strip("()"))


@lru_cache(maxsize=128)
def _monodromy_cached(op: ThetaOperator, key: str, prec: int, step_safety: float) -> MonodromyRep:
    basepoint = _parse_basepoint(key)
    basis = frobenius_basis(op, 0, 2 * op.order + 2)
    mats = {}
    for s in (0, 1, "inf"):
        path = loop_path(basepoint, s, step_safety, prec)
        mats[s] = continue_basis(op, basis, path, precision=prec)
        log.debug("loop around %s: %d steps", s, len(path))
    with mp.workprec(prec):
        rel = mats["inf"] * mats[1] * mats[0] - mp.eye(op.order)
        residual = max_abs(rel)
    orders = tuple(projective_order(mats[s], precision=prec) for s in (0, 1, "inf"))
    return MonodromyRep(basepoint, mats[0], mats[1], mats["inf"], orders, residual, prec)


def loop_matrix(op: ThetaOperator, path: PathPlan, precision: int | None = None):
    """Monodromy along an arbitrary closed path in the Frobenius basis at 0."""
    op = _prepare(op)
    basis = frobenius_basis(op, 0, 2 * op.order + 2)
    return continue_basis(op, basis, path, precision=precision)


def projective_order(M, cap: int = 64, precision: int | None = None):
    """Least l <= cap with M^l scalar; INF if none.

    For 1 x 1 matrices every power is scalar, so the plain order of the
    root of unity is returned instead.
    """
    prec = resolve_precision(precision)
    with mp.workprec(prec):
        tol = mp.mpf(2) ** (64 - prec)
        n = M.rows
        P = mp.eye(n)
        for ell in range(1, cap + 1):
            P = P * M
            if n == 1:
                if abs(P[0, 0] - 1) < tol:
                    return ell
                continue
            zeta = P[0, 0]
            if abs(zeta) < tol:
                continue
            scale = max(1, abs(zeta))
            if all(abs(P[i, j] - (zeta if i == j else 0)) < tol * scale for i in range(n) for j in range(n)):
                return ell
        return INF


def signature(op: ThetaOperator, basepoint=DEFAULT_BASEPOINT, n: int | None = None,
              precision: int | None = None) -> Signature:
    rep = monodromy_rep(op, basepoint, precision)
    sig = rep.signature
    if n is not None and sig.l0 != INF and (n + 1) % int(sig.l0):
        raise AssertionError(f"order at 0 ({sig.l0}) does not divide n+1 = {n + 1}")
    return sig


# ---------------------------------------------------------------- Levelt


def companion(roots_phase: Sequence[Fraction], precision: int | None = None):
    """Companion matrix of prod (t - exp(2 pi i phase))."""
    prec = resolve_precision(precision)
    with mp.workprec(prec + GUARD_BITS):
        coeffs = [mp.mpc(1)]
        for ph in roots_phase:
            z = exp2pii(ph, prec + GUARD_BITS)
            nxt = [mp.mpc(0)] * (len(coeffs) + 1)
            for i, c in enumerate(coeffs):
                nxt[i] += c
                nxt[i + 1] -= c * z
            coeffs = nxt
        n = len(roots_phase)
        C = mp.matrix(n, n)
        for i in range(1, n):
            C[i, i - 1] = 1
        for i in range(n):
            C[i, n - 1] = -coeffs[n - i]
    with mp.workprec(prec):
        return C * 1


def levelt_generators(upper: Sequence, lower: Sequence, precision: int | None = None):
    """Companion matrices A (roots exp(2 pi i u)) and B (roots exp(2 pi i l)).

    For L(theta) - b U(theta), A is conjugate to the monodromy at infinity and B
    to the inverse of the monodromy at 0; A^-1 B is a pseudo-reflection.
    """
    up = [as_fraction(x) for x in upper]
    lo = [as_fraction(x) for x in lower]
    if len(up) != len(lo):
        raise ValueError("parameter lists must have equal length")
    for u in up:
        for l in lo:
            if (u - l).denominator == 1:
                raise ReducibleParameters(f"parameters {u} and {l} agree modulo 1")
    return companion(up, precision), companion(lo, precision)


def charpoly_distance(A, B, precision: int | None = None):
    """Max coefficient difference of the characteristic polynomials."""
    pa, pb = charpoly(A, precision), charpoly(B, precision)
    return max(abs(x - y) for x, y in zip(pa, pb))


def eigenvalues(M, precision: int | None = None):
    with mp.workprec(resolve_precision(precision)):
        return list(mp.eig(M, left=False, right=False))


def rank(M, tol) -> int:
    with mp.workprec(mp.prec):
        s = mp.svd_c(M, compute_uv=False)
    return sum(1 for x in s if abs(x) > tol)
