"""Configurable-precision scalars, the Gamma function and small dense matrices.

BigComplex values are ``mpmath.mpc`` numbers, exact rationals are
``fractions.Fraction`` and matrices are ``mpmath.matrix`` (floating) or
tuples of tuples of integers/Fractions (exact).  Every public function takes
an optional ``precision`` in bits; ``None`` means the package default, which
is 256 unless the ``DWORK_PRECISION`` environment variable overrides it.
"""

from __future__ import annotations

import math
import os
from fractions import Fraction
from functools import lru_cache
from numbers import Rational as _RationalABC
from typing import Iterable, Sequence

import mpmath
from mpmath import mp

from .errors import PoleError, PrecisionError

DEFAULT_PRECISION = 256
MIN_PRECISION = 64
# extra bits carried internally by routines that accumulate rounding error
GUARD_BITS = 32

BigComplex = mpmath.mpc
Rational = Fraction


def default_precision() -> int:
    env = os.environ.get("DWORK_PRECISION")
    if env:
        return check_precision(int(env))
    return DEFAULT_PRECISION


def check_precision(bits: int) -> int:
    bits = int(bits)
    if bits < MIN_PRECISION:
        raise PrecisionError(f"precision must be at least {MIN_PRECISION} bits, got {bits}")
    return bits


def resolve_precision(precision: int | None) -> int:
    return default_precision() if precision is None else check_precision(precision)


def as_fraction(x) -> Fraction:
    """Convert ints, Fractions and 'p/q' strings to a Fraction in lowest terms."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, _RationalABC)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


def to_mp(x):
    """Cast ints, Fractions, floats, complex and mpmath numbers to mpf/mpc at the current precision."""
    if isinstance(x, Fraction):
        return mp.mpf(x.numerator) / x.denominator
    if isinstance(x, (mpmath.mpf, mpmath.mpc)):
        return +x
    if isinstance(x, complex):
        return mp.mpc(x)
    if isinstance(x, str) and "/" in x:
        return to_mp(Fraction(x))
    return mp.mpmathify(x)


def big(x, precision: int | None = None) -> mpmath.mpc:
    """Return ``x`` as a BigComplex rounded to ``precision`` bits."""
    with mp.workprec(resolve_precision(precision)):
        return mp.mpc(to_mp(x))


def check_finite(x) -> None:
    if not mp.isfinite(x):
        raise ArithmeticError(f"non-finite value {x}")


# ---------------------------------------------------------------- Gamma


@lru_cache(maxsize=None)
def _bernoulli_table(count: int) -> tuple[Fraction, ...]:
    """B_0..B_count via the Akiyama-Tanigawa recurrence (B_1 = +1/2 convention)."""
    out = []
    a = [Fraction(0)] * (count + 1)
    for m in range(count + 1):
        a[m] = Fraction(1, m + 1)
        for j in range(m, 0, -1):
            a[j - 1] = j * (a[j - 1] - a[j])
        out.append(a[0])
    return tuple(out)


def bernoulli(n: int) -> Fraction:
    table = _bernoulli_table(max(n, 16) | 15)
    return table[n]


def _is_nonpositive_integer(z) -> bool:
    if isinstance(z, (int, Fraction)):
        return z <= 0 and Fraction(z).denominator == 1
    z = mp.mpc(z)
    return z.imag == 0 and z.real <= 0 and z.real == mp.floor(z.real)


def _stirling_log_gamma(w, bits: int):
    """log Gamma(w) by the Stirling series; caller guarantees |w| large enough."""
    eps = mp.mpf(2) ** (-bits)
    total = (w - mp.mpf(0.5)) * mp.log(w) - w + mp.log(2 * mp.pi) / 2
    w2 = w * w
    power = w
    k = 1
    while True:
        b = bernoulli(2 * k)
        term = (mp.mpf(b.numerator) / b.denominator) / ((2 * k) * (2 * k - 1) * power)
        total += term
        if abs(term) < eps * abs(total):
            return total
        power *= w2
        k += 1
        if k > 4 * bits:  # pragma: no cover - the shift makes this unreachable
            raise ArithmeticError("Stirling series failed to converge")


def gamma(z, precision: int | None = None):
    """Gamma function to ``precision`` bits of relative accuracy (minus 8).

    Uses the reflection formula for Re z < 1/2 and otherwise shifts the
    argument upward until the asymptotic Stirling series converges to
    working accuracy, then divides by the rising product.
    """
    prec = resolve_precision(precision)
    if _is_nonpositive_integer(z):
        raise PoleError(f"Gamma has a pole at {z}")
    work = prec + 24 + int(math.log2(prec))
    with mp.workprec(work):
        zz = to_mp(z)
        is_real = not isinstance(zz, mpmath.mpc) or zz.imag == 0
        zz = mp.mpc(zz)
        if zz.real < 0.5:
            value = mp.pi / (mp.sin(mp.pi * zz) * _gamma_right(1 - zz, work))
        else:
            value = _gamma_right(zz, work)
    with mp.workprec(prec):
        value = +value
        check_finite(value)
        return value.real if is_real else value


def _gamma_right(z, work: int):
    # |w| > work*ln2/(2*pi) makes the smallest Stirling term below 2^-work
    threshold = work * 0.6931471805599453 / (2 * math.pi) + 2
    shift = 0
    w = z
    prod = mp.mpc(1)
    while abs(w) < threshold:
        prod *= w
        w += 1
        shift += 1
    extra = int(math.log2(float(abs(w)) + 2)) + 8
    with mp.workprec(work + extra):
        lg = _stirling_log_gamma(w, work + extra)
        return mp.exp(lg) / prod


def pochhammer(alpha, k: int):
    """Rising factorial (alpha)_k as a direct product.

    Exact for int/Fraction input, otherwise evaluated at the current mpmath
    precision.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    if isinstance(alpha, (int, Fraction)):
        out = Fraction(1)
        a = Fraction(alpha)
        for j in range(k):
            out *= a + j
        return out
    a = to_mp(alpha)
    out = mp.mpf(1)
    for j in range(k):
        out *= a + j
    return out


# ---------------------------------------------------------------- roots of unity


def xi(k: int, power=1, precision: int | None = None):
    """exp(2 pi i power / k) at the requested precision."""
    rho = Fraction(power) / k if isinstance(power, (int, Fraction)) else power / k
    return exp2pii(rho, precision)


def exp2pii(rho, precision: int | None = None):
    """exp(2 pi i rho) for rational or floating rho."""
    with mp.workprec(resolve_precision(precision)):
        return mp.expjpi(2 * to_mp(rho))


# ---------------------------------------------------------------- matrices


def matrix(rows: Sequence[Sequence], precision: int | None = None) -> mpmath.matrix:
    with mp.workprec(resolve_precision(precision)):
        return mp.matrix([[mp.mpc(to_mp(x)) for x in row] for row in rows])


def identity(dim: int, precision: int | None = None) -> mpmath.matrix:
    with mp.workprec(resolve_precision(precision)):
        return mp.eye(dim)


def norm_inf(m: mpmath.matrix):
    """Max-row-sum norm."""
    return max(sum(abs(m[i, j]) for j in range(m.cols)) for i in range(m.rows))


def max_abs(m: mpmath.matrix):
    return max(abs(m[i, j]) for i in range(m.rows) for j in range(m.cols))


def matmul(*ms: mpmath.matrix, precision: int | None = None) -> mpmath.matrix:
    with mp.workprec(resolve_precision(precision)):
        out = ms[0]
        for m in ms[1:]:
            out = out * m
        return out


def inverse(m: mpmath.matrix, precision: int | None = None) -> mpmath.matrix:
    with mp.workprec(resolve_precision(precision)):
        return mp.inverse(m)


def charpoly(m: mpmath.matrix, precision: int | None = None) -> list:
    """Monic characteristic polynomial det(tI - M), coefficients from t^n down.

    Faddeev-LeVerrier; adequate for the dimensions (<= 5) used here.
    """
    with mp.workprec(resolve_precision(precision) + GUARD_BITS):
        n = m.rows
        coeffs = [mp.mpc(1)]
        mk = mp.zeros(n, n)
        eye = mp.eye(n)
        for k in range(1, n + 1):
            mk = m * (mk + coeffs[-1] * eye)
            c = -sum(mk[i, i] for i in range(n)) / k
            coeffs.append(c)
    return [+c for c in coeffs]


def exact_matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> tuple:
    n, k, p = len(a), len(b), len(b[0])
    return tuple(tuple(sum(a[i][t] * b[t][j] for t in range(k)) for j in range(p)) for i in range(n))


def exact_transpose(a: Sequence[Sequence]) -> tuple:
    return tuple(zip(*a))


def exact_identity(n: int) -> tuple:
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def exact_power(a: Sequence[Sequence], e: int) -> tuple:
    out = exact_identity(len(a))
    for _ in range(e):
        out = exact_matmul(out, a)
    return out


def decimal_string(x, digits: int = 50) -> str:
    """Fixed-width scientific decimal used in all reports."""
    with mp.workprec(int(digits * 3.33) + 64):
        return mp.nstr(mp.mpf(x), digits, min_fixed=1, max_fixed=0, strip_zeros=False)


def complex_record(z, digits: int = 50) -> dict:
    with mp.workprec(int(digits * 3.33) + 64):
        z = mp.mpc(z)
    return {"re": decimal_string(z.real, digits), "im": decimal_string(z.imag, digits)}


def random_samples(count: int, seed: int = 0) -> Iterable:
    """Deterministic complex samples used by property checks."""
    import random

    rng = random.Random(seed)
    for _ in range(count):
        yield complex(rng.uniform(-30, 30), rng.uniform(-30, 30))
