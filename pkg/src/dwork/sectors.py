"""Gradings, spectra and permutation orbits of Fermat twisted sectors.

A sector of f = z_0^{n+1} + ... + z_n^{n+1} is labelled by an exponent
vector m.  Its grading beta = sum(m)/(n+1) splits as an integer part and
alpha in (-1, 0]; the Hodge index is p = n + alpha - beta.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import DimensionError


@dataclass(frozen=True)
class FermatData:
    n: int
    weight: Fraction
    milnor_number: int

    @classmethod
    def of(cls, n: int) -> "FermatData":
        if n < 2:
            raise ValueError("n must be at least 2")
        return cls(n=n, weight=Fraction(1, n + 1), milnor_number=n ** (n + 1))


@dataclass(frozen=True)
class SectorIndex:
    m: tuple[int, ...]
    n: int
    beta: Fraction
    alpha: Fraction
    hodge_p: int
    kind: str  # "relevant", "marginal" or "irrelevant"

    def eigenvalue_phase(self) -> Fraction:
        """Rational phase phi with lambda = exp(2 pi i phi) = exp(-2 pi i beta), phi in [0, 1)."""
        return (-self.beta) % 1

    def label(self) -> str:
        return "".join(str(x) for x in self.m) if max(self.m, default=0) < 10 else ",".join(map(str, self.m))

    def to_json(self) -> dict:
        return {
            "m": list(self.m),
            "beta": _frac_str(self.beta),
            "alpha": _frac_str(self.alpha),
            "hodge_p": self.hodge_p,
            "kind": self.kind,
        }


@dataclass(frozen=True)
class Spectrum:
    n: int
    counts: tuple[tuple[Fraction, int], ...]

    def as_dict(self) -> dict[Fraction, int]:
        return dict(self.counts)

    @property
    def total(self) -> int:
        return sum(c for _, c in self.counts)

    def to_json(self) -> list[dict]:
        return [{"beta": _frac_str(b), "count": c} for b, c in self.counts]


def _frac_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _check_m(m: Sequence[int], n: int) -> tuple[int, ...]:
    m = tuple(int(x) for x in m)
    if len(m) != n + 1:
        raise DimensionError(f"expected {n + 1} exponents for n={n}, got {len(m)}")
    if any(x < 0 for x in m):
        raise DimensionError("exponents must be non-negative")
    return m


def sector_grading(m: Sequence[int], n: int) -> SectorIndex:
    m = _check_m(m, n)
    beta = Fraction(sum(m), n + 1)
    alpha = beta - math.ceil(beta)
    hodge_p = n + alpha - beta
    assert hodge_p.denominator == 1
    if beta < 1:
        kind = "relevant"
    elif beta == 1:
        kind = "marginal"
    else:
        kind = "irrelevant"
    return SectorIndex(m=m, n=n, beta=beta, alpha=alpha, hodge_p=int(hodge_p), kind=kind)


def jacobi_box(n: int):
    """All m in {0..n-1}^{n+1}, the monomial basis of the Jacobi ring."""
    return itertools.product(range(n), repeat=n + 1)


def spectrum(n: int) -> Spectrum:
    if n < 2:
        raise ValueError("n must be at least 2")
    counts = Counter(Fraction(sum(m), n + 1) for m in jacobi_box(n))
    return Spectrum(n=n, counts=tuple(sorted(counts.items())))


def sector_orbits(n: int, beta_max) -> list[SectorIndex]:
    """One representative (descending-sorted m) per S_{n+1} orbit with beta <= beta_max."""
    if n < 2:
        raise ValueError("n must be at least 2")
    beta_max = Fraction(beta_max)
    reps = set()
    for m in jacobi_box(n):
        if Fraction(sum(m), n + 1) <= beta_max:
            reps.add(tuple(sorted(m, reverse=True)))
    return [sector_grading(m, n) for m in sorted(reps)]


def parse_m(text: str, n: int) -> tuple[int, ...]:
    """Parse '1000' or '1,0,0,0' into an exponent vector of length n+1."""
    text = text.strip()
    parts = text.split(",") if "," in text else list(text)
    try:
        m = tuple(int(p) for p in parts)
    except ValueError as exc:
        raise DimensionError(f"malformed exponent vector {text!r}") from exc
    return _check_m(m, n)
