"""Loader for the published reference values in data/reference_values.yaml."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources

import mpmath as mp
import yaml

from .numeric import GUARD_BITS, resolve_precision, xi
from .pfode import ThetaOperator

SCHEMA = 1


@lru_cache(maxsize=1)
def load() -> dict:
    text = resources.files("dwork").joinpath("data/reference_values.yaml").read_text()
    data = yaml.safe_load(text)
    if data.get("schema") != SCHEMA:
        raise ValueError(f"unsupported constants schema {data.get('schema')!r}")
    return data


def order_value(x):
    if isinstance(x, str) and x.strip().lower() in ("inf", "infinity", "∞"):
        return math.inf
    return int(x)


def group(x) -> tuple:
    return tuple(order_value(v) for v in x)


def fractions(xs) -> tuple[Fraction, ...]:
    return tuple(Fraction(str(x)) for x in xs)


def operator(block: dict, variable: str = "b") -> ThetaOperator:
    return ThetaOperator(variable, fractions(block["lower"]), fractions(block["upper"]),
                         Fraction(str(block.get("scale", 1))), int(block.get("power", 1)))


def _expr_value(text, prec: int):
    import sympy as sp

    expr = sp.sympify(str(text))
    with mp.workprec(prec):
        return mp.mpc(sp.lambdify([], expr, "mpmath")())


def printed_matrix(block, precision: int | None = None) -> mp.matrix:
    """Evaluate a stored matrix.  Plain integer lists are taken as is."""
    prec = resolve_precision(precision)
    with mp.workprec(prec + GUARD_BITS):
        if isinstance(block, list):
            return mp.matrix([[mp.mpf(int(v)) for v in row] for row in block])
        pre = block.get("prefactor") or {}
        factor = mp.mpc(1)
        if "xi" in pre:
            k, p = pre["xi"]
            factor *= xi(int(k), int(p), prec + GUARD_BITS)
        if "scalar" in pre:
            factor *= _expr_value(pre["scalar"], prec + GUARD_BITS)
        rows = [[factor * _expr_value(v, prec + GUARD_BITS) for v in row] for row in block["entries"]]
        return mp.matrix(rows)


def integer_matrix(rows) -> tuple:
    return tuple(tuple(int(v) for v in row) for row in rows)


@dataclass(frozen=True)
class MonodromyRow:
    label: str
    m: tuple | None
    operator: ThetaOperator
    group: tuple
    T0: dict
    Tinf: dict

    def matrices(self, precision: int | None = None):
        return printed_matrix(self.T0, precision), printed_matrix(self.Tinf, precision)


def quartic_monodromy() -> list[MonodromyRow]:
    rows = []
    for r in load()["quartic_monodromy"]:
        m = tuple(r["m"]) if "m" in r else None
        rows.append(MonodromyRow(str(r["label"]), m, operator(r), group(r["group"]), r["T0"], r["Tinf"]))
    return rows


def spectrum(n: int) -> dict[Fraction, int]:
    return {Fraction(k): int(v) for k, v in load()["spectra"][n].items()}


def operator_table(n: int) -> list[tuple[tuple, ThetaOperator]]:
    return [(tuple(r["m"]), operator(r, "a")) for r in load()["operator_tables"][n]]
