import math
from fractions import Fraction

import mpmath as mp
import pytest

from dwork import constants
from dwork.numeric import xi


def test_schema_and_keys():
    data = constants.load()
    assert data["schema"] == constants.SCHEMA
    for key in ("spectra", "operator_tables", "quartic_monodromy", "cubic", "k3", "quintic", "chen_ruan_dimension"):
        assert key in data


def test_group_parses_infinity():
    assert constants.group([4, 2, "inf"]) == (4, 2, math.inf)


def test_monodromy_rows():
    rows = constants.quartic_monodromy()
    labels = [r.label for r in rows]
    assert labels == ["0000", "1000", "2000", "1100", "1110", "2100", "-", "star"]
    for r in rows:
        T0, Tinf = r.matrices(128)
        assert T0.rows == T0.cols == r.operator.order
        assert Tinf.rows == r.operator.order


def test_printed_matrix_prefactor():
    block = {"prefactor": {"xi": [8, 1], "scalar": "1/sqrt(2)"}, "entries": [["-1", "-5"], ["1", "3"]]}
    M = constants.printed_matrix(block, 128)
    with mp.workprec(128):
        f = xi(8, 1, 128) / mp.sqrt(2)
        assert abs(M[1, 1] - 3 * f) < mp.mpf(10) ** -30


def test_integer_matrix_block():
    M = constants.printed_matrix([[1, 2], [3, 4]], 64)
    assert M[1, 0] == 3


def test_operator_table_entries():
    for n in (2, 3):
        for m, op in constants.operator_table(n):
            assert len(m) == n + 1
            assert op.variable == "a" and op.monomial_power == n + 1
            assert op.scale == Fraction(1, (n + 1) ** (n + 1))


def test_bad_expression_rejected():
    with pytest.raises(Exception):
        constants.printed_matrix({"entries": [["not a number ("]]}, 64)
