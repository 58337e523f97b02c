from fractions import Fraction

import mpmath as mp
import pytest
from hypothesis import given, settings, strategies as st

from dwork import appb, constants
from dwork.numeric import exact_identity, exact_matmul, exact_power, exact_transpose
from dwork.pfode import symmetric_power

Q = Fraction
PREC = 256


def test_operators_match_stored_displays():
    k3 = constants.load()["k3"]
    assert appb.D_QUARTIC == constants.operator(k3["quartic"])
    assert appb.D_TRIANGULAR == constants.operator(k3["triangular"])
    assert appb.QUARTIC_TWISTED == constants.operator(k3["quartic_twisted"])
    assert appb.TRIANGULAR_TWISTED == constants.operator(k3["triangular_twisted"])


def test_symmetric_square_parameters():
    assert symmetric_power(appb.D_TRIANGULAR, 2) == appb.D_QUARTIC
    assert symmetric_power(appb.TRIANGULAR_TWISTED, 2) == appb.QUARTIC_TWISTED


def test_clausen():
    c = appb.clausen_check(trunc=40, precision=PREC)
    assert c.passed, c.detail
    assert c.residual < mp.mpf(10) ** -50


def test_quadratic_transform():
    c = appb.quadratic_transform_check(precision=PREC)
    assert c.passed
    assert len(appb.QT_SAMPLES) == 5
    assert c.residual < mp.mpf(10) ** -40


@settings(max_examples=15)
@given(st.fractions(min_value=Q(1, 10), max_value=Q(2), max_denominator=10),
       st.fractions(min_value=Q(1, 10), max_value=Q(2), max_denominator=10),
       st.complex_numbers(max_magnitude=0.4, allow_nan=False, allow_infinity=False))
def test_quadratic_transform_property(a, b, t):
    lhs, rhs = appb.quadratic_sides(a, b, t, 160)
    with mp.workprec(160):
        assert abs(lhs - rhs) <= mp.mpf(10) ** -40 * abs(lhs)


def test_solution_pairing():
    assert appb.solution_pairing(precision=PREC)["ok"]


def test_connection_constants():
    c = appb.connection_check(precision=PREC)
    assert c.passed, c.detail
    assert c.residual < mp.mpf(10) ** -35


def test_kappa_closed_form():
    k = appb.connection_constants(PREC)
    with mp.workprec(PREC):
        assert abs(k["kappa_E"] - mp.mpc(0, 1) / mp.sqrt(2)) < mp.mpf(10) ** -70
        assert abs(k["kappa"] - k["kappa_gamma"]) < mp.mpf(10) ** -70


def test_k3_triple_exact():
    m = appb.k3_triple()
    G = m["gram"]
    for name in ("T0", "T1", "Tinf"):
        T = m[name]
        assert exact_matmul(exact_matmul(T, G), exact_transpose(T)) == G, name
    assert exact_power(m["T0"], 4) == exact_identity(3)
    assert exact_power(m["T1"], 2) == exact_identity(3)
    N = tuple(tuple(m["Tinf"][i][j] - (i == j) for j in range(3)) for i in range(3))
    assert exact_power(N, 3) == ((0,) * 3,) * 3
    assert exact_power(N, 2) != ((0,) * 3,) * 3
    assert exact_matmul(exact_matmul(m["T0"], m["T1"]), m["Tinf"]) == exact_identity(3)


def test_gram_preservation_with_numerics():
    c = appb.gram_preservation(PREC)
    assert c.passed, c.detail
    assert c.detail["orders"] == [4, 2, "inf"]
    assert c.detail["numeric_signature"] == [4, 2, "inf"]


def test_elliptic_triple():
    c = appb.elliptic_check(PREC)
    assert c.passed, c.detail
    assert c.detail["exponents"] == ["1/4", "3/4"]


def test_run_all_has_four_passing_checks():
    checks = appb.run_all(PREC)
    assert [c.name for c in checks] == ["clausen", "quadratic_transform", "connection_constants",
                                        "gram_preservation"]
    assert all(c.passed for c in checks)
    assert all(c.to_json()["verdict"] == "pass" for c in checks)


@pytest.mark.parametrize("b0", [2, 3, Q(5, 2)])
def test_theta_jet_against_closed_form(b0):
    # y = b^2: theta y = 2 b^2, so (theta - 2) y = 0 for the operator theta - 2 - 0*b
    from dwork.pfode import ThetaOperator

    op = ThetaOperator("b", [-2], [0], 0, 1)
    with mp.workprec(PREC):
        b = mp.mpf(Q(b0).numerator) / Q(b0).denominator
        jet = [b * b, 2 * b, mp.mpf(1), mp.mpf(0)]
        assert abs(appb.apply_operator_to_jet(op, jet, b)) < mp.mpf(10) ** -70
