from fractions import Fraction

import mpmath as mp
import pytest
from hypothesis import given, strategies as st

from dwork import numeric
from dwork.errors import PoleError, PrecisionError

PREC = 256
TOL = mp.mpf(2) ** (-PREC + 16)

finite = st.floats(min_value=-30, max_value=30, allow_nan=False, allow_infinity=False)
away_from_poles = st.tuples(finite, finite).filter(
    lambda p: abs(p[1]) > 1e-3 or abs(p[0] - round(p[0])) > 1e-3)


def _close(a, b, tol=TOL):
    with mp.workprec(PREC + 32):
        return abs(a - b) <= tol * max(1, abs(b))


@given(away_from_poles)
def test_gamma_functional_equation(p):
    with mp.workprec(PREC):
        z = mp.mpc(p[0], p[1])
        lhs = numeric.gamma(z + 1, PREC)
        rhs = z * numeric.gamma(z, PREC)
    assert _close(lhs, rhs)


@given(away_from_poles)
def test_gamma_agrees_with_mpmath(p):
    with mp.workprec(PREC + 32):
        z = mp.mpc(p[0], p[1])
        ref = mp.gamma(z)
    assert _close(numeric.gamma(z, PREC), ref)


@given(st.fractions(min_value=Fraction(1, 100), max_value=Fraction(99, 100)))
def test_gamma_reflection(x):
    with mp.workprec(PREC + 32):
        xx = mp.mpf(x.numerator) / x.denominator
        lhs = numeric.gamma(x, PREC) * numeric.gamma(1 - x, PREC)
        assert _close(lhs, mp.pi / mp.sin(mp.pi * xx))


def test_gamma_known_values():
    with mp.workprec(PREC + 32):
        assert _close(numeric.gamma(Fraction(1, 2), PREC), mp.sqrt(mp.pi))
    assert numeric.gamma(5, PREC) == 24


@pytest.mark.parametrize("z", [0, -1, -7, Fraction(-3)])
def test_gamma_poles(z):
    with pytest.raises(PoleError):
        numeric.gamma(z)


def test_random_sample_gamma_recurrence():
    # the 100-sample property of the acceptance suite, with fixed seed
    with mp.workprec(PREC + 32):
        for z in numeric.random_samples(100, seed=1):
            assert _close(numeric.gamma(z + 1, PREC), z * numeric.gamma(z, PREC))


def test_precision_floor(monkeypatch):
    with pytest.raises(PrecisionError):
        numeric.check_precision(32)
    monkeypatch.setenv("DWORK_PRECISION", "128")
    assert numeric.default_precision() == 128
    monkeypatch.setenv("DWORK_PRECISION", "16")
    with pytest.raises(PrecisionError):
        numeric.default_precision()


@given(st.fractions(max_denominator=50), st.integers(0, 12))
def test_pochhammer_recurrence(a, k):
    assert numeric.pochhammer(a, k + 1) == numeric.pochhammer(a, k) * (a + k)


@given(st.integers(1, 24), st.integers(-30, 30))
def test_xi_is_root_of_unity(k, p):
    with mp.workprec(PREC):
        z = numeric.xi(k, p, PREC)
        assert abs(z ** k - 1) < TOL


int_matrix = st.lists(st.lists(st.integers(-5, 5), min_size=3, max_size=3), min_size=3, max_size=3)


@given(int_matrix, int_matrix)
def test_exact_transpose_of_product(a, b):
    ab = numeric.exact_matmul(a, b)
    assert numeric.exact_transpose(ab) == numeric.exact_matmul(numeric.exact_transpose(b),
                                                               numeric.exact_transpose(a))


@given(int_matrix)
def test_exact_power_matches_repeated_product(a):
    p = numeric.exact_identity(3)
    for _ in range(3):
        p = numeric.exact_matmul(p, a)
    assert numeric.exact_power(a, 3) == p


def test_charpoly_of_companion():
    m = mp.matrix([[0, -6], [1, 5]])
    # t^2 - 5t + 6
    assert [int(mp.nint(c.real)) for c in numeric.charpoly(m, PREC)] == [1, -5, 6]


def test_decimal_string_is_deterministic():
    with mp.workprec(PREC):
        x = mp.pi
    a = numeric.decimal_string(x)
    assert a == numeric.decimal_string(x)
    assert a.startswith("3.14159265358979323846")
