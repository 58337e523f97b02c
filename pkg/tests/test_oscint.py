import csv
from fractions import Fraction

import mpmath as mp
import pytest
from hypothesis import given, settings, strategies as st

from dwork import oscint
from dwork.errors import ConvergenceError, DomainError, InadmissibleDelta
from dwork.oscint import Cyclotomic, ThimbleIndex

PREC = 256
TOL = mp.mpf(10) ** -40


def test_two_path_sweep():
    rows = oscint.sweep(precision=PREC)
    assert len(rows) == 1530
    worst = max(rows, key=lambda r: r["error"])
    assert worst["error"] < TOL, worst


@settings(max_examples=10)
@given(st.complex_numbers(max_magnitude=1.5, allow_nan=False, allow_infinity=False),
       st.sampled_from([(2, (0, 0, 0)), (2, (1, 0, 0)), (3, (1, 1, 0, 0))]))
def test_two_path_random_points(a, case):
    n, m = case
    h = (1,) * (n + 1)
    assert oscint.two_path_error(n, m, h, a, 128) < mp.mpf(10) ** -25


def test_series_outside_disk():
    with pytest.raises(ConvergenceError):
        oscint.oscillating_series(2, (0, 0, 0), (1, 1, 1), Fraction(29, 10))


def test_thimble_index_domain():
    with pytest.raises(DomainError):
        ThimbleIndex((0, 1, 1), 2)
    with pytest.raises(DomainError):
        ThimbleIndex((1, 1), 2)
    assert len(list(ThimbleIndex.all(3))) == 81


def test_inadmissible_delta():
    # m = (1,0,0): delta = 1 makes delta + m_0 + 1 = 3 divisible by 3
    with pytest.raises(InadmissibleDelta):
        oscint.gamma_closed_form(2, (1, 0, 0), (1, 1, 1), 1, Fraction(1, 3))


def test_chi_identity_literal():
    checked, failures = oscint.chi_identity_table(literal=True)
    assert checked == 64
    assert failures == []


def test_chi_identity_with_modulus():
    checked, failures = oscint.chi_identity_table(literal=False)
    assert checked == 64 and failures == []


@pytest.mark.parametrize("m", [(0, 0, 0), (1, 0, 0), (1, 1, 0), (1, 1, 1)])
def test_cubic_real_structure(m):
    vals = oscint.cubic_real_structure(mp.mpc(0.3, -1.1), m, PREC)
    assert len(vals) == 27
    assert all(abs(mp.im(v)) < TOL for v in vals.values())


def test_cubic_real_structure_domain():
    with pytest.raises(DomainError):
        oscint.cubic_real_structure(1, (2, 0, 0))


exps = st.dictionaries(st.integers(-20, 20), st.integers(-5, 5), max_size=5)


@given(exps, exps, st.sampled_from([3, 4, 12]))
def test_cyclotomic_ring_matches_complex(p, q, k):
    a, b = Cyclotomic.from_powers(k, p), Cyclotomic.from_powers(k, q)
    with mp.workprec(128):
        za, zb = a.to_complex(128), b.to_complex(128)
        assert abs((a * b).to_complex(128) - za * zb) < mp.mpf(10) ** -30
        assert abs((a + b).to_complex(128) - (za + zb)) < mp.mpf(10) ** -30
        assert abs(a.conjugate().to_complex(128) - mp.conj(za)) < mp.mpf(10) ** -30
    # equality is exact: a representation is canonical
    assert (a == b) == (abs(za - zb) < 1e-20)


def test_cyclotomic_polynomials():
    assert oscint.cyclotomic_polynomial(12) == (1, 0, -1, 0, 1)
    assert oscint.cyclotomic_polynomial(3) == (1, 1, 1)


def test_dump_csv(tmp_path):
    path = tmp_path / "osc.csv"
    count = oscint.dump_csv(path, 2, (0, 0, 0), points=(Fraction(1, 3),), precision=128)
    rows = list(csv.reader(open(path)))
    assert rows[0] == ["m", "h", "a", "value_re", "value_im", "method"]
    assert len(rows) - 1 == count == 2 * 8
    series = [r for r in rows[1:] if r[5] == "series"]
    closed = [r for r in rows[1:] if r[5] == "closed_form"]
    for s, c in zip(series, closed):
        assert abs(mp.mpf(s[3]) - mp.mpf(c[3])) < mp.mpf(10) ** -30
