from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from dwork import constants
from dwork.errors import DimensionError
from dwork.sectors import parse_m, sector_grading, sector_orbits, spectrum


def test_cubic_spectrum():
    assert spectrum(2).as_dict() == {Fraction(0): 1, Fraction(1, 3): 3, Fraction(2, 3): 3, Fraction(1): 1}


def test_quartic_spectrum():
    assert [c for _, c in spectrum(3).counts] == [1, 4, 10, 16, 19, 16, 10, 4, 1]


@pytest.mark.parametrize("n", [2, 3])
def test_spectrum_matches_stored_table(n):
    assert spectrum(n).as_dict() == constants.spectrum(n)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_spectrum_total_is_milnor_number(n):
    assert spectrum(n).total == n ** (n + 1)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_spectrum_symmetry(n):
    counts = spectrum(n).as_dict()
    for b, c in counts.items():
        assert counts[n - 1 - b] == c


@st.composite
def sector(draw):
    n = draw(st.integers(2, 5))
    m = draw(st.lists(st.integers(0, n - 1), min_size=n + 1, max_size=n + 1))
    return n, tuple(m)


@given(sector())
def test_grading_invariants(nm):
    n, m = nm
    s = sector_grading(m, n)
    assert s.beta == Fraction(sum(m), n + 1)
    assert -1 < s.alpha <= 0
    assert (s.beta - s.alpha).denominator == 1
    assert s.hodge_p == n + s.alpha - s.beta
    assert s.kind == ("relevant" if s.beta < 1 else "marginal" if s.beta == 1 else "irrelevant")


@given(sector(), st.randoms())
def test_grading_is_permutation_invariant(nm, rnd):
    n, m = nm
    p = list(m)
    rnd.shuffle(p)
    a, b = sector_grading(m, n), sector_grading(p, n)
    assert (a.beta, a.alpha, a.hodge_p) == (b.beta, b.alpha, b.hodge_p)


def test_hodge_index_of_example_sector():
    s = sector_grading((2, 1, 0, 0), 3)
    assert (s.beta, s.alpha, s.hodge_p) == (Fraction(3, 4), Fraction(-1, 4), 2)
    s = sector_grading((2, 1, 1, 0), 3)
    assert (s.beta, s.alpha, s.hodge_p) == (1, 0, 2)


def test_orbit_representatives():
    reps = sector_orbits(3, 1)
    assert all(r.beta <= 1 for r in reps)
    assert all(list(r.m) == sorted(r.m, reverse=True) for r in reps)
    assert len({r.m for r in reps}) == len(reps)
    assert (1, 0, 0, 0) in {r.m for r in reps}


@pytest.mark.parametrize("text,expected", [("1000", (1, 0, 0, 0)), ("1,0,0,0", (1, 0, 0, 0)),
                                           (" 2100 ", (2, 1, 0, 0))])
def test_parse_m(text, expected):
    assert parse_m(text, 3) == expected


@pytest.mark.parametrize("text", ["100", "10000", "1x00", "1,-1,0,0", ""])
def test_parse_m_rejects(text):
    with pytest.raises(DimensionError):
        parse_m(text, 3)
