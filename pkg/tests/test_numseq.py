import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from successionrules.numseq import (
    RationalGF,
    Recurrence,
    eval_sequence,
    format_poly,
    generating_function,
    series_of_gf,
)

from oracles import recurrence_terms


@pytest.mark.parametrize(
    "coeffs, inits, n, expected",
    [
        ((3, 2, -1), None, 7, [1, 3, 11, 38, 133, 464, 1620, 5655]),
        ((5, -6, 2), None, 6, [1, 5, 19, 67, 231, 791, 2703]),
        ((3, 2, -1), (2, 3), 7, [1, 2, 3, 12, 40, 141, 491, 1715]),
        ((2,), None, 3, [1, 2, 4, 8]),
    ],
)
def test_eval_sequence_examples(coeffs, inits, n, expected):
    assert eval_sequence(Recurrence(coeffs, inits), n) == expected


def test_big_integers_are_exact():
    f = eval_sequence(Recurrence((9, 9, 9)), 60)
    assert f == recurrence_terms((9, 9, 9), 60)
    assert f[60] > 2**64


def test_trailing_zero_rejected():
    with pytest.raises(ValueError, match="trailing"):
        Recurrence((3, 0))


def test_empty_and_wrong_inits_rejected():
    with pytest.raises(ValueError):
        Recurrence(())
    with pytest.raises(ValueError, match="expected 2"):
        Recurrence((3, 2, -1), (2,))


def test_generating_function_default():
    gf = generating_function(Recurrence((3, 2, -1)))
    assert gf.numerator == (1,)
    assert gf.denominator == (1, -3, -2, 1)
    assert str(gf) == "(1) / (1 - 3x - 2x^2 + x^3)"


def test_geometric_series():
    gf = generating_function(Recurrence((1,)))
    assert gf == RationalGF((1,), (1, -1))
    assert series_of_gf(gf, 3) == [1, 1, 1, 1]


def test_generating_function_explicit_inits_residual():
    gf = generating_function(Recurrence((3, 2, -1), (2, 3)))
    # independent check: truncated series times denominator leaves the numerator
    series = recurrence_terms((3, 2, -1), 10, (2, 3))
    den = gf.denominator
    prod = [sum(series[j] * den[i - j] for j in range(i + 1) if i - j < len(den)) for i in range(11)]
    assert prod == list(gf.numerator) + [0] * (11 - len(gf.numerator))
    assert gf.numerator == (1, -1, -5)
    assert series_of_gf(gf, 4) == [1, 2, 3, 12, 40]


def test_series_of_gf_worked_sequence():
    assert series_of_gf(RationalGF((1,), (1, -3, -2, 1)), 4) == [1, 3, 11, 38, 133]


def test_series_requires_unit_constant_term():
    with pytest.raises(ValueError):
        RationalGF((1,), (2, -1))


def test_format_poly():
    assert format_poly((1, -1, -5)) == "1 - x - 5x^2"
    assert format_poly(()) == "0"
    assert format_poly((0, -1)) == "-x"


coeff_vectors = st.lists(st.integers(-9, 9), min_size=1, max_size=5).filter(lambda c: c[-1] != 0)


@settings(max_examples=200, deadline=None)
@given(coeff_vectors, st.data())
def test_series_matches_recurrence(coeffs, data):
    k = len(coeffs)
    inits = data.draw(st.one_of(st.none(), st.lists(st.integers(-9, 9), min_size=k - 1, max_size=k - 1)))
    rec = Recurrence(coeffs, inits)
    assert series_of_gf(generating_function(rec), 30) == eval_sequence(rec, 30)
    assert eval_sequence(rec, 30) == recurrence_terms(coeffs, 30, inits or ())


@settings(max_examples=200, deadline=None)
@given(coeff_vectors)
def test_convolution_identity(coeffs):
    f = eval_sequence(Recurrence(coeffs), 30)
    for n in range(31):
        lhs = f[n] - sum(a * f[n - i] for i, a in enumerate(coeffs, start=1) if n - i >= 0)
        assert lhs == (1 if n == 0 else 0)
