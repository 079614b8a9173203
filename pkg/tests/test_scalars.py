import cmath
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from thetagraph.scalars import (
    EXACT,
    FLOAT,
    BackendMismatch,
    QQi,
    Theta,
    ThetaError,
    format_exact,
    gaussian_sqrt,
    is_gaussian_rational_text,
    parse_complex,
    parse_theta,
)

from conftest import gaussian, nonzero_gaussian


@given(gaussian, gaussian, gaussian)
def test_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + b == b + a and a * b == b * a
    assert a - a == QQi(0)


@given(nonzero_gaussian)
def test_inverse(a):
    assert a * a.inverse() == QQi(1)
    assert a / a == QQi(1)


@given(gaussian)
def test_conjugate_and_norm(a):
    assert a * a.conjugate() == QQi(a.abs2())
    assert a.conjugate().conjugate() == a


@given(gaussian)
def test_print_parse_round_trip(a):
    assert QQi(*parse_complex(format_exact(a), exact=True)) == a


@given(gaussian)
def test_float_image_agrees(a):
    assert abs(complex(a) - complex(float(a.real), float(a.imag))) < 1e-12


def test_representation_is_reduced():
    q = QQi(Fraction(2, 4), Fraction(6, 8))
    assert q == QQi(Fraction(1, 2), Fraction(3, 4))
    assert hash(q) == hash(QQi(Fraction(1, 2), Fraction(3, 4)))


@pytest.mark.parametrize("value, text", [
    (QQi(0), "0"),
    (QQi(0, 1), "i"),
    (QQi(0, -1), "-i"),
    (QQi(Fraction(3, 5), Fraction(4, 5)), "3/5+4/5*i"),
    (QQi(-2), "-2"),
    (QQi(Fraction(1, 2), -1), "1/2-i"),
])
def test_format_exact(value, text):
    assert format_exact(value) == text


def test_backend_mixing_raises():
    with pytest.raises(BackendMismatch):
        QQi(1) + 1.5j
    with pytest.raises(BackendMismatch):
        1.5j * QQi(1)


@pytest.mark.parametrize("text, value", [
    ("2", QQi(2)),
    ("-1/2", QQi(Fraction(-1, 2))),
    ("i", QQi(0, 1)),
    ("-i", QQi(0, -1)),
    ("3/5+4/5i", QQi(Fraction(3, 5), Fraction(4, 5))),
    ("3/5+4/5*i", QQi(Fraction(3, 5), Fraction(4, 5))),
    ("1 - 2i", QQi(1, -2)),
])
def test_parse_exact(text, value):
    assert parse_theta(text).value == value
    assert is_gaussian_rational_text(text)


@pytest.mark.parametrize("text, value", [
    ("exp(i*pi/3)", cmath.exp(1j * cmath.pi / 3)),
    ("exp(i*pi/7)", cmath.exp(1j * cmath.pi / 7)),
    ("0.5+0.25i", 0.5 + 0.25j),
])
def test_parse_float(text, value):
    t = parse_theta(text, FLOAT)
    assert t.backend == FLOAT
    assert abs(t.value - value) < 1e-15


def test_exact_rejects_transcendental():
    assert not is_gaussian_rational_text("exp(i*pi/3)")
    with pytest.raises(ThetaError, match="Gaussian-rational"):
        parse_theta("exp(i*pi/3)", EXACT)


@pytest.mark.parametrize("text", ["0", "0/3", "0+0i", "0.0"])
def test_zero_theta_rejected(text):
    with pytest.raises(ThetaError, match="theta must be nonzero"):
        parse_theta(text, FLOAT if "." in text else EXACT)


@pytest.mark.parametrize("text", ["abc", "1/", "2++i", ""])
def test_parse_errors(text):
    with pytest.raises(ThetaError):
        parse_theta(text)


@given(nonzero_gaussian)
def test_theta_lambda(v):
    t = Theta.from_value(v, EXACT)
    assert t.lam == v + v.inverse()
    assert t.inverse * v == QQi(1)


@pytest.mark.parametrize("v, pm1, pmi", [
    (QQi(1), True, False), (QQi(-1), True, False), (QQi(0, 1), False, True),
    (QQi(0, -1), False, True), (QQi(2), False, False),
])
def test_special_points(v, pm1, pmi):
    t = Theta.from_value(v, EXACT)
    assert t.is_plus_minus_one() == pm1
    assert t.is_plus_minus_i() == pmi


@given(gaussian)
def test_gaussian_sqrt_of_square(a):
    r = gaussian_sqrt(a * a)
    assert r is not None and r * r == a * a


def test_gaussian_sqrt_missing():
    assert gaussian_sqrt(QQi(2)) is None
    assert gaussian_sqrt(QQi(0, 2)) == QQi(1, 1)
