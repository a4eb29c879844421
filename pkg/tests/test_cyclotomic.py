"""Exact arithmetic: field operations, conjugation, intervals, serialization."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lambda_hvm.cyclotomic import CycNumber, rational, sqrt_int, zeta
from lambda_hvm.linalg import CycMatrix, exact_rank


def test_root_of_unity_products():
    assert zeta(4) * zeta(4) == -1
    assert zeta(3) + zeta(3, 2) == -1
    assert zeta(6) ** 6 == 1


def test_conjugation_and_realness():
    i = zeta(4)
    assert i.conjugate() == -i and not i.is_real()
    x = zeta(3) + zeta(3, 2)
    assert x.is_real() and x.conjugate() == x
    q = rational(Fraction(5, 3))
    assert q.conjugate() == q and q.is_real()
    assert zeta(7).conjugate().conjugate() == zeta(7)


def test_interval_enclosures():
    iv = zeta(3).interval(64)
    mid = iv.midpoint()
    assert abs(mid.real + 0.5) < 1e-15
    assert abs(mid.imag - 0.8660254037844386) < 1e-12
    assert CycNumber.zero().interval(64).width() == 0.0
    root2 = zeta(8) + zeta(8, 7)
    assert abs(float(root2) - 2 ** 0.5) < 1e-14
    # lower precision encloses higher precision
    assert zeta(5).interval(64).contains(zeta(5).interval(256))
    with pytest.raises(ValueError):
        zeta(3).interval(32)


@st.composite
def cyc_numbers(draw):
    order = draw(st.sampled_from([1, 3, 4, 8, 12]))
    deg = len(CycNumber.zero(order).num)
    nums = tuple(draw(st.integers(-9, 9)) for _ in range(deg))
    den = draw(st.integers(1, 9))
    return CycNumber(order, nums, den)


@settings(max_examples=60, deadline=None)
@given(cyc_numbers(), cyc_numbers(), cyc_numbers())
def test_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + b == b + a and a * b == b * a
    if not b.is_zero():
        assert (a / b) * b == a


@settings(max_examples=40, deadline=None)
@given(cyc_numbers())
def test_conjugation_involution_and_abs(a):
    assert a.conjugate().conjugate() == a
    m = a.abs_squared()
    assert m.is_real()
    assert m.sign() >= 0


def test_sign_decision():
    assert (sqrt_int(2) - 1).sign() == 1
    assert (sqrt_int(2) - 2).sign() == -1
    assert (zeta(3) + zeta(3, 2) + 1).sign() == 0
    assert sqrt_int(3) > 1
    with pytest.raises(ValueError):
        zeta(3).sign()


def test_exact_sqrt():
    for k in (2, 3, 5, 6, 7, 8, 12, 18):
        v = sqrt_int(k)
        assert v * v == k
        assert abs(float(v) - k ** 0.5) < 1e-12


def test_serialization_round_trip():
    values = [
        zeta(12) / 3 + Fraction(1, 2),
        rational(Fraction(-7, 6)),
        CycNumber.zero(9),
        sqrt_int(2),
    ]
    for v in values:
        assert CycNumber.parse(v.serialize()) == v
    with pytest.raises(ValueError):
        CycNumber.parse("8; 1, x")
    with pytest.raises(ValueError):
        CycNumber.parse("nonsense")


def test_cross_order_equality_and_demotion():
    assert zeta(3).promoted(12) == zeta(3)
    assert rational(2) == CycNumber.from_rational(2, 8)
    v = zeta(3).promoted(12)
    back = v.demoted(3)
    assert back is not None and back.order == 3 and back == zeta(3)
    assert zeta(12).demoted(3) is None
    assert sqrt_int(3).demoted(4) is None


def test_division_errors():
    with pytest.raises(ZeroDivisionError):
        CycNumber.zero(4).inverse()
    with pytest.raises(ValueError):
        zeta(3).promoted(4)


def test_exact_rank_examples():
    assert exact_rank(CycMatrix.identity(2)) == 2
    assert exact_rank(CycMatrix.zeros(3, 3)) == 0
    w = zeta(3)
    # second row is w^2 times the first since w^3 = 1
    m = CycMatrix([[1, w], [w * w, 1]])
    assert exact_rank(m) == 1


def test_exact_rank_matches_numeric_rank():
    import numpy as np
    import random

    rng = random.Random(3)
    for _ in range(10):
        rows = [[Fraction(rng.randint(-4, 4)) for _ in range(4)] for _ in range(4)]
        m = CycMatrix(rows)
        numeric = np.linalg.matrix_rank(m.to_complex(), tol=1e-9)
        assert exact_rank(m) == numeric
