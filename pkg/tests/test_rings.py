from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from colpart.errors import UsageError
from colpart.rings import GF, QQ, ZZ, parse_ring


def test_parse_ring():
    assert parse_ring("Q") == QQ
    assert parse_ring("Z") == ZZ
    assert parse_ring("F:7") == GF(7)
    for bad in ("F:4", "F:1", "R", "F:x"):
        with pytest.raises(UsageError):
            parse_ring(bad)


def test_parse_scalars():
    assert QQ.parse("2/3") == Fraction(2, 3)
    assert ZZ.parse("-1") == -1
    assert GF(7).parse("4 mod 7") == 4
    assert GF(7).parse("-1") == 6
    assert GF(7).parse("1/2") == 4
    with pytest.raises(UsageError):
        ZZ.parse("2/3")
    with pytest.raises(UsageError):
        GF(5).parse("1 mod 7")
    assert GF(3).format(GF(3)(5)) == "2 mod 3"


@given(st.integers(-50, 50), st.integers(-50, 50), st.sampled_from([2, 3, 5, 7, 101]))
def test_prime_field_axioms(a, b, p):
    F = GF(p)
    x, y = F(a), F(b)
    assert F.add(x, F.neg(x)) == 0
    assert F.mul(x, y) == F.mul(y, x)
    if x != 0:
        assert F.mul(x, F.inv(x)) == 1
    assert F.power(x, p) == x


@given(st.fractions(), st.fractions())
def test_rationals(a, b):
    assert QQ.sub(QQ.add(a, b), b) == a
    if b != 0:
        assert QQ.mul(QQ.mul(a, QQ.inv(b)), b) == a
