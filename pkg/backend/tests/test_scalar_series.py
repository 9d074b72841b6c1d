from fractions import Fraction

import numpy as np
import pytest

from app.core.errors import CenterMismatchError, InsufficientTruncationError, NotLocallyInvertibleError
from app.core.scalar_series import (
    I_UNIT,
    ONE,
    ZERO,
    ExactScalar,
    LaurentSeries,
    as_scalar,
    conj_flip,
    expand_at,
    series_arith,
    series_invert,
    singular_part,
    translate,
)


def s(coeffs, valuation=0, order=None, center="0"):
    return LaurentSeries.build(coeffs, valuation, order, center)


def test_parse_scalars():
    assert ExactScalar.parse("1/2+3/4*i") == ExactScalar(Fraction(1, 2), Fraction(3, 4))
    assert ExactScalar.parse("-i") == -I_UNIT
    assert ExactScalar.parse("5") == 5
    assert ExactScalar.parse("2/3*i") == ExactScalar(0, Fraction(2, 3))
    assert str(as_scalar("-1+i")) == "-1+i"
    with pytest.raises(ValueError):
        ExactScalar.parse("1/2x")


def test_scalar_arithmetic_is_exact():
    z = as_scalar("1+2*i")
    assert z * z.inverse() == ONE
    assert z * z.conjugate() == 5
    assert I_UNIT**2 == -1
    assert (z / 2).re == Fraction(1, 2)


def test_product_with_pole_inherits_order():
    a = s(["1", "1"], valuation=-1, order=4)
    b = s(["0", "1"], order=None)
    prod = a * b
    assert prod.coeff(0) == 1 and prod.coeff(1) == 1
    assert prod.coeff(2) == 0
    assert prod.order == 5


def test_adding_exact_zero_is_identity():
    a = s(["1", "2"], valuation=-1, order=3)
    total = a + LaurentSeries.zero()
    assert total == a


def test_truncated_product():
    a = s(["1", "1"], order=3)
    b = s(["1", "-1"], order=3)
    prod = a * b
    assert prod.order == 3
    assert [prod.coeff(k) for k in range(4)] == [1, 0, -1, 0]
    with pytest.raises(InsufficientTruncationError):
        prod.coeff(4)


def test_center_mismatch():
    with pytest.raises(CenterMismatchError):
        s(["1"], center="0") + s(["1"], center="1")


def test_geometric_inverse():
    inv = series_invert(s(["1", "-1"], order=3))
    assert inv.order == 3
    assert [inv.coeff(k) for k in range(4)] == [1, 1, 1, 1]


def test_monomial_inverse_is_exact():
    inv = series_invert(LaurentSeries.monomial(1))
    assert inv.exact
    assert inv.items() == [(-1, ONE)]


def test_inverse_to_order_one():
    inv = series_invert(s(["2", "1"], order=1))
    assert inv.coeff(0) == Fraction(1, 2)
    assert inv.coeff(1) == Fraction(-1, 4)
    check = s(["2", "1"], order=1) * inv
    assert check.coeff(0) == 1 and check.coeff(1) == 0


def test_inverse_of_zero():
    with pytest.raises(NotLocallyInvertibleError):
        series_invert(LaurentSeries.zero())
    with pytest.raises(InsufficientTruncationError):
        series_invert(LaurentSeries.zero(order=5))


def test_singular_part():
    a = s(["1", "0", "3", "1"], valuation=-2)
    sp = singular_part(a)
    assert sp.items() == [(-2, ONE)]
    assert singular_part(s(["1", "2"])).is_zero
    b = s(["1", "0", "1"], valuation=-1)
    assert singular_part(singular_part(b)) == singular_part(b)


def test_translate():
    a = LaurentSeries.monomial(1)
    assert translate(a, 0) is a
    sigma0 = as_scalar("1+i")
    moved = translate(a, sigma0)
    assert moved.center == -sigma0
    # sigma + sigma0 about the new center: the value at sigma = -sigma0 + t is t
    assert moved.items() == [(1, ONE)]
    back = expand_at(moved, 0)
    assert back.coeff(0) == sigma0 and back.coeff(1) == 1
    pole = LaurentSeries.monomial(-1)
    assert translate(pole, 0) == pole


def test_conj_flip():
    a = s(["0", "i"])
    flipped = conj_flip(a)
    assert flipped.coeff(1) == -I_UNIT
    real = s(["1", "2"], center="3")
    assert conj_flip(real) == real
    b = s(["1+2*i"], valuation=-1)
    assert conj_flip(conj_flip(b)) == b


def test_expand_at_polynomial_and_pole():
    a = s(["0", "0", "1"])
    moved = expand_at(a, 1)
    assert [moved.coeff(k) for k in range(3)] == [1, 2, 1]
    with pytest.raises(InsufficientTruncationError):
        expand_at(LaurentSeries.monomial(-1), 1)
    # 1/sigma about 1 is sum (-1)^k (sigma - 1)^k
    geometric = expand_at(LaurentSeries.monomial(-1), 1, order=3)
    assert [geometric.coeff(k) for k in range(4)] == [1, -1, 1, -1]


def test_dict_form():
    a = s(["1/2", "i"], valuation=-1, order=3, center="1+i")
    assert LaurentSeries.from_dict(a.to_dict()) == a


def random_scalar(rng):
    re = Fraction(int(rng.integers(-4, 5)), int(rng.integers(1, 4)))
    im = Fraction(int(rng.integers(-4, 5)), int(rng.integers(1, 4)))
    return ExactScalar(re, im)


def random_series(rng, truncated=False, holomorphic=False, center="0"):
    """Series with a nonzero leading coefficient."""
    valuation = 0 if holomorphic else int(rng.integers(-2, 2))
    coeffs = [random_scalar(rng) for _ in range(int(rng.integers(1, 5)))]
    if not coeffs[0]:
        coeffs[0] = ONE
    order = valuation + int(rng.integers(2, 6)) if truncated else None
    return s(coeffs, valuation, order, center)


@pytest.mark.parametrize("seed", range(25))
def test_scalar_ring_axioms(seed):
    rng = np.random.default_rng(seed)
    a, b, c = (random_scalar(rng) for _ in range(3))
    assert (a * b) * c == a * (b * c)
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a and a + b == b + a
    assert (a - b) + b == a
    if a:
        assert a * a.inverse() == ONE
        assert (b / a) * a == b


@pytest.mark.parametrize("seed", range(20))
def test_exact_series_ring_axioms(seed):
    rng = np.random.default_rng(100 + seed)
    a, b, c = (random_series(rng) for _ in range(3))
    assert (a * b) * c == a * (b * c)
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert a + LaurentSeries.zero() == a
    assert a * LaurentSeries.constant(ONE) == a
    assert (a - a).is_zero


@pytest.mark.parametrize("seed", range(20))
def test_truncated_products_commute_and_associate(seed):
    rng = np.random.default_rng(200 + seed)
    a, b, c = (random_series(rng, truncated=True) for _ in range(3))
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert (a * b).valuation == a.valuation + b.valuation


@pytest.mark.parametrize("seed", range(25))
def test_invert_twice_returns_the_series(seed):
    rng = np.random.default_rng(300 + seed)
    a = random_series(rng, truncated=True, center="1/2-i")
    inv = series_invert(a)
    assert inv.valuation == -a.valuation
    assert series_invert(inv) == a
    assert a * inv == s(["1"], 0, a.order - a.valuation, center="1/2-i")


@pytest.mark.parametrize("seed", range(20))
def test_translate_and_conj_flip_commute_with_arithmetic(seed):
    rng = np.random.default_rng(400 + seed)
    center = random_scalar(rng)
    theta = random_scalar(rng)
    truncated = bool(seed % 2)
    a = random_series(rng, truncated=truncated, center=center)
    b = random_series(rng, truncated=truncated, center=center)
    for op in ("add", "sub", "mul"):
        combined = series_arith(a, b, op)
        assert translate(combined, theta) == series_arith(translate(a, theta), translate(b, theta), op)
        assert conj_flip(combined) == series_arith(conj_flip(a), conj_flip(b), op)


@pytest.mark.parametrize("seed", range(15))
def test_expand_at_is_a_ring_map_on_polynomials(seed):
    rng = np.random.default_rng(500 + seed)
    a = random_series(rng, holomorphic=True)
    b = random_series(rng, holomorphic=True)
    point = random_scalar(rng)
    assert expand_at(a * b, point) == expand_at(a, point) * expand_at(b, point)
    assert expand_at(a + b, point) == expand_at(a, point) + expand_at(b, point)
    assert expand_at(expand_at(a, point), 0) == a
    assert expand_at(a, point).coeff(0) == sum((c * point**k for k, c in a.items()), ZERO)
