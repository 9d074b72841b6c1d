"""
Exact Gaussian-rational scalars and truncated Laurent series at a movable center.

A LaurentSeries either is *exact* (a Laurent polynomial, every coefficient past
``order`` is zero) or is *truncated* (coefficients past ``order`` are unknown).
Arithmetic keeps the tightest order that can be proven from the operands and
raises InsufficientTruncationError instead of inventing coefficients.
"""

import logging
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

from app.core.errors import (
    CenterMismatchError,
    InsufficientTruncationError,
    NotLocallyInvertibleError,
)

logger = logging.getLogger(__name__)

DEFAULT_INVERSE_ORDER = 12

_TERM = re.compile(r"([+-]?)([^+-]+)")


@dataclass(frozen=True)
class ExactScalar:
    """A complex number re + im*i with rational parts."""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __post_init__(self):
        if not isinstance(self.re, Fraction):
            object.__setattr__(self, "re", Fraction(self.re))
        if not isinstance(self.im, Fraction):
            object.__setattr__(self, "im", Fraction(self.im))

    @classmethod
    def parse(cls, text: str) -> "ExactScalar":
        """Parse strings such as ``"1/2+3/4*i"``, ``"-i"``, ``"5"`` or ``"2/3*i"``."""
        cleaned = text.replace(" ", "").replace("I", "i").replace("j", "i")
        if not cleaned:
            raise ValueError("empty scalar string")
        real = Fraction(0)
        imag = Fraction(0)
        consumed = 0
        for match in _TERM.finditer(cleaned):
            if match.start() != consumed:
                raise ValueError(f"cannot parse scalar {text!r}")
            consumed = match.end()
            sign = -1 if match.group(1) == "-" else 1
            body = match.group(2)
            if body.endswith("i"):
                factor = body[:-1].rstrip("*")
                imag += sign * (Fraction(factor) if factor else Fraction(1))
            else:
                real += sign * Fraction(body)
        if consumed != len(cleaned):
            raise ValueError(f"cannot parse scalar {text!r}")
        return cls(real, imag)

    def __str__(self) -> str:
        if self.im == 0:
            return str(self.re)
        imag = "i" if abs(self.im) == 1 else f"{abs(self.im)}*i"
        if self.re == 0:
            return imag if self.im > 0 else f"-{imag}"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{imag}"

    def __repr__(self) -> str:
        return f"ExactScalar({self})"

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __eq__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __neg__(self):
        return ExactScalar(-self.re, -self.im)

    def __add__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return ExactScalar(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return ExactScalar(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        if self.im == 0 and other.im == 0:
            return ExactScalar(self.re * other.re, Fraction(0))
        return ExactScalar(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def inverse(self) -> "ExactScalar":
        norm = self.re * self.re + self.im * self.im
        if norm == 0:
            raise ZeroDivisionError("division by exact zero")
        return ExactScalar(self.re / norm, -self.im / norm)

    def __truediv__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            return NotImplemented
        base = self if exponent >= 0 else self.inverse()
        result = ONE
        for _ in range(abs(exponent)):
            result = result * base
        return result

    def conjugate(self) -> "ExactScalar":
        return ExactScalar(self.re, -self.im)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def is_real(self) -> bool:
        return self.im == 0


def _coerce(value: Any) -> Optional[ExactScalar]:
    if isinstance(value, ExactScalar):
        return value
    if isinstance(value, (int, Fraction)):
        return ExactScalar(Fraction(value), Fraction(0))
    return None


def as_scalar(value: Any) -> ExactScalar:
    """Coerce ints, Fractions, exact strings and sympy Gaussian rationals."""
    coerced = _coerce(value)
    if coerced is not None:
        return coerced
    if isinstance(value, str):
        return ExactScalar.parse(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return ExactScalar(Fraction(value[0]), Fraction(value[1]))
    # sympy numbers
    if hasattr(value, "as_real_imag"):
        real, imag = value.as_real_imag()
        return ExactScalar(Fraction(str(real)), Fraction(str(imag)))
    raise TypeError(f"cannot convert {value!r} to an exact scalar")


ZERO = ExactScalar()
ONE = ExactScalar(Fraction(1))
I_UNIT = ExactScalar(Fraction(0), Fraction(1))


def _bound(series: "LaurentSeries") -> float:
    return math.inf if series.exact else series.order


@dataclass(frozen=True)
class LaurentSeries:
    """
    Laurent expansion sum_k coeffs[k - valuation] * (sigma - center)**k.

    Truncated series know every coefficient with exponent <= order. A truncated
    series with no coefficients is zero up to its order and has
    ``valuation == order + 1``. Exact series are Laurent polynomials; their
    ``order`` is the highest stored exponent (``-1`` with ``valuation == 0`` for
    the exact zero).
    """

    center: ExactScalar
    valuation: int
    coeffs: Tuple[ExactScalar, ...]
    order: int
    exact: bool = False

    @classmethod
    def build(
        cls,
        coeffs: Iterable[Any],
        valuation: int = 0,
        order: Optional[int] = None,
        center: Any = ZERO,
    ) -> "LaurentSeries":
        """Normalize raw coefficients; ``order=None`` builds an exact series."""
        values = [as_scalar(c) for c in coeffs]
        center = as_scalar(center)
        if order is not None:
            top = order - valuation + 1
            if top < 0:
                values = []
                valuation = order + 1
            else:
                values = values[:top] + [ZERO] * max(0, top - len(values))
        start = 0
        while start < len(values) and not values[start]:
            start += 1
        values = values[start:]
        valuation += start
        if order is None:
            while values and not values[-1]:
                values.pop()
            if not values:
                return cls(center, 0, (), -1, True)
            return cls(center, valuation, tuple(values), valuation + len(values) - 1, True)
        if not values:
            return cls(center, order + 1, (), order, False)
        return cls(center, valuation, tuple(values), order, False)

    @classmethod
    def zero(cls, center: Any = ZERO, order: Optional[int] = None) -> "LaurentSeries":
        return cls.build([], 0, order, center)

    @classmethod
    def constant(cls, value: Any, center: Any = ZERO) -> "LaurentSeries":
        return cls.build([value], 0, None, center)

    @classmethod
    def monomial(cls, exponent: int, value: Any = ONE, center: Any = ZERO) -> "LaurentSeries":
        return cls.build([value], exponent, None, center)

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def is_holomorphic(self) -> bool:
        return self.is_zero or self.valuation >= 0

    @property
    def precision(self) -> float:
        return _bound(self)

    @property
    def leading(self) -> ExactScalar:
        return self.coeffs[0] if self.coeffs else ZERO

    def coeff(self, exponent: int) -> ExactScalar:
        if not self.exact and exponent > self.order:
            raise InsufficientTruncationError(
                f"coefficient of exponent {exponent} requested, series known to order {self.order}"
            )
        index = exponent - self.valuation
        if 0 <= index < len(self.coeffs):
            return self.coeffs[index]
        return ZERO

    def items(self) -> List[Tuple[int, ExactScalar]]:
        return [(self.valuation + k, c) for k, c in enumerate(self.coeffs) if c]

    def truncate(self, order: int) -> "LaurentSeries":
        if not self.exact and order >= self.order:
            return self
        values = [self.coeff(k) for k in range(self.valuation, order + 1)]
        return LaurentSeries.build(values, self.valuation, order, self.center)

    def shift(self, power: int) -> "LaurentSeries":
        """Multiply by (sigma - center)**power."""
        if self.exact and self.is_zero:
            return self
        return LaurentSeries(
            self.center, self.valuation + power, self.coeffs, self.order + power, self.exact
        )

    def scale(self, factor: Any) -> "LaurentSeries":
        factor = as_scalar(factor)
        if not factor:
            return LaurentSeries.zero(self.center, None if self.exact else self.order)
        return LaurentSeries(
            self.center, self.valuation, tuple(c * factor for c in self.coeffs), self.order, self.exact
        )

    def __add__(self, other: "LaurentSeries") -> "LaurentSeries":
        return series_arith(self, other, "add")

    def __sub__(self, other: "LaurentSeries") -> "LaurentSeries":
        return series_arith(self, other, "sub")

    def __mul__(self, other: "LaurentSeries") -> "LaurentSeries":
        return series_arith(self, other, "mul")

    def __neg__(self) -> "LaurentSeries":
        return self.scale(-ONE)

    def derivative(self) -> "LaurentSeries":
        values = [c * (self.valuation + k) for k, c in enumerate(self.coeffs)]
        if self.exact:
            return LaurentSeries.build(values, self.valuation - 1, None, self.center)
        return LaurentSeries.build(values, self.valuation - 1, self.order - 1, self.center)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "center": str(self.center),
            "valuation": self.valuation,
            "order": None if self.exact else self.order,
            "coeffs": [str(c) for c in self.coeffs],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "LaurentSeries":
        return cls.build(
            data.get("coeffs", []),
            int(data.get("valuation", 0)),
            data.get("order"),
            data.get("center", "0"),
        )


def _check_centers(a: LaurentSeries, b: LaurentSeries):
    if a.center != b.center:
        raise CenterMismatchError(f"series centered at {a.center} and {b.center}")


def _finish(values: Dict[int, ExactScalar], order: float, center: ExactScalar) -> LaurentSeries:
    if not values:
        return LaurentSeries.zero(center, None if order == math.inf else int(order))
    low = min(values)
    high = max(values)
    if order != math.inf:
        high = int(order)
    dense = [values.get(k, ZERO) for k in range(low, high + 1)]
    return LaurentSeries.build(dense, low, None if order == math.inf else int(order), center)


def series_arith(a: LaurentSeries, b: LaurentSeries, op: str) -> LaurentSeries:
    """Add, subtract or multiply two series sharing a center."""
    _check_centers(a, b)
    if op in ("add", "sub"):
        order = min(_bound(a), _bound(b))
        sign = ONE if op == "add" else -ONE
        values: Dict[int, ExactScalar] = {}
        for k, c in a.items():
            if k <= order:
                values[k] = c
        for k, c in b.items():
            if k <= order:
                values[k] = values.get(k, ZERO) + sign * c
        return _finish(values, order, a.center)
    if op == "mul":
        if (a.exact and a.is_zero) or (b.exact and b.is_zero):
            return LaurentSeries.zero(a.center)
        order = min(_bound(a) + b.valuation, _bound(b) + a.valuation)
        values = {}
        for i, x in a.items():
            for j, y in b.items():
                k = i + j
                if k <= order:
                    values[k] = values.get(k, ZERO) + x * y
        return _finish(values, order, a.center)
    raise ValueError(f"unknown series operation {op!r}")


def series_invert(a: LaurentSeries, order: Optional[int] = None) -> LaurentSeries:
    """
    Reciprocal by the geometric-series recursion.

    Args:
        a: series with a nonzero leading coefficient.
        order: exponent order wanted for an exact non-monomial input (its
            inverse is not a polynomial); ignored for truncated input.

    Returns:
        b with a*b = 1 up to the provable order and b.valuation = -a.valuation.
    """
    if a.is_zero:
        if a.exact:
            raise NotLocallyInvertibleError("cannot invert the exact zero series")
        raise InsufficientTruncationError(f"series is zero up to order {a.order}")
    v = a.valuation
    unit = [c for c in a.coeffs]
    if a.exact and len(unit) == 1:
        return LaurentSeries.build([unit[0].inverse()], -v, None, a.center)
    if a.exact:
        target = (order if order is not None else DEFAULT_INVERSE_ORDER) + v
    else:
        target = a.order - v
    head = unit[0].inverse()
    inverse: List[ExactScalar] = [head]
    for k in range(1, target + 1):
        acc = ZERO
        for j in range(1, min(k, len(unit) - 1) + 1):
            acc = acc + unit[j] * inverse[k - j]
        inverse.append(-head * acc)
    return LaurentSeries.build(inverse, -v, target - v, a.center)


def singular_part(a: LaurentSeries) -> LaurentSeries:
    """The negative-exponent tail; exact as soon as all of it is known."""
    negative = [(k, c) for k, c in a.items() if k < 0]
    if not a.exact and a.order < -1:
        values = dict(negative)
        return _finish(values, a.order, a.center)
    if not negative:
        return LaurentSeries.zero(a.center)
    low = negative[0][0]
    dense = [a.coeff(k) for k in range(low, 0)]
    return LaurentSeries.build(dense, low, None, a.center)


def translate(a: LaurentSeries, theta: Any) -> LaurentSeries:
    """
    tau_theta: sigma -> a(sigma + theta), a series at center - theta.

    Coefficients relative to the center do not change, so this is exact for
    truncated series as well.
    """
    theta = as_scalar(theta)
    if not theta:
        return a
    return LaurentSeries(a.center - theta, a.valuation, a.coeffs, a.order, a.exact)


def conj_flip(a: LaurentSeries) -> LaurentSeries:
    """sigma -> conj(a(conj(sigma))) at the conjugate center."""
    return LaurentSeries(
        a.center.conjugate(), a.valuation, tuple(c.conjugate() for c in a.coeffs), a.order, a.exact
    )


def binomial(n: int, k: int) -> int:
    if n >= 0:
        return math.comb(n, k) if k <= n else 0
    # generalized binomial for negative upper index
    return (-1) ** k * math.comb(-n + k - 1, k)


def expand_at(a: LaurentSeries, point: Any, order: Optional[int] = None) -> LaurentSeries:
    """
    Re-expand the same function about another point.

    Holomorphic Laurent polynomials re-expand exactly. Negative powers are
    re-expanded as Taylor series (the point must differ from the center) and
    then ``order`` is required.
    """
    point = as_scalar(point)
    if point == a.center:
        return a
    if not a.exact:
        raise InsufficientTruncationError(
            "re-expansion about another point needs an exact Laurent polynomial"
        )
    d = point - a.center
    values: Dict[int, ExactScalar] = {}
    negative = False
    for k, c in a.items():
        if k >= 0:
            for j in range(0, k + 1):
                values[j] = values.get(j, ZERO) + c * binomial(k, j) * d ** (k - j)
        else:
            negative = True
            if order is None:
                raise InsufficientTruncationError(
                    "re-expanding a pole about another point needs a target order"
                )
            for j in range(0, order + 1):
                values[j] = values.get(j, ZERO) + c * binomial(k, j) * d ** (k - j)
    if negative:
        values = {k: v for k, v in values.items() if k <= order}
        return _finish(values, order, point)
    return _finish(values, math.inf, point)


def scalars(values: Sequence[Any]) -> List[ExactScalar]:
    return [as_scalar(v) for v in values]
