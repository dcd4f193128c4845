"""Truncated Laurent series in ``t = q^(1/2)`` with exact rational coefficients.

A :class:`Series` stores a dense run of coefficients starting at ``min_exp``
(a t-exponent, possibly negative) together with a guaranteed order: every
coefficient at a t-exponent ``<= order`` is correct, anything above is
unknown.  Exact series (Laurent polynomials) carry ``order = None`` and
``exact = True``; all exponents above the stored support are then zero.

Coefficients are Python ints whenever they are integral and
:class:`fractions.Fraction` otherwise; :meth:`Series.coefficient` always
hands back a ``Fraction``.

Products of long integer runs use Kronecker substitution (pack into one big
integer, multiply, unpack), which keeps order-200 arithmetic cheap in pure
Python.
"""

from __future__ import annotations

import math
import operator
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Union

Coeff = Union[int, Fraction]

_INF = math.inf


class SeriesError(ArithmeticError):
    """Raised when a series operation is outside its contract."""


class InsufficientOrder(SeriesError):
    """A coefficient was requested beyond the guaranteed order."""


def _coerce(c) -> Coeff:
    if isinstance(c, bool):
        raise TypeError("bool is not a series coefficient")
    if isinstance(c, int):
        return c
    if isinstance(c, Fraction):
        return c.numerator if c.denominator == 1 else c
    raise TypeError(f"coefficient must be int or Fraction, got {type(c).__name__}")


def _norm(c: Coeff) -> Coeff:
    if type(c) is Fraction and c.denominator == 1:
        return c.numerator
    return c


# --------------------------------------------------------------------------
# coefficient-list kernels


def _schoolbook(x: list[int], y: list[int]) -> list[int]:
    out = [0] * (len(x) + len(y) - 1)
    ny = len(y)
    for i, c in enumerate(x):
        if c:
            out[i : i + ny] = map(operator.add, out[i : i + ny], map(c.__mul__, y))
    return out


def _pack(x: list[int], nbytes: int) -> int:
    zero = bytes(nbytes)
    pos = b"".join(c.to_bytes(nbytes, "little") if c > 0 else zero for c in x)
    value = int.from_bytes(pos, "little")
    if any(c < 0 for c in x):
        neg = b"".join((-c).to_bytes(nbytes, "little") if c < 0 else zero for c in x)
        value -= int.from_bytes(neg, "little")
    return value


def _kronecker(x: list[int], y: list[int]) -> list[int]:
    bound = max(map(abs, x)) * max(map(abs, y)) * min(len(x), len(y))
    nbytes = (bound.bit_length() + 1) // 8 + 1
    n = len(x) + len(y) - 1
    half = 1 << (8 * nbytes - 1)
    # every signed digit is shifted into [1, 2^w) so the bytes decode without carries
    offset = int.from_bytes(half.to_bytes(nbytes, "little") * n, "little")
    raw = (_pack(x, nbytes) * _pack(y, nbytes) + offset).to_bytes(nbytes * n, "little")
    return [
        int.from_bytes(raw[i : i + nbytes], "little") - half
        for i in range(0, nbytes * n, nbytes)
    ]


def _iconvolve(x: list[int], y: list[int]) -> list[int]:
    if not x or not y:
        return []
    nx = len(x) - x.count(0)
    ny = len(y) - y.count(0)
    if nx * len(y) > ny * len(x):
        x, y, nx, ny = y, x, ny, nx
    if nx <= 8 or nx * len(y) <= 4000:
        return _schoolbook(x, y)
    return _kronecker(x, y)


def _as_integers(x: list[Coeff]) -> tuple[list[int], int]:
    den = 1
    for c in x:
        if type(c) is Fraction:
            den = math.lcm(den, c.denominator)
    if den == 1:
        return x, 1  # type: ignore[return-value]
    return [int(c * den) for c in x], den


def _convolve(x: list[Coeff], y: list[Coeff]) -> list[Coeff]:
    xi, dx = _as_integers(x)
    yi, dy = _as_integers(y)
    out = _iconvolve(xi, yi)
    den = dx * dy
    if den == 1:
        return out
    return [_norm(Fraction(c, den)) for c in out]


# --------------------------------------------------------------------------


class Series:
    """Immutable truncated Laurent series in ``t``.

    Build instances with the constructor (dense coefficients from
    ``min_exp`` upward) or with :meth:`monomial` / :meth:`from_terms`.
    ``order=None`` means the value is an exact Laurent polynomial.
    """

    __slots__ = ("_min", "_coeffs", "_order")

    def __init__(self, coeffs: Iterable = (), min_exp: int = 0, order: int | None = None):
        self._set(int(min_exp), [_coerce(c) for c in coeffs], order)

    @classmethod
    def _raw(cls, min_exp: int, coeffs: list[Coeff], order: int | None) -> Series:
        s = object.__new__(cls)
        s._set(min_exp, coeffs, order)
        return s

    def _set(self, lo: int, c: list[Coeff], order: int | None) -> None:
        if order is not None:
            order = int(order)
            keep = order - lo + 1
            if keep <= 0:
                c = []
            elif len(c) > keep:
                c = c[:keep]
        start = 0
        while start < len(c) and not c[start]:
            start += 1
        if start == len(c):
            # zero on the whole window
            self._coeffs = ()
            self._order = order
            self._min = 0 if order is None else order + 1
            return
        lo += start
        end = len(c)
        if order is None:
            while not c[end - 1]:
                end -= 1
            stored = c[start:end]
        else:
            stored = c[start:end] + [0] * (order - lo + 1 - (end - start))
        self._min = lo
        self._coeffs = tuple(stored)
        self._order = order

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, order: int | None = None) -> Series:
        """The zero series, exact unless an order is given (then ``O(t^(order+1))``)."""
        return cls._raw(0, [], order)

    @classmethod
    def one(cls) -> Series:
        return cls._raw(0, [1], None)

    @classmethod
    def monomial(cls, exp: int, coeff: Coeff = 1) -> Series:
        """``coeff * t^exp`` as an exact series."""
        return cls._raw(int(exp), [_coerce(coeff)], None)

    @classmethod
    def from_terms(cls, terms: dict[int, Coeff] | Iterable[tuple[int, Coeff]],
                   order: int | None = None) -> Series:
        """Build from ``{t_exponent: coefficient}`` (repeated exponents add up)."""
        items = list(terms.items()) if isinstance(terms, dict) else list(terms)
        if not items:
            return cls.zero(order)
        lo = min(e for e, _ in items)
        hi = max(e for e, _ in items)
        dense: list[Coeff] = [0] * (hi - lo + 1)
        for e, c in items:
            dense[e - lo] = _norm(dense[e - lo] + _coerce(c))
        return cls._raw(lo, dense, order)

    # -- accessors --------------------------------------------------------

    @property
    def min_exp(self) -> int:
        """Lowest stored t-exponent.

        For a series that is zero on its whole window this is ``order + 1``
        (a lower bound on the true valuation); for the exact zero it is 0.
        """
        return self._min

    @property
    def coeffs(self) -> tuple[Coeff, ...]:
        return self._coeffs

    @property
    def order(self) -> int | None:
        """Largest guaranteed t-exponent, or ``None`` for exact series."""
        return self._order

    @property
    def exact(self) -> bool:
        return self._order is None

    @property
    def max_exp(self) -> int:
        """Highest stored t-exponent (``min_exp - 1`` when nothing is stored)."""
        return self._min + len(self._coeffs) - 1

    def is_zero(self) -> bool:
        """True when every known coefficient vanishes."""
        return not self._coeffs

    def _prec(self) -> float | int:
        return _INF if self._order is None else self._order

    def _val(self) -> float | int:
        if self._coeffs or self._order is not None:
            return self._min
        return _INF

    def coefficient(self, e: int) -> Fraction:
        if self._order is not None and e > self._order:
            raise InsufficientOrder(f"beyond guaranteed order: t^{e} > t^{self._order}")
        i = e - self._min
        if 0 <= i < len(self._coeffs):
            return Fraction(self._coeffs[i])
        return Fraction(0)

    def items(self) -> Iterator[tuple[int, Coeff]]:
        """Nonzero ``(t_exponent, coefficient)`` pairs in ascending order."""
        for i, c in enumerate(self._coeffs):
            if c:
                yield self._min + i, c

    def __iter__(self):
        raise TypeError("Series is not iterable; use .items()")

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other) -> Series:
        if not isinstance(other, Series):
            other = Series.monomial(0, other)
        return add(self, other)

    __radd__ = __add__

    def __neg__(self) -> Series:
        return Series._raw(self._min, [-c for c in self._coeffs], self._order)

    def __sub__(self, other) -> Series:
        if not isinstance(other, Series):
            other = Series.monomial(0, other)
        return add(self, -other)

    def __rsub__(self, other) -> Series:
        return (-self) + other

    def __mul__(self, other) -> Series:
        if isinstance(other, Series):
            return mul(self, other)
        c = _coerce(other)
        if c == 0:
            return Series.zero()
        return Series._raw(self._min, [_norm(c * x) for x in self._coeffs], self._order)

    __rmul__ = __mul__

    def shift(self, k: int) -> Series:
        """Multiply by ``t^k``."""
        if not self._coeffs and self._order is None:
            return self
        order = None if self._order is None else self._order + k
        return Series._raw(self._min + k, list(self._coeffs), order)

    def truncate(self, order: int) -> Series:
        """Forget everything above t-exponent ``order``."""
        order = int(order)
        if self._order is not None and self._order <= order:
            return self
        return Series._raw(self._min, list(self._coeffs), order)

    def invert(self, order: int | None = None) -> Series:
        return invert(self, order)

    def substitute_q_inverse(self) -> Series:
        return substitute_q_inverse(self)

    def value_at_one(self) -> Fraction:
        """Sum of coefficients (the value at q = 1) of a Laurent polynomial."""
        if not self.exact:
            raise SeriesError("evaluation at q = 1 requires a Laurent polynomial")
        return Fraction(sum(self._coeffs))

    # -- comparison / display ---------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, Series):
            return NotImplemented
        return (self._min, self._coeffs, self._order) == (other._min, other._coeffs, other._order)

    def __hash__(self) -> int:
        return hash((self._min, self._coeffs, self._order))

    def __repr__(self) -> str:
        return f"Series({render(self)!r})"

    def __str__(self) -> str:
        return render(self)

    def render(self, units: str = "t") -> str:
        return render(self, units)


# --------------------------------------------------------------------------
# ring operations


def add(a: Series, b: Series) -> Series:
    """Coefficientwise sum; the order is the smaller of the two."""
    order = min(a._prec(), b._prec())
    order = None if math.isinf(order) else int(order)
    if not a._coeffs:
        return b if order == b._order else b.truncate(order)  # type: ignore[arg-type]
    if not b._coeffs:
        return a if order == a._order else a.truncate(order)  # type: ignore[arg-type]
    lo = min(a._min, b._min)
    hi = max(a.max_exp, b.max_exp)
    if order is not None:
        hi = min(hi, order)
    if hi < lo:
        return Series.zero(order)
    out: list[Coeff] = [0] * (hi - lo + 1)
    for s in (a, b):
        off = s._min - lo
        for i, c in enumerate(s._coeffs[: max(0, hi - s._min + 1)]):
            out[off + i] += c
    return Series._raw(lo, [_norm(c) for c in out], order)


def mul(a: Series, b: Series) -> Series:
    """Cauchy product.

    The guaranteed order is ``min(a.order + val(b), b.order + val(a))``; the
    result is exact only when both factors are.
    """
    va, vb = a._val(), b._val()
    if math.isinf(va) or math.isinf(vb):
        return Series.zero()
    order = min(a._prec() + vb, b._prec() + va)
    if math.isinf(order):
        return Series._raw(a._min + b._min, _convolve(list(a._coeffs), list(b._coeffs)), None)
    order = int(order)
    lo = a._min + b._min
    if order < lo or not a._coeffs or not b._coeffs:
        return Series.zero(order)
    xa = list(a._coeffs[: order - lo + 1])
    xb = list(b._coeffs[: order - lo + 1])
    return Series._raw(lo, _convolve(xa, xb)[: order - lo + 1], order)


def invert(a: Series, order: int | None = None) -> Series:
    """Multiplicative inverse.

    For a truncated input the result has order ``a.order - 2 * a.min_exp``
    (lowered to ``order`` if that is smaller).  An exact input that is a
    single monomial inverts exactly; any other exact input needs ``order``,
    the t-exponent the caller wants the inverse to be correct up to.
    """
    if not a._coeffs:
        raise SeriesError("division by zero series")
    m = a._min
    lead = a._coeffs[0]
    if a.exact:
        if len(a._coeffs) == 1:
            return Series._raw(-m, [_norm(Fraction(1) / lead)], None)
        if order is None:
            raise SeriesError("order required to invert a non-monomial Laurent polynomial")
        target = int(order)
    else:
        target = a._order - 2 * m  # type: ignore[operator]
        if order is not None:
            target = min(target, int(order))
    size = target + m + 1
    if size <= 0:
        return Series.zero(target)
    u = list(a._coeffs[:size])
    u += [0] * (size - len(u))
    b: list[Coeff] = [_norm(Fraction(1) / lead)]
    have = 1
    while have < size:
        # Newton step b <- b * (2 - u * b), doubling the correct prefix
        have = min(2 * have, size)
        r = _convolve(u[:have], b)[:have]
        r = [-c for c in r]
        r[0] += 2
        b = _convolve(b, r)[:have]
    return Series._raw(-m, b, target)


def substitute_q_inverse(a: Series) -> Series:
    """Replace q by 1/q, i.e. every t-exponent ``e`` by ``-e``."""
    if not a.exact:
        raise SeriesError("substitution requires a Laurent polynomial")
    if not a._coeffs:
        return a
    return Series._raw(-a.max_exp, list(reversed(a._coeffs)), None)


def coefficient(a: Series, e: int) -> Fraction:
    return a.coefficient(e)


def sum_series(items: Iterable[Series], order: int | None = None) -> Series:
    """Sum of many series, optionally starting from ``O(t^(order+1))``."""
    total = Series.zero(order)
    for s in items:
        total = add(total, s)
    return total


@dataclass(frozen=True)
class Comparison:
    """Result of :func:`equal_to_order`; truthy iff the windows agree."""

    equal: bool
    exp_t: int | None = None
    lhs: Fraction | None = None
    rhs: Fraction | None = None

    def __bool__(self) -> bool:
        return self.equal


def equal_to_order(a: Series, b: Series, n: int) -> Comparison:
    """Compare all coefficients at t-exponents ``<= n``.

    Raises :class:`InsufficientOrder` when either side is not guaranteed up
    to ``n`` -- a short window is never reported as agreement.
    """
    if min(a._prec(), b._prec()) < n:
        raise InsufficientOrder(
            f"insufficient order: need t^{n}, have t^{a.order} and t^{b.order}"
        )
    lo = min(a._min if a._coeffs else n + 1, b._min if b._coeffs else n + 1)
    for e in range(lo, n + 1):
        x, y = a.coefficient(e), b.coefficient(e)
        if x != y:
            return Comparison(False, e, x, y)
    return Comparison(True)


# --------------------------------------------------------------------------
# rendering


def _monomial(e: int, units: str) -> str:
    if units == "t":
        if e == 0:
            return ""
        if e == 1:
            return "t"
        return f"t^{e}" if e > 0 else f"t^({e})"
    if units != "q":
        raise ValueError(f"unknown units {units!r}")
    if e % 2:
        return f"q^({e}/2)"
    k = e // 2
    if k == 0:
        return ""
    if k == 1:
        return "q"
    return f"q^{k}" if k > 0 else f"q^({k})"


def render(s: Series, units: str = "t") -> str:
    """Text form: ascending exponents, ``p/q`` coefficients, ``O(...)`` tail.

    >>> render(Series([1, 0, 1, 0, 1]), "q")
    '1 + q + q^2'
    """
    parts: list[str] = []
    for e, c in s.items():
        mono = _monomial(e, units)
        mag = abs(c)
        if not mono:
            body = str(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{mag}*{mono}"
        if not parts:
            parts.append(("-" if c < 0 else "") + body)
        else:
            parts.append((" - " if c < 0 else " + ") + body)
    if s.order is not None:
        tail = f"O({_monomial(s.order + 1, units) or '1'})"
        parts.append(tail if not parts else " + " + tail)
    return "".join(parts) if parts else "0"
