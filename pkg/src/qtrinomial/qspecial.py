"""q-Pochhammer symbols and q-trinomial coefficients.

All exponents are in t-units (``t = q^(1/2)``), so ``(q)_n`` has argument
``MonomialArg(+1, 2)`` and ``(-q^(-1))_L`` has ``MonomialArg(-1, -2)``.

Three routes to the trinomial coefficients live here:

* :func:`trinomial_eq1` -- the j-sum of q-multinomials,
  ``sum_j q^(j(j+B)) (q)_L / ((q)_j (q)_(j+A) (q)_(L-2j-A))``;
* :func:`t_n` -- ``T_n(L, A) = q^((L(L-n) - A(A-n))/2) * [L; A-n; 1/q]_A``;
* :func:`q_n` -- the s-sum for ``Q_n = T_n / (q)_L``,
  ``sum_{s = L+A mod 2} q^(s(s-n)/2) / ((q)_((L-A-s)/2) (q)_((L+A-s)/2) (q)_s)``.

Negative Pochhammer indices follow ``1/(q)_m = 0`` for ``m < 0``: such terms
are skipped.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from functools import lru_cache

from .series import Series, SeriesError, invert, mul, sum_series


@dataclass(frozen=True)
class MonomialArg:
    """Pochhammer argument ``sign * t^k``."""

    sign: int
    k: int

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")


Q = MonomialArg(1, 2)


def _check_n(n: int) -> None:
    if n not in (0, 1):
        raise ValueError(f"n must be 0 or 1, got {n!r}")


class _PrefixProducts:
    """Prefix products ``prod_{i<m} (1 - sign t^(k+2i))``, optionally truncated.

    Lists only grow; concurrent extenders compute identical values, so the
    lock just keeps appends ordered.
    """

    def __init__(self):
        self._lock = threading.Lock()
        self._tables: dict[tuple[MonomialArg, int | None], list[Series]] = {}

    def get(self, arg: MonomialArg, count: int, order: int | None) -> Series:
        key = (arg, order)
        with self._lock:
            table = self._tables.setdefault(key, [Series.one()])
            while len(table) <= count:
                i = len(table) - 1
                e = arg.k + 2 * i
                prev = table[-1]
                if order is not None and e > order and arg.k >= 0 and prev.min_exp >= 0:
                    # factor is 1 on the window; no later factor can matter either
                    table.append(prev.truncate(order))
                    continue
                factor = Series.from_terms([(0, 1), (e, -arg.sign)])
                table.append(mul(prev, factor) if order is None else mul(prev, factor).truncate(order))
            return table[count]


_prefix = _PrefixProducts()


def poch_finite(arg: MonomialArg, count: int) -> Series:
    """``(a)_count`` for ``a = sign * t^k`` as an exact Laurent polynomial."""
    if count < 0:
        raise ValueError("negative Pochhammer count; use the vanishing convention")
    return _prefix.get(arg, count, None)


def poch_truncated(arg: MonomialArg, count: int, order: int) -> Series:
    """``(a)_count`` known up to t-exponent ``order`` (cheap for large counts)."""
    if count < 0:
        raise ValueError("negative Pochhammer count; use the vanishing convention")
    if arg.k < 0 and count > 0:
        # exact head of factors with negative exponents, truncated tail after it
        m = min(count, (1 - arg.k) // 2)
        head = poch_finite(arg, m)
        tail = poch_truncated(MonomialArg(arg.sign, arg.k + 2 * m), count - m, order - head.min_exp)
        return mul(head, tail).truncate(order)
    return _prefix.get(arg, count, order).truncate(order)


@lru_cache(maxsize=None)
def poch_infinite(arg: MonomialArg, order: int) -> Series:
    """``(a)_inf`` truncated at t-exponent ``order``; needs ``k >= 1``."""
    if arg.k <= 0:
        raise SeriesError("divergent formal product")
    count = max(0, (order - arg.k) // 2 + 1)
    return poch_truncated(arg, count, order).truncate(order)


_inverse_lock = threading.Lock()
_inverses: dict[tuple[MonomialArg, int], Series] = {}


def inv_poch(arg: MonomialArg, count: int, order: int) -> Series:
    """``1 / (a)_count`` up to t-exponent ``order``.

    The highest-order inverse computed so far is kept per ``(arg, count)``;
    lower orders are served by truncating it.
    """
    if order < 0 and arg.k >= 0:
        # the inverse starts at t^0, so nothing is visible on the window
        return Series.zero(order)
    key = (arg, count)
    best = _inverses.get(key)
    if best is not None and (best.exact or best.order >= order):
        return best.truncate(order) if not best.exact else best
    inv = invert(poch_truncated(arg, count, order), order)
    with _inverse_lock:
        best = _inverses.get(key)
        if best is None or (not best.exact and best.order < order):
            _inverses[key] = inv
    return inv


# --------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _multinomial(parts: tuple[int, int, int]) -> Series:
    """``(q)_L / ((q)_a (q)_b (q)_c)`` with ``L = a + b + c``, as a polynomial."""
    total = sum(parts)
    num = poch_finite(Q, total)
    # degree bound in t-units: L^2 - a^2 - b^2 - c^2
    bound = total * total - sum(p * p for p in parts)
    quot = num
    for p in parts:
        quot = mul(quot, inv_poch(Q, p, bound))
    poly = Series(quot.coeffs, quot.min_exp)
    den = Series.one()
    for p in parts:
        den = mul(den, poch_finite(Q, p))
    if mul(poly, den) != num:
        raise ArithmeticError(f"q-multinomial division left a remainder for {parts}")
    return poly


@lru_cache(maxsize=None)
def trinomial_eq1(L: int, B: int, A: int) -> Series:
    """The q-trinomial coefficient ``[L; B; q]_A`` from its j-sum."""
    if L < 0:
        raise ValueError("L must be nonnegative")
    terms = []
    for j in range(max(0, -A), (L - A) // 2 + 1):
        parts = tuple(sorted((j, j + A, L - 2 * j - A)))
        terms.append(_multinomial(parts).shift(2 * j * (j + B)))
    return sum_series(terms)


def classical_trinomial(L: int, A: int) -> int:
    """Coefficient of ``x^(L+A)`` in ``(1 + x + x^2)^L`` by plain expansion."""
    if L < 0:
        raise ValueError("L must be nonnegative")
    poly = [1]
    for _ in range(L):
        nxt = [0] * (len(poly) + 2)
        for i, c in enumerate(poly):
            nxt[i] += c
            nxt[i + 1] += c
            nxt[i + 2] += c
        poly = nxt
    i = L + A
    return poly[i] if 0 <= i < len(poly) else 0


@lru_cache(maxsize=None)
def t_n(n: int, L: int, A: int) -> Series:
    """``T_n(L, A, q)``: q -> 1/q applied to ``[L; A-n; q]_A``, times the monomial prefactor."""
    _check_n(n)
    base = trinomial_eq1(L, A - n, A).substitute_q_inverse()
    return base.shift(L * (L - n) - A * (A - n))


@lru_cache(maxsize=None)
def q_n(n: int, L: int, A: int, order: int) -> Series:
    """``Q_n(L, A, q)`` up to t-exponent ``order`` via the s-sum.

    Vanishes identically for ``|A| > L`` (which includes every ``L < 0``);
    negative ``A`` is allowed.
    """
    _check_n(n)
    if abs(A) > L:
        return Series.zero()
    terms = []
    for s in range((L + A) % 2, L - abs(A) + 1, 2):
        shift = s * (s - n)
        sub = order - shift
        if sub < 0:
            # every factor starts at t^0, so the term lies beyond the window
            continue
        a, b = (L - A - s) // 2, (L + A - s) // 2
        term = mul(mul(inv_poch(Q, a, sub), inv_poch(Q, b, sub)), inv_poch(Q, s, sub))
        terms.append(term.shift(shift))
    return sum_series(terms, order)
