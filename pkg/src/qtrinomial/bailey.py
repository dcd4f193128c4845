"""Bailey pairs, trinomial Bailey pairs and truncated-series verification.

A binomial pair relative to ``a = q^ell`` satisfies

    beta_L = sum_{r<=L} alpha_r / ((q)_(L-r) (a q)_(L+r)),

a trinomial pair relative to ``n`` satisfies

    tbeta_L = sum_{r<=L} Q_n(L, r) talpha_r.

:func:`to_trinomial` turns the former into the latter.  Every ``check_*`` /
``verify_*`` function compares two truncated series coefficient by
coefficient and returns a :class:`VerificationReport`; a window that is too
short is reported as ``insufficient-order``, never as pass or fail.

Sequence values are exact (``alpha``) or computed lazily at the order a
caller asks for (``beta(L, order)``), and memoized per ``(index, order)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable

from .qspecial import MonomialArg, Q, inv_poch, poch_finite, poch_infinite, q_n, poch_truncated
from .series import InsufficientOrder, Series, equal_to_order, invert, mul, sum_series

PASS = "pass"
FAIL = "fail"
INSUFFICIENT = "insufficient-order"

LHS_M_CUTOFF = "M"
LHS_ORDER_BOUNDED = "order-bounded"

AlphaFn = Callable[[int], Series]
BetaFn = Callable[[int, int], Series]


class ConvergenceError(ArithmeticError):
    """An infinite sum could not be shown to be complete on the window."""


def _check_n(n: int) -> None:
    if n not in (0, 1):
        raise ValueError(f"n must be 0 or 1, got {n!r}")


# --------------------------------------------------------------------------
# pairs


class BinomialPair:
    """``(alpha, beta)`` relative to ``a = q^ell``.

    ``alpha(r)`` returns an exact series; ``beta(L, order)`` a series that is
    correct up to t-exponent ``order``.  When ``beta`` is omitted it is
    derived from ``alpha`` by the defining sum.
    """

    def __init__(self, alpha: AlphaFn, beta: BetaFn | None = None, ell: int = 0, label: str = ""):
        if ell < 0:
            raise ValueError("ell must be nonnegative")
        self.ell = ell
        self.label = label
        self.derived = beta is None
        self._alpha = lru_cache(maxsize=None)(alpha)
        if beta is None:
            def beta(L, order, _alpha=self._alpha, _ell=ell):
                return beta_from_alpha(_alpha, _ell, L, order)
        self._beta = lru_cache(maxsize=None)(beta)

    def alpha(self, r: int) -> Series:
        return self._alpha(r)

    def beta(self, L: int, order: int) -> Series:
        return self._beta(L, order)

    def __repr__(self) -> str:
        return f"BinomialPair({self.label!r}, ell={self.ell})"


class TrinomialPair:
    """``(talpha, tbeta)`` relative to ``n`` in {0, 1}."""

    def __init__(self, talpha: AlphaFn, tbeta: BetaFn, n: int, label: str = ""):
        _check_n(n)
        self.n = n
        self.label = label
        self._talpha = lru_cache(maxsize=None)(talpha)
        self._tbeta = lru_cache(maxsize=None)(tbeta)

    def talpha(self, r: int) -> Series:
        return self._talpha(r)

    def tbeta(self, L: int, order: int) -> Series:
        return self._tbeta(L, order)

    def __repr__(self) -> str:
        return f"TrinomialPair({self.label!r}, n={self.n})"


def delta_alpha(r: int) -> Series:
    """``alpha_r = 1`` if ``r == 0`` else ``0``."""
    return Series.one() if r == 0 else Series.zero()


# --------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class Check:
    """One compared instance: an index and its outcome.

    On failure ``exp_t`` is the smallest differing t-exponent and
    ``lhs``/``rhs`` are the two coefficients there.
    """

    index: int
    status: str
    exp_t: int | None = None
    lhs: Fraction | None = None
    rhs: Fraction | None = None
    detail: str = ""

    def as_dict(self) -> dict:
        out: dict = {"index": self.index, "status": self.status}
        if self.status == FAIL:
            out["mismatch"] = {"exp_t": self.exp_t, "lhs": str(self.lhs), "rhs": str(self.rhs)}
        if self.detail:
            out["detail"] = self.detail
        return out


@dataclass
class VerificationReport:
    identity: str
    params: dict
    checks: list[Check] = field(default_factory=list)

    @property
    def outcome(self) -> str:
        statuses = {c.status for c in self.checks}
        if FAIL in statuses:
            return FAIL
        if INSUFFICIENT in statuses:
            return INSUFFICIENT
        return PASS

    @property
    def passed(self) -> bool:
        return self.outcome == PASS

    @property
    def failure(self) -> Check | None:
        """First failing check in index order, if any."""
        return next((c for c in self.checks if c.status == FAIL), None)

    def as_dict(self) -> dict:
        return {
            "identity": self.identity,
            "params": self.params,
            "outcome": self.outcome,
            "checks": [c.as_dict() for c in self.checks],
        }

    def summary(self) -> str:
        head = f"{self.identity} {self.params}: {self.outcome}"
        bad = self.failure
        if bad is not None:
            head += f" (index {bad.index}: t^{bad.exp_t} lhs={bad.lhs} rhs={bad.rhs})"
        return head


def compare(index: int, lhs: Series, rhs: Series, order: int) -> Check:
    """Compare two sides up to ``order`` and package the verdict."""
    try:
        cmp = equal_to_order(lhs, rhs, order)
    except InsufficientOrder as exc:
        return Check(index, INSUFFICIENT, detail=str(exc))
    if cmp:
        return Check(index, PASS)
    return Check(index, FAIL, cmp.exp_t, cmp.lhs, cmp.rhs)


# --------------------------------------------------------------------------
# helpers


def _scaled(factor: Series, compute: Callable[[int], Series], order: int) -> Series:
    """``factor * compute(o)`` with ``o`` chosen so the product reaches ``order``.

    ``factor`` is exact and ``compute(o)`` must be correct up to t^o.  The
    sub-order is clamped at 0: a product of windows that are empty only
    because they end below t^0 would otherwise lose order in the bookkeeping.
    """
    if factor.is_zero():
        return Series.zero()
    return mul(factor, compute(max(0, order - factor.min_exp))).truncate(order)


def _over(compute: Callable[[int], Series], den: Series, order: int) -> Series:
    """``compute / den`` for an exact Laurent polynomial ``den``."""
    inv = invert(den, order)
    return mul(inv, compute(max(0, order - inv.min_exp))).truncate(order)


def _nonnegative(s: Series, what: str) -> Series:
    if s.coeffs and s.min_exp < 0:
        raise ConvergenceError(f"{what} starts at t^{s.min_exp}; minimum exponent does not grow")
    return s


def _aq(ell: int) -> MonomialArg:
    return MonomialArg(1, 2 * ell + 2)


# --------------------------------------------------------------------------
# binomial pairs


def beta_from_alpha(alpha: AlphaFn, ell: int, L: int, order: int) -> Series:
    """``sum_{r<=L} alpha_r / ((q)_(L-r) (q^(ell+1))_(L+r))`` up to t^order."""
    if ell < 0:
        raise ValueError("ell must be nonnegative")
    terms = []
    for r in range(L + 1):
        a = alpha(r)

        def rest(o, r=r):
            return mul(inv_poch(Q, L - r, o), inv_poch(_aq(ell), L + r, o))

        terms.append(_scaled(a, rest, order))
    return sum_series(terms, order)


def verify_binomial_pair(pair: BinomialPair, L_max: int, order: int) -> VerificationReport:
    """Check ``pair.beta(L)`` against the defining sum for ``L <= L_max``."""
    report = VerificationReport("binomial-pair", {"pair": pair.label, "ell": pair.ell,
                                                   "L_max": L_max, "order": order})
    for L in range(L_max + 1):
        lhs = pair.beta(L, order)
        rhs = beta_from_alpha(pair.alpha, pair.ell, L, order)
        report.checks.append(compare(L, lhs, rhs, order))
    return report


# --------------------------------------------------------------------------
# binomial -> trinomial


def _s_sum_term(n: int, s: int, ell: int, beta_value: Callable[[int], Series], order: int) -> Series:
    """``q^(s(s-n)/2) / ((q)_ell (q)_s) * beta`` up to t^order."""
    shift = s * (s - n)

    def rest(o):
        return mul(mul(inv_poch(Q, ell, o), inv_poch(Q, s, o)), beta_value(o))

    return _scaled(Series.monomial(shift), rest, order)


def lemma2_lhs(pair: BinomialPair, n: int, L: int, order: int) -> Series:
    """``sum_{s = L+ell mod 2, s <= L-ell} q^(s(s-n)/2) beta_((L-s-ell)/2) / ((q)_ell (q)_s)``."""
    _check_n(n)
    ell = pair.ell
    terms = [
        _s_sum_term(n, s, ell, lambda o, s=s: pair.beta((L - s - ell) // 2, o), order)
        for s in range((L + ell) % 2, L - ell + 1, 2)
    ]
    return sum_series(terms, order) if terms else Series.zero()


def lemma2_rhs(pair: BinomialPair, n: int, L: int, order: int) -> Series:
    """``sum_r Q_n(L, 2r+ell) alpha_r``, truncated where ``Q_n`` vanishes."""
    _check_n(n)
    ell = pair.ell
    terms = [
        _scaled(pair.alpha(r), lambda o, r=r: q_n(n, L, 2 * r + ell, o), order)
        for r in range(max(0, (L - ell) // 2 + 1))
    ]
    return sum_series(terms, order) if terms else Series.zero()


def verify_lemma2(pair: BinomialPair, n: int, L: int, order: int,
                  term_level: bool = False) -> VerificationReport:
    """Check the s-sum of ``beta`` against ``sum_r Q_n(L, 2r+ell) alpha_r`` at one ``L``.

    With ``term_level`` each s-term is instead compared with its expansion
    through the Bailey relation,
    ``(q)_ell sum_r alpha_r q^(s(s-n)/2) / ((q)_(K-r) (q)_(K+ell+r) (q)_s)``
    where ``K = (L-s-ell)/2``; the checks are then indexed by ``s``.
    """
    _check_n(n)
    ell = pair.ell
    report = VerificationReport("lemma2", {"pair": pair.label, "ell": ell, "n": n,
                                           "L": L, "order": order, "term_level": term_level})
    if not term_level:
        report.checks.append(compare(L, lemma2_lhs(pair, n, L, order),
                                     lemma2_rhs(pair, n, L, order), order))
        return report
    for s in range((L + ell) % 2, L - ell + 1, 2):
        K = (L - s - ell) // 2
        lhs = _s_sum_term(n, s, 0, lambda o: pair.beta(K, o), order)
        pieces = []
        for r in range(K + 1):
            def rest(o, r=r):
                return mul(mul(poch_truncated(Q, ell, o), inv_poch(Q, K - r, o)),
                           mul(inv_poch(Q, K + ell + r, o), inv_poch(Q, s, o)))
            pieces.append(_scaled(mul(pair.alpha(r), Series.monomial(s * (s - n))), rest, order))
        report.checks.append(compare(s, lhs, sum_series(pieces, order), order))
    return report


def to_trinomial(pair: BinomialPair, n: int) -> TrinomialPair:
    """The trinomial pair relative to ``n`` built from a binomial pair.

    ``talpha_(2L+ell) = alpha_L``, odd offsets and indices below ``ell`` are
    zero; ``tbeta_(L+ell)`` is the s-sum of :func:`lemma2_lhs`.
    """
    _check_n(n)
    ell = pair.ell

    def talpha(i: int) -> Series:
        if i < ell or (i - ell) % 2:
            return Series.zero()
        return pair.alpha((i - ell) // 2)

    def tbeta(i: int, order: int) -> Series:
        if i < ell:
            return Series.zero()
        return lemma2_lhs(pair, n, i, order)

    return TrinomialPair(talpha, tbeta, n, f"{pair.label}->trinomial:{n}")


def trinomial_rhs(tpair: TrinomialPair, L: int, order: int) -> Series:
    """``sum_{r<=L} Q_n(L, r) talpha_r``."""
    terms = [_scaled(tpair.talpha(r), lambda o, r=r: q_n(tpair.n, L, r, o), order)
             for r in range(L + 1)]
    return sum_series(terms, order)


def verify_trinomial_pair(tpair: TrinomialPair, L_max: int, order: int) -> VerificationReport:
    report = VerificationReport("trinomial-pair", {"pair": tpair.label, "n": tpair.n,
                                                    "L_max": L_max, "order": order})
    for L in range(L_max + 1):
        report.checks.append(compare(L, tpair.tbeta(L, order), trinomial_rhs(tpair, L, order), order))
    return report


def sum_pairs(a: TrinomialPair, b: TrinomialPair) -> TrinomialPair:
    """Indexwise sum of two trinomial pairs with the same ``n``."""
    if a.n != b.n:
        raise ValueError(f"cannot add pairs relative to n={a.n} and n={b.n}")
    return TrinomialPair(lambda r: a.talpha(r) + b.talpha(r),
                         lambda L, o: a.tbeta(L, o) + b.tbeta(L, o),
                         a.n, f"{a.label}+{b.label}")


def negate_pair(a: TrinomialPair) -> TrinomialPair:
    return TrinomialPair(lambda r: -a.talpha(r), lambda L, o: -a.tbeta(L, o), a.n, f"-{a.label}")


# --------------------------------------------------------------------------
# the trinomial Bailey lemma and its corollaries


_NEG_ONE = MonomialArg(-1, 0)       # (-1)_L
_NEG_Q_INV = MonomialArg(-1, -2)    # (-q^(-1))_L
_NEG_Q = MonomialArg(-1, 2)         # (-q)_inf


def _lemma_lhs_term(tpair: TrinomialPair, L: int, order: int) -> Series:
    """``(-1)_L q^(L/2) tbeta_L`` (n=0) or ``(-q^(-1))_L q^L tbeta_L`` (n=1)."""
    arg, shift = (_NEG_ONE, L) if tpair.n == 0 else (_NEG_Q_INV, 2 * L)
    weight = poch_truncated(arg, L, order - shift).shift(shift)
    tb = _nonnegative(tpair.tbeta(L, max(0, order - weight.min_exp)), f"tbeta_{L}")
    return mul(weight, tb).truncate(order)


def _lemma_lhs_growth(n: int, L: int) -> int:
    # smallest t-exponent the L-th left-hand term can have when tbeta_L starts at t^0
    return L if n == 0 else max(0, 2 * L - 2)


def _scan(term: Callable[[int], Series], growth: Callable[[int], int], order: int,
          L_cap: int) -> Series:
    """Sum ``term(L)`` for ``L = 0, 1, ...`` until ``growth(L)`` passes ``order``.

    ``growth`` must be nondecreasing.  Stopping at ``L_cap`` early is not an
    error: the partial sum is returned with the order it actually covers, so
    the comparison downstream reports insufficient order.  A summand that
    fails to grow at all is rejected by ``_nonnegative`` before it gets here.
    """
    total = Series.zero(order)
    L = 0
    while growth(L) <= order:
        if L > L_cap:
            return total.truncate(growth(L) - 1)
        total = total + term(L)
        L += 1
    return total


def lemma_lhs(tpair: TrinomialPair, M: int, order: int, lhs_limit: str = LHS_M_CUTOFF,
              L_cap: int = 10_000) -> Series:
    if lhs_limit in (LHS_M_CUTOFF, "M-cutoff"):
        return sum_series((_lemma_lhs_term(tpair, L, order) for L in range(M + 1)), order)
    if lhs_limit != LHS_ORDER_BOUNDED:
        raise ValueError(f"unknown lhs_limit {lhs_limit!r}")
    return _scan(lambda L: _lemma_lhs_term(tpair, L, order),
                 lambda L: _lemma_lhs_growth(tpair.n, L), order, L_cap)


def lemma_rhs(tpair: TrinomialPair, M: int, order: int) -> Series:
    n = tpair.n
    terms = []
    if n == 0:
        for L in range(M + 1):
            den = Series.from_terms([(-L, 1), (L, 1)])

            def inner(o, L=L, den=den):
                return _over(lambda p: q_n(1, M, L, p), den, o)

            terms.append(_scaled(tpair.talpha(L), inner, order))
        prefactor = poch_finite(_NEG_ONE, M + 1)
    else:
        for L in range(M + 1):
            def inner(o, L=L):
                head = q_n(1, M, L, o)
                up = _over(lambda p: q_n(1, M - 1, L + 1, p), Series.from_terms([(0, 1), (-2 * L - 2, 1)]), o)
                down = _over(lambda p: q_n(1, M - 1, L - 1, p), Series.from_terms([(0, 1), (2 * L - 2, 1)]), o)
                return head - up - down

            terms.append(_scaled(tpair.talpha(L), inner, order))
        prefactor = poch_finite(_NEG_ONE, M)
    return mul(prefactor, sum_series(terms, order)).truncate(order)


def check_ab_lemma(tpair: TrinomialPair, M: int, order: int, lhs_limit: str = LHS_M_CUTOFF,
                   L_cap: int = 10_000) -> VerificationReport:
    """Check the trinomial Bailey lemma at one ``M``.

    ``lhs_limit="M"`` sums the left side over ``L <= M``; ``"order-bounded"``
    sums until every further term lies beyond the window.
    """
    if M < 0:
        raise ValueError("M must be nonnegative")
    report = VerificationReport("ab-lemma", {"pair": tpair.label, "n": tpair.n, "M": M,
                                             "order": order, "lhs_limit": lhs_limit})
    lhs = lemma_lhs(tpair, M, order, lhs_limit, L_cap)
    rhs = lemma_rhs(tpair, M, order)
    report.checks.append(compare(M, lhs, rhs, order))
    return report


@lru_cache(maxsize=None)
def infinite_prefactor(order: int) -> Series:
    """``(-q)_inf^2 / (q)_inf^2`` up to t^order."""
    num = poch_infinite(_NEG_Q, order)
    den = poch_infinite(Q, order)
    return mul(mul(num, num), invert(mul(den, den))).truncate(order)


def corollary_lhs(tpair: TrinomialPair, order: int, L_cap: int = 10_000) -> Series:
    total = _scan(lambda L: _lemma_lhs_term(tpair, L, order),
                  lambda L: _lemma_lhs_growth(tpair.n, L), order, L_cap)
    return total * Fraction(1, 2)


def corollary_rhs(tpair: TrinomialPair, order: int, L_cap: int = 10_000) -> Series:
    n = tpair.n

    def alpha(L: int) -> Series:
        return _nonnegative(tpair.talpha(L), f"talpha_{L}")

    if n == 0:
        def term(L):
            den = Series.from_terms([(-L, 1), (L, 1)])
            return _scaled(alpha(L), lambda o: invert(den, o), order)

        growth = lambda L: L  # noqa: E731
    else:
        def term(L):
            def bracket(o):
                up = invert(Series.from_terms([(0, 1), (2 * L + 2, 1)]), o)
                down = invert(Series.from_terms([(0, 1), (2 * L - 2, 1)]), o)
                return (up - down).truncate(o)
            return _scaled(alpha(L), bracket, order)

        growth = lambda L: max(0, 2 * L - 2)  # noqa: E731
    total = _scan(term, growth, order, L_cap)
    return mul(infinite_prefactor(order), total).truncate(order)


def _check_corollary(name: str, required_n: int, tpair: TrinomialPair, order: int,
                     L_cap: int) -> VerificationReport:
    if tpair.n != required_n:
        raise ValueError(f"{name} needs a trinomial pair relative to {required_n}, got n={tpair.n}")
    report = VerificationReport(name, {"pair": tpair.label, "n": tpair.n, "order": order})
    lhs = corollary_lhs(tpair, order, L_cap)
    rhs = corollary_rhs(tpair, order, L_cap)
    report.checks.append(compare(0, lhs, rhs, order))
    return report


def check_cor1(tpair: TrinomialPair, order: int, L_cap: int = 10_000) -> VerificationReport:
    """``1/2 sum (-1)_L q^(L/2) tbeta_L = (-q)^2/(q)^2 sum talpha_L / (q^(L/2) + q^(-L/2))``."""
    return _check_corollary("cor1", 0, tpair, order, L_cap)


def check_cor2(tpair: TrinomialPair, order: int, L_cap: int = 10_000) -> VerificationReport:
    """``1/2 sum (-1/q)_L q^L tbeta_L = (-q)^2/(q)^2 sum talpha_L {1/(1+q^(L+1)) - 1/(1+q^(L-1))}``."""
    return _check_corollary("cor2", 1, tpair, order, L_cap)
