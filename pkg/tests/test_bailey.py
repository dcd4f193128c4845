import random
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

import pytest

from qtrinomial import bailey
from qtrinomial.bailey import (
    BinomialPair,
    ConvergenceError,
    TrinomialPair,
    beta_from_alpha,
    check_ab_lemma,
    check_cor1,
    check_cor2,
    corollary_rhs,
    delta_alpha,
    infinite_prefactor,
    lemma2_lhs,
    lemma2_rhs,
    lemma_lhs,
    lemma_rhs,
    negate_pair,
    sum_pairs,
    to_trinomial,
    trinomial_rhs,
    verify_binomial_pair,
    verify_lemma2,
    verify_trinomial_pair,
)
from qtrinomial.catalog import builtin
from qtrinomial.qspecial import MonomialArg, Q, inv_poch, poch_finite, q_n
from qtrinomial.series import Series, equal_to_order, invert, mul

N = 60


def geo(order=N):
    """1/(1-q)."""
    return invert(poch_finite(Q, 1), order)


def random_alpha(seed):
    """alpha_r = +-t^(e_r) with e_r >= 2r, drawn once per r."""
    rng = random.Random(seed)
    exps, signs = [], []
    e = 0
    for _ in range(40):
        exps.append(e)
        signs.append(rng.choice((1, -1)))
        e += rng.randint(2, 5)
    return lambda r: Series.monomial(exps[r], signs[r])


def same(a, b, order=N):
    return bool(equal_to_order(a, b, order))


# --- binomial pairs ------------------------------------------------------------


def test_beta_from_delta():
    assert same(beta_from_alpha(delta_alpha, 0, 1, N), mul(geo(), geo()))
    for L in range(4):
        want = mul(inv_poch(Q, L, N), inv_poch(MonomialArg(1, 6), L, N))
        assert same(beta_from_alpha(delta_alpha, 2, L, N), want)


def test_a1_beta_one():
    a1 = builtin("A1")
    assert same(beta_from_alpha(a1.alpha, 0, 1, N), inv_poch(Q, 2, N))


def test_a1_is_a_pair_relative_to_one():
    assert verify_binomial_pair(builtin("A1"), 12, 120).passed


def test_a1_with_ell_one_fails_at_one():
    a1 = builtin("A1")
    wrong = BinomialPair(a1.alpha, a1.beta, ell=1, label="A1@ell=1")
    report = verify_binomial_pair(wrong, 5, 100)
    assert report.outcome == bailey.FAIL and report.failure.index == 1


@pytest.mark.parametrize("ell", [0, 1, 3])
def test_delta_pair_is_a_pair(ell):
    assert verify_binomial_pair(BinomialPair(delta_alpha, ell=ell), 8, N).passed


def test_perturbed_beta_fails():
    a1 = builtin("A1")
    bad = BinomialPair(a1.alpha, lambda L, o: a1.beta(L, o) + (Series.monomial(7) if L == 3 else 0))
    failure = verify_binomial_pair(bad, 5, N).failure
    assert (failure.index, failure.exp_t, failure.rhs - failure.lhs) == (3, 7, -1)


# --- Lemma 2 and the transform --------------------------------------------------


def test_lemma2_delta_small_case():
    delta = BinomialPair(delta_alpha)
    want = mul(geo(), geo()) + mul(Series.monomial(4), inv_poch(Q, 2, N))
    assert same(lemma2_lhs(delta, 0, 2, N), want)
    assert same(lemma2_rhs(delta, 0, 2, N), want)


@pytest.mark.parametrize("ell", [1, 2, 4])
def test_lemma2_trivial_when_ell_exceeds_L(ell):
    pair = BinomialPair(random_alpha(ell), ell=ell)
    L = ell - 1
    assert lemma2_lhs(pair, 0, L, N).is_zero() and lemma2_rhs(pair, 1, L, N).is_zero()
    assert verify_lemma2(pair, 0, L, N).passed


@pytest.mark.parametrize("ell", [0, 1, 2])
@pytest.mark.parametrize("n", [0, 1])
def test_lemma2_term_level(ell, n):
    pair = BinomialPair(random_alpha(10 + ell), ell=ell)
    for L in range(0, 9):
        report = verify_lemma2(pair, n, L, N, term_level=True)
        assert report.passed
        assert [c.index for c in report.checks] == list(range((L + ell) % 2, L - ell + 1, 2))


def test_lemma2_term_level_catches_bad_beta():
    a1 = builtin("A1")
    bad = BinomialPair(a1.alpha, lambda L, o: a1.beta(L, o) + (Series.monomial(9) if L == 1 else 0))
    report = verify_lemma2(bad, 0, 4, N, term_level=True)
    # beta_1 enters only the s = 2 term at L = 4
    assert [c.status for c in report.checks] == ["pass", "fail", "pass"]


def test_to_trinomial_delta():
    delta = BinomialPair(delta_alpha)
    assert same(to_trinomial(delta, 0).tbeta(1, N), mul(Series.monomial(1), geo()))
    assert same(to_trinomial(delta, 1).tbeta(1, N), geo())


def test_to_trinomial_alpha_layout():
    pair = BinomialPair(random_alpha(3), ell=2)
    tp = to_trinomial(pair, 0)
    assert tp.talpha(0).is_zero() and tp.talpha(1).is_zero() and tp.talpha(3).is_zero()
    assert tp.talpha(2) == pair.alpha(0) and tp.talpha(6) == pair.alpha(2)


def corollary_tbeta(pair, n, i, order):
    """tbeta_(L+ell) rebuilt from the corollary's own indexing."""
    ell = pair.ell
    if i < ell:
        return Series.zero(order)
    L = i - ell
    total = Series.zero(order)
    for s in range(L % 2, L + 1, 2):
        w = Series.monomial(s * (s - n))
        den = mul(poch_finite(Q, ell), poch_finite(Q, s))
        total = total + mul(mul(w, invert(den, order)), pair.beta((L - s) // 2, order)).truncate(order)
    return total


@pytest.mark.parametrize("ell", [0, 1, 2])
def test_tbeta_matches_corollary_formula(ell):
    pair = BinomialPair(random_alpha(20 + ell), ell=ell)
    for n in (0, 1):
        tp = to_trinomial(pair, n)
        for i in range(0, 10):
            assert same(tp.tbeta(i, 40), corollary_tbeta(pair, n, i, 40), 40)


@pytest.mark.parametrize("seed", range(6))
def test_transform_soundness(seed):
    ell = seed % 3
    pair = BinomialPair(random_alpha(seed), ell=ell, label=f"random-{seed}")
    for n in (0, 1):
        assert verify_trinomial_pair(to_trinomial(pair, n), 8, 80).passed


# --- trinomial pairs and their sums ----------------------------------------------


def test_a2_trinomial_pair():
    assert verify_trinomial_pair(builtin("AB-A2-trinomial:0"), 10, 100).passed


def test_a1_odd_support_fails_at_one():
    report = verify_trinomial_pair(builtin("A1-trinomial-as-printed:0"), 4, 100)
    assert report.failure.index == 1


def test_a2_tbeta_one():
    assert same(builtin("AB-A2-trinomial:0").tbeta(1, N), geo())


def test_sum_with_negation_is_zero_pair():
    tp = builtin("A1-trinomial:0")
    zero = sum_pairs(tp, negate_pair(tp))
    assert all(zero.talpha(r).is_zero() for r in range(10))
    assert all(zero.tbeta(L, N).is_zero() for L in range(10))
    assert verify_trinomial_pair(zero, 10, N).passed


def test_sum_pairs_needs_matching_n():
    with pytest.raises(ValueError):
        sum_pairs(builtin("A1-trinomial:0"), builtin("A1-trinomial:1"))


def test_sum_residual_is_sum_of_residuals():
    a, b = builtin("A1-trinomial:0"), builtin("AB-A2-trinomial:0")
    s = sum_pairs(a, b)
    for L in range(0, 10):
        res = [p.tbeta(L, N) - trinomial_rhs(p, L, N) for p in (a, b, s)]
        assert res[2] == res[0] + res[1]
        assert all(r.is_zero() for r in res)


def test_sum_pair_passes():
    s = sum_pairs(builtin("A1-trinomial:0"), builtin("AB-A2-trinomial:0"))
    assert verify_trinomial_pair(s, 15, 200).passed


# --- the lemma and corollaries ---------------------------------------------------------


def delta_trinomial(n):
    return to_trinomial(BinomialPair(delta_alpha, label="delta"), n)


def test_ab_lemma_small_values():
    tp0, tp1 = delta_trinomial(0), delta_trinomial(1)
    assert same(lemma_lhs(tp0, 0, N), Series.one()) and same(lemma_rhs(tp0, 0, N), Series.one())
    want = mul(Series.from_terms([(0, 1), (2, 1)]), geo())
    assert same(lemma_lhs(tp0, 1, N), want) and same(lemma_rhs(tp0, 1, N), want)
    assert same(lemma_rhs(tp1, 1, N), 2 * geo()) and same(lemma_lhs(tp1, 1, N), 2 * geo())


@pytest.mark.parametrize("n", [0, 1])
def test_ab_lemma_with_cutoff(n):
    for tp in (delta_trinomial(n), builtin(f"A1-trinomial:{n}")):
        for M in range(0, 6):
            assert check_ab_lemma(tp, M, N).passed


def test_ab_lemma_order_bounded_differs():
    report = check_ab_lemma(delta_trinomial(0), 1, N, bailey.LHS_ORDER_BOUNDED)
    assert report.outcome == bailey.FAIL


def test_ab_lemma_rejects_unknown_limit():
    with pytest.raises(ValueError):
        check_ab_lemma(delta_trinomial(0), 1, N, "forever")


def test_cor2_bracket_at_zero():
    # talpha = delta: the right side is the prefactor times (1 - q)/(1 + q)
    bracket = mul(poch_finite(Q, 1), invert(Series.from_terms([(0, 1), (2, 1)]), N))
    assert same(corollary_rhs(delta_trinomial(1), N), mul(infinite_prefactor(N), bracket))


def test_corollaries_on_builtins():
    assert check_cor1(builtin("A1-trinomial:0"), 60).passed
    assert check_cor1(builtin("AB-A2-trinomial:0"), 60).passed
    assert check_cor2(builtin("A1-trinomial:1"), 60).passed
    assert check_cor1(delta_trinomial(0), 60).passed and check_cor2(delta_trinomial(1), 60).passed


def perturbed(tp, L0, e):
    return TrinomialPair(tp.talpha, lambda L, o: tp.tbeta(L, o) + (Series.monomial(e) if L == L0 else 0),
                         tp.n, tp.label + "-perturbed")


def test_corrupted_pair_fails_cor1():
    report = check_cor1(perturbed(builtin("A1-trinomial:0"), 2, 5), 60)
    # 1/2 (-1)_2 q tbeta_2 shifts the perturbation t^5 to t^7
    assert report.outcome == bailey.FAIL and report.failure.exp_t == 7


def test_corrupted_pair_fails_cor2():
    report = check_cor2(perturbed(builtin("A1-trinomial:1"), 3, 1), 60)
    assert report.outcome == bailey.FAIL


def test_corollary_requires_matching_n():
    with pytest.raises(ValueError):
        check_cor1(builtin("A1-trinomial:1"), 20)
    with pytest.raises(ValueError):
        check_cor2(builtin("A1-trinomial:0"), 20)


def test_negative_valuation_does_not_converge():
    tp = TrinomialPair(lambda r: Series.monomial(-2) if r == 1 else Series.zero(),
                       lambda L, o: Series.zero(o), 0, "bad")
    with pytest.raises(ConvergenceError):
        check_cor1(tp, 20)


def test_L_cap_gives_insufficient_order():
    report = check_cor1(builtin("A1-trinomial:0"), 60, L_cap=10)
    assert report.outcome == bailey.INSUFFICIENT and not report.passed


def test_short_window_never_passes():
    tp = builtin("A1-trinomial:0")
    short = TrinomialPair(tp.talpha, lambda L, o: tp.tbeta(L, o).truncate(o - 3), 0, "short")
    report = verify_trinomial_pair(short, 3, N)
    assert report.outcome == bailey.INSUFFICIENT
    assert all(c.status == bailey.INSUFFICIENT for c in report.checks)


def test_fail_outranks_insufficient():
    report = bailey.VerificationReport("x", {}, [bailey.Check(0, bailey.INSUFFICIENT),
                                                 bailey.Check(1, bailey.FAIL, 3, Fraction(1), Fraction(2))])
    assert report.outcome == bailey.FAIL
    assert report.as_dict()["checks"][1]["mismatch"] == {"exp_t": 3, "lhs": "1", "rhs": "2"}


def test_parallel_checks_match_serial():
    tp = builtin("AB-A2-trinomial:1")
    serial = [verify_trinomial_pair(tp, L, 80).as_dict() for L in range(8)]
    with ThreadPoolExecutor(4) as pool:
        parallel = list(pool.map(lambda L: verify_trinomial_pair(tp, L, 80).as_dict(), range(8)))
    assert parallel == serial
    assert [q_n(1, 9, A, 90) for A in range(10)] == list(
        ThreadPoolExecutor(4).map(lambda A: q_n(1, 9, A, 90), range(10)))
