"""Exact q-trinomial coefficients and trinomial Bailey pairs over truncated q-series."""

from .bailey import (
    BinomialPair,
    ConvergenceError,
    TrinomialPair,
    VerificationReport,
    beta_from_alpha,
    check_ab_lemma,
    check_cor1,
    check_cor2,
    sum_pairs,
    to_trinomial,
    verify_binomial_pair,
    verify_lemma2,
    verify_trinomial_pair,
)
from .catalog import builtin, load_pair_document
from .qspecial import MonomialArg, classical_trinomial, poch_finite, poch_infinite, q_n, t_n, trinomial_eq1
from .series import InsufficientOrder, Series, SeriesError, equal_to_order

__version__ = "0.1.0"
