"""Command-line interface.

Exit codes: 0 pass, 1 mismatch, 2 usage or input error, 3 insufficient order.

    qtrinomial tri --def eq1 --L 2 --B 0 --A 0 --units q
    qtrinomial verify cor1 --pair builtin:A1-trinomial:0 --order 100
    qtrinomial verify ab-lemma --pair builtin:A1-trinomial:0 --M 5 --lhs-limit order-bounded
    qtrinomial catalog export A1
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import asdict, dataclass

from . import bailey
from .bailey import BinomialPair, ConvergenceError, TrinomialPair, VerificationReport
from .catalog import (
    BUILTIN_NAMES,
    ClosedBeta,
    DocumentError,
    builtin,
    builtin_document,
    dump_pair_document,
    resolve_source,
)
from .qspecial import Q, poch_finite, q_n, t_n, trinomial_eq1
from .series import InsufficientOrder, equal_to_order, mul, render

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_ORDER = 0, 1, 2, 3
_EXIT = {bailey.PASS: EXIT_PASS, bailey.FAIL: EXIT_FAIL, bailey.INSUFFICIENT: EXIT_ORDER}

IDENTITIES = ("pair", "tripair", "lemma2", "ab-lemma", "cor1", "cor2")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    order: int = 200
    L_max: int | None = None
    M: int | None = None
    pair: str | None = None
    n: int | None = None
    lhs_limit: str = bailey.LHS_M_CUTOFF
    L_cap: int = 10_000
    term_level: bool = False
    units: str = "q"
    format: str = "text"

    def __post_init__(self):
        if self.order < 1:
            raise UsageError("--order must be at least 1")


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qtrinomial", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--order", type=int, default=200, help="working order in t-units")
        sp.add_argument("--units", choices=("t", "q"), default="q", help="display units (default q)")
        sp.add_argument("--format", choices=("text", "json"), default="text")

    tri = sub.add_parser("tri", help="q-trinomial coefficients")
    tri.add_argument("--def", dest="definition", choices=("eq1", "T", "Q", "both"), required=True)
    tri.add_argument("--L", type=int, required=True)
    tri.add_argument("--A", type=int, required=True)
    tri.add_argument("--B", type=int)
    tri.add_argument("--n", type=int, choices=(0, 1))
    common(tri)

    ver = sub.add_parser("verify", help="run an identity check")
    ver.add_argument("identity", choices=IDENTITIES)
    ver.add_argument("--pair", required=True, help="builtin:NAME or path to a pair document")
    ver.add_argument("--Lmax", dest="L_max", type=int, default=20)
    ver.add_argument("--M", type=int, default=5)
    ver.add_argument("--n", type=int, choices=(0, 1))
    ver.add_argument("--lhs-limit", dest="lhs_limit", default=bailey.LHS_M_CUTOFF,
                     choices=(bailey.LHS_M_CUTOFF, "M-cutoff", bailey.LHS_ORDER_BOUNDED))
    ver.add_argument("--L-cap", dest="L_cap", type=int, default=10_000)
    ver.add_argument("--term-level", dest="term_level", action="store_true")
    ver.add_argument("--timing", action="store_true", help="record wall time in the report")
    common(ver)

    cat = sub.add_parser("catalog", help="built-in pairs")
    cat.add_argument("action", choices=("list", "show", "export"))
    cat.add_argument("name", nargs="?")
    cat.add_argument("--alpha", type=int)
    cat.add_argument("--beta", type=int)
    common(cat)
    return p


# --------------------------------------------------------------------------
# tri


def cmd_tri(args) -> int:
    d, L, A, N, units = args.definition, args.L, args.A, args.order, args.units
    if d == "eq1" and args.B is None:
        raise UsageError("--def eq1 needs --B")
    if d in ("T", "Q", "both") and args.n is None:
        raise UsageError(f"--def {d} needs --n")
    if L < 0:
        raise UsageError("--L must be nonnegative")
    out: dict = {"command": "tri", "definition": d, "L": L, "A": A}
    if d == "eq1":
        out.update(B=args.B, value=render(trinomial_eq1(L, args.B, A), units))
    elif d == "T":
        out.update(n=args.n, value=render(t_n(args.n, L, A), units))
    elif d == "Q":
        out.update(n=args.n, order=N, value=render(q_n(args.n, L, A, N), units))
    else:
        direct = t_n(args.n, L, A)
        via_sum = mul(q_n(args.n, L, A, N), poch_finite(Q, L))
        cmp = equal_to_order(direct, via_sum, via_sum.order)
        out.update(n=args.n, order=N, T_eq1=render(direct, units),
                   T_from_Q=render(via_sum, units),
                   agree=bool(cmp), mismatch_exp_t=cmp.exp_t)
    if args.format == "json":
        print(json.dumps(out, indent=2))
    elif d == "both":
        print(f"T (eq1 route):   {out['T_eq1']}")
        print(f"T (s-sum route): {out['T_from_Q']}")
        print("routes agree" if out["agree"] else f"routes differ at t^{out['mismatch_exp_t']}")
    else:
        print(out["value"])
    return EXIT_PASS if out.get("agree", True) else EXIT_FAIL


# --------------------------------------------------------------------------
# verify


def _trinomial(pair, n: int | None) -> TrinomialPair:
    if isinstance(pair, TrinomialPair):
        if n is not None and n != pair.n:
            raise UsageError(f"pair {pair.label!r} is relative to n={pair.n}, not {n}")
        return pair
    if n is None:
        raise UsageError("a binomial pair needs --n to be turned into a trinomial pair")
    return bailey.to_trinomial(pair, n)


def _binomial(pair) -> BinomialPair:
    if not isinstance(pair, BinomialPair):
        raise UsageError(f"{pair.label!r} is not a binomial pair")
    return pair


def run_verify(cfg: RunConfig) -> list[VerificationReport]:
    pair = resolve_source(cfg.pair)
    ident, N = cfg.command, cfg.order
    if ident == "pair":
        return [bailey.verify_binomial_pair(_binomial(pair), cfg.L_max, N)]
    if ident == "tripair":
        return [bailey.verify_trinomial_pair(_trinomial(pair, cfg.n), cfg.L_max, N)]
    if ident == "lemma2":
        if cfg.n is None:
            raise UsageError("lemma2 needs --n")
        bp = _binomial(pair)
        return [bailey.verify_lemma2(bp, cfg.n, L, N, cfg.term_level) for L in range(cfg.L_max + 1)]
    tp = _trinomial(pair, cfg.n)
    if ident == "ab-lemma":
        return [bailey.check_ab_lemma(tp, M, N, cfg.lhs_limit, cfg.L_cap) for M in range(cfg.M + 1)]
    if ident == "cor1":
        return [bailey.check_cor1(tp, N, cfg.L_cap)]
    return [bailey.check_cor2(tp, N, cfg.L_cap)]


def _flatten(reports: list[VerificationReport]) -> list[bailey.Check]:
    if len(reports) == 1:
        return list(reports[0].checks)
    out = []
    for r in reports:
        # one report per L (lemma2) or per M (ab-lemma); term-level lemma2 keeps its s-index
        for c in r.checks:
            if r.identity == "lemma2" and r.params.get("term_level"):
                c = bailey.Check(r.params["L"], c.status, c.exp_t, c.lhs, c.rhs,
                                 (c.detail + " " if c.detail else "") + f"s={c.index}")
            out.append(c)
    return out


def _verdict(checks) -> str:
    return bailey.VerificationReport("", {}, list(checks)).outcome


def cmd_verify(args) -> int:
    cfg = RunConfig(args.identity, args.order, args.L_max, args.M, args.pair, args.n,
                    args.lhs_limit, args.L_cap, args.term_level, args.units, args.format)
    start = time.perf_counter()
    reports = run_verify(cfg)
    elapsed = round((time.perf_counter() - start) * 1000, 3)
    checks = _flatten(reports)
    verdict = _verdict(checks)
    config = {k: v for k, v in asdict(cfg).items() if k not in ("command", "units", "format")}
    if cfg.command not in ("lemma2",):
        config.pop("term_level")
    if cfg.command not in ("ab-lemma",):
        config.pop("lhs_limit")
        config.pop("M")
    if cfg.command not in ("pair", "tripair", "lemma2"):
        config.pop("L_max")
    doc = {
        "command": f"verify {cfg.command}",
        "config": config,
        "verdict": verdict,
        "checks": [c.as_dict() for c in checks],
        "timing_ms": elapsed if args.timing else None,
    }
    if cfg.format == "json":
        print(json.dumps(doc, indent=2))
    else:
        print(f"verify {cfg.command} {cfg.pair} (order t^{cfg.order})")
        for c in checks:
            line = f"  index {c.index}: {c.status}"
            if c.status == bailey.FAIL:
                line += f" at t^{c.exp_t} (lhs {c.lhs}, rhs {c.rhs})"
            elif c.detail:
                line += f" ({c.detail})"
            print(line)
        print(f"verdict: {verdict}")
        if args.timing:
            print(f"timing_ms: {elapsed}")
    return _EXIT[verdict]


# --------------------------------------------------------------------------
# catalog


def cmd_catalog(args) -> int:
    if args.action == "list":
        for name in BUILTIN_NAMES:
            print(name)
        return EXIT_PASS
    if not args.name:
        raise UsageError(f"catalog {args.action} needs a NAME")
    try:
        doc = builtin_document(args.name)
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from None
    if args.action == "export":
        sys.stdout.write(dump_pair_document(doc))
        return EXIT_PASS
    pair = builtin(args.name)
    N, units = args.order, args.units
    if doc.kind == "binomial":
        print(f"{doc.name}: binomial pair relative to q^{doc.ell}")
    else:
        print(f"{doc.name}: trinomial pair relative to n={doc.n}")
    if args.alpha is not None:
        a = pair.alpha(args.alpha) if doc.kind == "binomial" else pair.talpha(args.alpha)
        print(f"alpha_{args.alpha} = {render(a, units)}")
    if args.beta is not None:
        L = args.beta
        if doc.kind == "binomial":
            value = pair.beta(L, N)
            head = f"{doc.beta.describe(L)} = " if isinstance(doc.beta, ClosedBeta) else ""
        else:
            value = pair.tbeta(L, N)
            head = ""
        print(f"beta_{L} = {head}{render(value, units)} (order {N})")
    return EXIT_PASS


def main(argv: list[str] | None = None) -> int:
    parser = _parser()
    args = parser.parse_args(argv)
    handler = {"tri": cmd_tri, "verify": cmd_verify, "catalog": cmd_catalog}[args.command]
    try:
        return handler(args)
    except (UsageError, DocumentError, KeyError, ValueError, OSError, ConvergenceError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"qtrinomial: error: {msg}", file=sys.stderr)
        return EXIT_USAGE
    except InsufficientOrder as exc:
        print(f"qtrinomial: {exc}", file=sys.stderr)
        return EXIT_ORDER


if __name__ == "__main__":
    sys.exit(main())
