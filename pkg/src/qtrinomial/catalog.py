"""Built-in Bailey pairs and the JSON pair-document format.

A pair document describes ``alpha`` (or ``talpha``) as a list of branches
``sign * t^(x j^2 + y j + z)`` placed at indices ``modulus * j + offset``;
every matching branch contributes to an index.  Exponent triples are in
t-units, so half-integer q-powers stay integral.

Binomial documents give ``beta`` as ``"derived"`` or as a closed product

    t^(p2 L^2 + p1 L + p0) * prod(num Pochhammers) / prod(den Pochhammers)

with each Pochhammer count affine in ``L``.  Trinomial documents give
``tbeta`` either as ``from-corollary`` (transform a named binomial pair) or
as an ``s-sum``

    tbeta_L = sum_{0 <= s <= L, s parity vs L} q^(s(s-n)/2) / ((q)_s (q)_(L-s)).

Example (Slater's A(1), shipped as ``data/A1.pair.json``)::

    {"name": "A1", "kind": "binomial", "ell": 0,
     "alpha": {"branches": [{"modulus": 3, "offset": 0, "jmin": 0, "jmax": null,
                             "sign": 1, "exp_t": [12, -2, 0]}, ...]},
     "beta": {"prefactor_t": [0, 0, 0], "num": [],
              "den": [{"sign": 1, "k_t": 2, "count": [2, 0]}]}}
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from typing import Callable, Union

import jsonschema

from .bailey import BinomialPair, TrinomialPair, to_trinomial
from .qspecial import MonomialArg, Q, inv_poch, poch_finite, poch_truncated
from .series import Series, invert, mul, sum_series


class DocumentError(ValueError):
    """A pair document failed to parse or validate."""


# --------------------------------------------------------------------------
# sequences


@dataclass(frozen=True)
class Branch:
    modulus: int
    offset: int
    jmin: int | None
    jmax: int | None
    sign: int
    exp_t: tuple[int, int, int]

    def j_at(self, index: int) -> int | None:
        """The ``j`` with ``modulus * j + offset == index`` inside the range, if any."""
        j, rem = divmod(index - self.offset, self.modulus)
        if rem:
            return None
        if self.jmin is not None and j < self.jmin:
            return None
        if self.jmax is not None and j > self.jmax:
            return None
        return j

    def exponent(self, j: int) -> int:
        x, y, z = self.exp_t
        return x * j * j + y * j + z


@dataclass(frozen=True)
class SequenceSpec:
    branches: tuple[Branch, ...]


def alpha_eval(spec: SequenceSpec, index: int) -> Series:
    """Sum of ``sign * t^exponent(j)`` over every branch that hits ``index``."""
    terms = []
    for br in spec.branches:
        j = br.j_at(index)
        if j is not None:
            terms.append((br.exponent(j), br.sign))
    return Series.from_terms(terms)


# --------------------------------------------------------------------------
# closed-form beta


@dataclass(frozen=True)
class Factor:
    sign: int
    k_t: int
    count: tuple[int, int]

    def count_at(self, L: int) -> int:
        u, v = self.count
        n = u * L + v
        if n < 0:
            raise DocumentError(f"Pochhammer count {u}*L+{v} is negative at L={L}")
        return n

    @property
    def arg(self) -> MonomialArg:
        return MonomialArg(self.sign, self.k_t)

    def describe(self, L: int) -> str:
        base = {(1, 2): "q", (-1, 2): "-q", (-1, 0): "-1"}.get((self.sign, self.k_t))
        if base is None:
            sgn = "" if self.sign == 1 else "-"
            base = f"{sgn}q^({self.k_t}/2)" if self.k_t % 2 else f"{sgn}q^{self.k_t // 2}"
        return f"({base})_{self.count_at(L)}"


@dataclass(frozen=True)
class ClosedBeta:
    prefactor_t: tuple[int, int, int]
    num: tuple[Factor, ...]
    den: tuple[Factor, ...]

    def shift(self, L: int) -> int:
        a, b, c = self.prefactor_t
        return a * L * L + b * L + c

    def evaluate(self, L: int, order: int) -> Series:
        """The value at ``L``, correct up to t-exponent ``order``."""
        shift = self.shift(L)
        if all(f.k_t >= 0 for f in self.num + self.den):
            # every factor starts at t^0: work on truncated windows
            sub = max(0, order - shift)
            value = Series.one()
            for f in self.num:
                value = mul(value, poch_truncated(f.arg, f.count_at(L), sub))
            for f in self.den:
                value = mul(value, inv_poch(f.arg, f.count_at(L), sub))
            return value.shift(shift).truncate(order)
        num = Series.monomial(shift)
        for f in self.num:
            num = mul(num, poch_finite(f.arg, f.count_at(L)))
        den = Series.one()
        for f in self.den:
            den = mul(den, poch_finite(f.arg, f.count_at(L)))
        if num.is_zero():
            return Series.zero()
        return mul(num, invert(den, order - num.min_exp)).truncate(order)

    def describe(self, L: int) -> str:
        """Human-readable form at ``L``, e.g. ``1/(q)_6``."""
        e = self.shift(L)
        head = "" if e == 0 else (f"q^{e // 2}" if e % 2 == 0 else f"q^({e}/2)")
        top = " ".join([head] * bool(head) + [f.describe(L) for f in self.num]) or "1"
        if not self.den:
            return top
        return f"{top}/" + "".join(f.describe(L) for f in self.den)


# --------------------------------------------------------------------------
# documents


@dataclass(frozen=True)
class TBetaSpec:
    mode: str                  # "from-corollary" | "s-sum"
    parity: str | None = None  # "same" | "opposite" for s-sum
    source: str | None = None  # binomial pair name for from-corollary


@dataclass(frozen=True)
class PairDocument:
    name: str
    kind: str                  # "binomial" | "trinomial"
    ell: int | None
    n: int | None
    alpha: SequenceSpec | None
    beta: Union[str, ClosedBeta, None] = None
    tbeta: TBetaSpec | None = None


_INT = {"type": "integer"}
_TRIPLE = {"type": "array", "items": _INT, "minItems": 3, "maxItems": 3}
_FACTOR = {
    "type": "object",
    "additionalProperties": False,
    "required": ["sign", "k_t", "count"],
    "properties": {
        "sign": {"enum": [1, -1]},
        "k_t": _INT,
        "count": {"type": "array", "items": _INT, "minItems": 2, "maxItems": 2},
    },
}
_BRANCH = {
    "type": "object",
    "additionalProperties": False,
    "required": ["modulus", "offset", "sign", "exp_t"],
    "properties": {
        "modulus": {"type": "integer", "minimum": 1},
        "offset": _INT,
        "jmin": {"type": ["integer", "null"]},
        "jmax": {"type": ["integer", "null"]},
        "sign": {"enum": [1, -1]},
        "exp_t": _TRIPLE,
    },
}
SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["name", "kind"],
    "properties": {
        "name": {"type": "string", "minLength": 1},
        "kind": {"enum": ["binomial", "trinomial"]},
        "ell": {"type": "integer", "minimum": 0},
        "n": {"enum": [0, 1]},
        "alpha": {
            "type": "object",
            "additionalProperties": False,
            "required": ["branches"],
            "properties": {"branches": {"type": "array", "items": _BRANCH}},
        },
        "beta": {
            "oneOf": [
                {"const": "derived"},
                {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["den"],
                    "properties": {
                        "prefactor_t": _TRIPLE,
                        "num": {"type": "array", "items": _FACTOR},
                        "den": {"type": "array", "items": _FACTOR},
                    },
                },
            ]
        },
        "tbeta": {
            "type": "object",
            "additionalProperties": False,
            "required": ["mode"],
            "properties": {
                "mode": {"enum": ["from-corollary", "s-sum"]},
                "parity": {"enum": ["same", "opposite"]},
                "source": {"type": "string"},
            },
        },
    },
}


def _path(err: jsonschema.ValidationError) -> str:
    return "/".join(str(p) for p in err.absolute_path) or "<root>"


def _semantic(obj: dict) -> None:
    kind = obj["kind"]
    if kind == "binomial":
        for key in ("ell", "alpha", "beta"):
            if key not in obj:
                raise DocumentError(f"{key}: required for binomial documents")
        for key in ("n", "tbeta"):
            if key in obj:
                raise DocumentError(f"{key}: not allowed in binomial documents")
    else:
        for key in ("n", "tbeta"):
            if key not in obj:
                raise DocumentError(f"{key}: required for trinomial documents")
        for key in ("ell", "beta"):
            if key in obj:
                raise DocumentError(f"{key}: not allowed in trinomial documents")
        tb = obj["tbeta"]
        if tb["mode"] == "from-corollary":
            if "source" not in tb or "parity" in tb:
                raise DocumentError("tbeta: from-corollary takes a source and no parity")
            if "alpha" in obj:
                raise DocumentError("alpha: from-corollary documents take alpha from the source")
        else:
            if "parity" not in tb or "source" in tb:
                raise DocumentError("tbeta: s-sum takes a parity and no source")
            if "alpha" not in obj:
                raise DocumentError("alpha: required for s-sum documents")
    beta = obj.get("beta")
    if isinstance(beta, dict):
        for where in ("num", "den"):
            for i, f in enumerate(beta.get(where, [])):
                u, v = f["count"]
                if u < 0 or v < 0:
                    raise DocumentError(
                        f"beta/{where}/{i}/count: {u}*L+{v} is negative for some L >= 0"
                    )
                if where == "den" and f["sign"] == 1 and f["k_t"] <= 0 and f["k_t"] % 2 == 0:
                    if u > 0 or v > -f["k_t"] // 2:
                        raise DocumentError(f"beta/den/{i}: contains the factor 1 - q^0 = 0")


def normalize_document(obj: dict) -> dict:
    """Canonical dict form: fixed key order, explicit defaults."""
    out: dict = {"name": obj["name"], "kind": obj["kind"]}
    if obj["kind"] == "binomial":
        out["ell"] = obj["ell"]
    else:
        out["n"] = obj["n"]
    if "alpha" in obj:
        out["alpha"] = {"branches": [
            {"modulus": b["modulus"], "offset": b["offset"], "jmin": b.get("jmin"),
             "jmax": b.get("jmax"), "sign": b["sign"], "exp_t": list(b["exp_t"])}
            for b in obj["alpha"]["branches"]
        ]}
    if "beta" in obj:
        beta = obj["beta"]
        if beta == "derived":
            out["beta"] = "derived"
        else:
            out["beta"] = {
                "prefactor_t": list(beta.get("prefactor_t", [0, 0, 0])),
                "num": [_norm_factor(f) for f in beta.get("num", [])],
                "den": [_norm_factor(f) for f in beta["den"]],
            }
    if "tbeta" in obj:
        tb = obj["tbeta"]
        out["tbeta"] = {"mode": tb["mode"]}
        for key in ("parity", "source"):
            if key in tb:
                out["tbeta"][key] = tb[key]
    return out


def _norm_factor(f: dict) -> dict:
    return {"sign": f["sign"], "k_t": f["k_t"], "count": list(f["count"])}


def _build(obj: dict) -> PairDocument:
    alpha = None
    if "alpha" in obj:
        alpha = SequenceSpec(tuple(
            Branch(b["modulus"], b["offset"], b.get("jmin"), b.get("jmax"), b["sign"],
                   tuple(b["exp_t"]))
            for b in obj["alpha"]["branches"]
        ))
    beta = obj.get("beta")
    if isinstance(beta, dict):
        beta = ClosedBeta(
            tuple(beta.get("prefactor_t", (0, 0, 0))),
            tuple(Factor(f["sign"], f["k_t"], tuple(f["count"])) for f in beta.get("num", [])),
            tuple(Factor(f["sign"], f["k_t"], tuple(f["count"])) for f in beta["den"]),
        )
    tbeta = None
    if "tbeta" in obj:
        tb = obj["tbeta"]
        tbeta = TBetaSpec(tb["mode"], tb.get("parity"), tb.get("source"))
    return PairDocument(obj["name"], obj["kind"], obj.get("ell"), obj.get("n"), alpha, beta, tbeta)


def validate_document(obj) -> PairDocument:
    """Validate an already-parsed document."""
    try:
        jsonschema.validate(obj, SCHEMA)
    except jsonschema.ValidationError as err:
        raise DocumentError(f"{_path(err)}: {err.message}") from None
    _semantic(obj)
    return _build(obj)


def load_pair_document(text: str) -> PairDocument:
    """Parse and validate a JSON pair document."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as err:
        raise DocumentError(f"line {err.lineno} column {err.colno}: {err.msg}") from None
    return validate_document(obj)


def document_to_dict(doc: PairDocument) -> dict:
    out: dict = {"name": doc.name, "kind": doc.kind}
    if doc.kind == "binomial":
        out["ell"] = doc.ell
    else:
        out["n"] = doc.n
    if doc.alpha is not None:
        out["alpha"] = {"branches": [
            {"modulus": b.modulus, "offset": b.offset, "jmin": b.jmin, "jmax": b.jmax,
             "sign": b.sign, "exp_t": list(b.exp_t)}
            for b in doc.alpha.branches
        ]}
    if isinstance(doc.beta, ClosedBeta):
        out["beta"] = {
            "prefactor_t": list(doc.beta.prefactor_t),
            "num": [{"sign": f.sign, "k_t": f.k_t, "count": list(f.count)} for f in doc.beta.num],
            "den": [{"sign": f.sign, "k_t": f.k_t, "count": list(f.count)} for f in doc.beta.den],
        }
    elif doc.beta is not None:
        out["beta"] = doc.beta
    if doc.tbeta is not None:
        out["tbeta"] = {"mode": doc.tbeta.mode}
        if doc.tbeta.parity is not None:
            out["tbeta"]["parity"] = doc.tbeta.parity
        if doc.tbeta.source is not None:
            out["tbeta"]["source"] = doc.tbeta.source
    return out


def dump_pair_document(doc: PairDocument) -> str:
    return json.dumps(document_to_dict(doc), indent=2) + "\n"


# --------------------------------------------------------------------------
# evaluation


def parity_s_sum(n: int, L: int, parity: str, order: int) -> Series:
    """``sum_{s <= L} q^(s(s-n)/2) / ((q)_s (q)_(L-s))`` over ``s`` of the given parity vs ``L``."""
    start = L % 2 if parity == "same" else (L + 1) % 2
    terms = []
    for s in range(start, L + 1, 2):
        shift = s * (s - n)
        if shift > order:
            break
        sub = order - shift
        terms.append(mul(inv_poch(Q, s, sub), inv_poch(Q, L - s, sub)).shift(shift))
    return sum_series(terms, order)


Resolver = Callable[[str], Union[BinomialPair, TrinomialPair]]


def build_pair(doc: PairDocument, resolve: Resolver | None = None):
    """Wire a document into a :class:`BinomialPair` or :class:`TrinomialPair`.

    ``resolve`` looks up the source of ``from-corollary`` documents (default:
    :func:`builtin`).
    """
    if doc.kind == "binomial":
        spec = doc.alpha

        def alpha(r: int) -> Series:
            return alpha_eval(spec, r)

        if doc.beta == "derived":
            return BinomialPair(alpha, None, doc.ell, doc.name)
        closed = doc.beta
        return BinomialPair(alpha, closed.evaluate, doc.ell, doc.name)

    tb = doc.tbeta
    if tb.mode == "from-corollary":
        source = (resolve or builtin)(tb.source)
        if not isinstance(source, BinomialPair):
            raise DocumentError(f"tbeta/source: {tb.source!r} is not a binomial pair")
        tp = to_trinomial(source, doc.n)
        tp.label = doc.name
        return tp
    spec = doc.alpha
    n = doc.n
    return TrinomialPair(lambda r: alpha_eval(spec, r),
                         lambda L, order: parity_s_sum(n, L, tb.parity, order),
                         n, doc.name)


# --------------------------------------------------------------------------
# built-ins


def _branch(modulus, offset, jmin, sign, exp_t):
    return {"modulus": modulus, "offset": offset, "jmin": jmin, "jmax": None,
            "sign": sign, "exp_t": list(exp_t)}


# the four A(1) shapes q^(6j^2-j), q^(6j^2+j), -q^(6j^2-5j+1), -q^(6j^2+5j+1) in t-units
_PLUS_LO, _PLUS_HI = (12, -2, 0), (12, 2, 0)
_MINUS_LO, _MINUS_HI = (12, -10, 2), (12, 10, 2)


def _a1_branches(modulus: int, step: int) -> list[dict]:
    return [
        _branch(modulus, 0, 0, 1, _PLUS_LO),
        _branch(modulus, 0, 1, 1, _PLUS_HI),
        _branch(modulus, -step, 1, -1, _MINUS_LO),
        _branch(modulus, step, 0, -1, _MINUS_HI),
    ]


def _builtin_dict(name: str) -> dict:
    base, _, param = name.partition(":")
    if base == "A1" and not param:
        return {
            "name": "A1", "kind": "binomial", "ell": 0,
            "alpha": {"branches": _a1_branches(3, 1)},
            "beta": {"prefactor_t": [0, 0, 0], "num": [],
                     "den": [{"sign": 1, "k_t": 2, "count": [2, 0]}]},
        }
    if base == "delta" and param.isdigit():
        return {
            "name": name, "kind": "binomial", "ell": int(param),
            "alpha": {"branches": [{"modulus": 1, "offset": 0, "jmin": 0, "jmax": 0,
                                    "sign": 1, "exp_t": [0, 0, 0]}]},
            "beta": "derived",
        }
    if param in ("0", "1"):
        n = int(param)
        if base == "A1-trinomial":
            return {"name": name, "kind": "trinomial", "n": n,
                    "tbeta": {"mode": "from-corollary", "source": "A1"}}
        if base == "A1-trinomial-as-printed":
            return {"name": name, "kind": "trinomial", "n": n,
                    "alpha": {"branches": _a1_branches(6, 1)},
                    "tbeta": {"mode": "s-sum", "parity": "same"}}
        if base == "AB-A2-trinomial":
            return {"name": name, "kind": "trinomial", "n": n,
                    "alpha": {"branches": [
                        _branch(6, -1, 1, 1, _PLUS_LO),
                        _branch(6, 1, 0, 1, _PLUS_HI),
                        _branch(6, -3, 1, -1, _MINUS_LO),
                        _branch(6, 3, 0, -1, _MINUS_HI),
                    ]},
                    "tbeta": {"mode": "s-sum", "parity": "opposite"}}
    raise KeyError(f"unknown builtin pair {name!r}")


BUILTIN_NAMES = (
    "A1",
    "A1-trinomial:0", "A1-trinomial:1",
    "AB-A2-trinomial:0", "AB-A2-trinomial:1",
    "A1-trinomial-as-printed:0", "A1-trinomial-as-printed:1",
    "delta:0", "delta:1", "delta:2",
)


def builtin_document(name: str) -> PairDocument:
    """Document form of a built-in (``delta:ell`` accepts any ``ell >= 0``)."""
    return validate_document(_builtin_dict(name))


_builtins: dict[str, Union[BinomialPair, TrinomialPair]] = {}


def builtin(name: str) -> Union[BinomialPair, TrinomialPair]:
    """A wired built-in pair; instances are shared so their memo tables are reused."""
    pair = _builtins.get(name)
    if pair is None:
        pair = _builtins.setdefault(name, build_pair(builtin_document(name)))
    return pair


def shipped_documents() -> dict[str, str]:
    """Text of the JSON documents bundled under ``qtrinomial/data``."""
    root = resources.files("qtrinomial") / "data"
    return {p.name: p.read_text() for p in sorted(root.iterdir(), key=lambda p: p.name)
            if p.name.endswith(".pair.json")}


def resolve_source(source: str):
    """``builtin:NAME`` or a path to a JSON pair document."""
    if source.startswith("builtin:"):
        return builtin(source[len("builtin:"):])
    with open(source, encoding="utf-8") as fh:
        return build_pair(load_pair_document(fh.read()))
