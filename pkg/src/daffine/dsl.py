"""Text format for bundle descriptions.

A document is a sequence of named blocks::

    double A { n1 = 1; n2 = 1; n3 = 1; l1 = [1]; l2 = [1]; sigma = [1]; }

Block kinds: ``space`` (hull_dim, alpha, v), ``double`` (dims, functionals,
optional marked section and constraint rows), ``atlas`` (wiring plus per-edge
coefficient polynomials in x1..xm, keyed ``src.dst.field``), ``special_bundle``
(m, n, optional omega covector) and ``graded`` (order, component dims keyed by
bitstrings, functionals keyed by unit degree, optional sigma).

Values are rationals, identifiers, possibly-nested bracket lists, or
polynomial expressions over x1, x2, ... with rational coefficients.  Parsing
normalises each block to a canonical field order and collapses constant
polynomial expressions to rationals, so printing and reparsing a document
reproduces it exactly.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple, Union

from .affine import BispecialRep
from .atlas import Atlas, TransitionData
from .double import DecomposedDouble, DoubleAffine
from .errors import (
    DaffineError,
    DimMismatch,
    DuplicateName,
    ParseError,
    UnresolvedReference,
)
from .exact import BaseMap, Bilinear, Mat, Poly, Vec
from .naffine import GradedSpace, NAffine
from .phase import OneForm, TrivialBispecial

BLOCK_KINDS = ("space", "double", "atlas", "special_bundle", "graded")

_VAR_RE = re.compile(r"^x([1-9][0-9]*)$")
_BITS_RE = re.compile(r"^[01]+$")

Monomial = Tuple[Tuple[int, int], ...]  # sorted ((var, exponent), ...)


@dataclass(frozen=True)
class PolyValue:
    """A non-constant polynomial literal, agnostic of the variable count."""

    terms: Tuple[Tuple[Monomial, Fraction], ...]

    @property
    def max_var(self) -> int:
        return max(v for mono, _ in self.terms for v, _e in mono)

    def to_poly(self, nvars: int) -> Poly:
        exps = {}
        for mono, c in self.terms:
            dense = [0] * nvars
            for v, e in mono:
                if v >= nvars:
                    raise DimMismatch(
                        f"polynomial uses x{v + 1} but only {nvars} base variables exist"
                    )
                dense[v] = e
            exps[tuple(dense)] = c
        return Poly(nvars, exps)

    def __str__(self) -> str:
        parts = []
        for idx, (mono, c) in enumerate(self.terms):
            mag = abs(c)
            if mono:
                body = "*".join(
                    f"x{v + 1}" + (f"^{e}" if e > 1 else "") for v, e in mono
                )
                piece = body if mag == 1 else f"{mag}*{body}"
            else:
                piece = str(mag)
            if idx == 0:
                parts.append(piece if c > 0 else f"-{piece}")
            else:
                parts.append((" + " if c > 0 else " - ") + piece)
        return "".join(parts)


Value = Union[Fraction, str, Tuple["Value", ...], PolyValue]


def _term_key(item):
    mono, _ = item
    return (-sum(e for _, e in mono), mono)


def _canon(terms: Dict[Monomial, Fraction]) -> Value:
    kept = {m: c for m, c in terms.items() if c}
    if not kept:
        return Fraction(0)
    if len(kept) == 1 and () in kept:
        return kept[()]
    return PolyValue(tuple(sorted(kept.items(), key=_term_key)))


def _pconst(c: Fraction) -> Dict[Monomial, Fraction]:
    return {(): Fraction(c)}


def _pvar(i: int) -> Dict[Monomial, Fraction]:
    return {((i, 1),): Fraction(1)}


def _padd(a, b, sign=1):
    out = dict(a)
    for m, c in b.items():
        out[m] = out.get(m, Fraction(0)) + sign * c
    return out


def _pmul(a, b):
    out: Dict[Monomial, Fraction] = {}
    for m1, c1 in a.items():
        for m2, c2 in b.items():
            merged = dict(m1)
            for v, e in m2:
                merged[v] = merged.get(v, 0) + e
            key = tuple(sorted(merged.items()))
            out[key] = out.get(key, Fraction(0)) + c1 * c2
    return out


def _ppow(a, k: int):
    out = _pconst(Fraction(1))
    for _ in range(k):
        out = _pmul(out, a)
    return out


# ---------------------------------------------------------------------------
# Tokenizer and parser


@dataclass(frozen=True)
class Token:
    kind: str  # ident | int | punct | eof
    text: str
    line: int
    col: int


_PUNCT = set("{}[]=;,./+-*^()")


def _tokenize(text: str) -> List[Token]:
    toks: List[Token] = []
    line, col, i, n = 1, 1, 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line, col, i = line + 1, 1, i + 1
            continue
        if ch in " \t\r":
            col, i = col + 1, i + 1
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            toks.append(Token("int", text[i:j], line, col))
            col, i = col + (j - i), j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            toks.append(Token("ident", text[i:j], line, col))
            col, i = col + (j - i), j
            continue
        if ch in _PUNCT:
            toks.append(Token("punct", ch, line, col))
            col, i = col + 1, i + 1
            continue
        raise ParseError(line, col, ("a token",), found=repr(ch))
    toks.append(Token("eof", "", line, col))
    return toks


@dataclass(frozen=True)
class Block:
    kind: str
    name: str
    fields: Tuple[Tuple[str, Value], ...]

    def field_map(self) -> Dict[str, Value]:
        return dict(self.fields)


@dataclass(frozen=True)
class Document:
    blocks: Tuple[Block, ...]

    def by_kind(self, kind: str):
        return tuple(b for b in self.blocks if b.kind == kind)


_FIELD_ORDER = {
    "space": ("hull_dim", "alpha", "v"),
    "double": ("n1", "n2", "n3", "l1", "l2", "sigma", "constraints"),
    "special_bundle": ("m", "n", "omega"),
}
_ATLAS_HEAD = ("base_dim", "fiber_dims", "charts")
_EDGE_FIELDS = (
    "base_p",
    "base_q",
    "alpha0",
    "alpha",
    "beta0",
    "beta",
    "gamma00",
    "gamma_y",
    "gamma_z",
    "gamma_yz",
    "sigma",
    "samples",
)

# Fields that may not carry an empty vector: catching `l1=[]` style mistakes
# at parse time with the field named in the diagnostic.
_NONEMPTY = {"alpha", "v", "l1", "l2", "sigma", "omega", "fiber_dims", "charts"}


class _Parser:
    def __init__(self, toks: List[Token]):
        self.toks = toks
        self.i = 0

    def peek(self, ahead: int = 0) -> Token:
        return self.toks[min(self.i + ahead, len(self.toks) - 1)]

    def advance(self) -> Token:
        tok = self.toks[self.i]
        if tok.kind != "eof":
            self.i += 1
        return tok

    def fail(self, expected) -> None:
        tok = self.peek()
        raise ParseError(
            tok.line, tok.col, expected, found=tok.text or "end of input"
        )

    def expect_punct(self, ch: str) -> Token:
        tok = self.peek()
        if tok.kind != "punct" or tok.text != ch:
            self.fail((f"'{ch}'",))
        return self.advance()

    def expect_ident(self, what: str = "an identifier") -> Token:
        tok = self.peek()
        if tok.kind != "ident":
            self.fail((what,))
        return self.advance()

    def at_punct(self, ch: str) -> bool:
        tok = self.peek()
        return tok.kind == "punct" and tok.text == ch

    # -- grammar ------------------------------------------------------------

    def document(self) -> Document:
        blocks = []
        names = set()
        while self.peek().kind != "eof":
            block = self.block()
            if block.name in names:
                raise DuplicateName(f"duplicate block name '{block.name}'")
            names.add(block.name)
            blocks.append(block)
        return Document(tuple(blocks))

    def block(self) -> Block:
        kind_tok = self.peek()
        if kind_tok.kind != "ident" or kind_tok.text not in BLOCK_KINDS:
            self.fail(tuple(BLOCK_KINDS))
        self.advance()
        name = self.expect_ident("a block name").text
        self.expect_punct("{")
        fields = []
        seen = set()
        while not self.at_punct("}"):
            key_tok = self.peek()
            key = self.key()
            if key in seen:
                raise ParseError(
                    key_tok.line, key_tok.col, (f"a key other than '{key}'",), found=key
                )
            seen.add(key)
            self.expect_punct("=")
            value = self.value()
            if key.rsplit(".", 1)[-1] in _NONEMPTY and value == ():
                raise ParseError(
                    key_tok.line, key_tok.col, (f"a nonempty value for '{key}'",), found="[]"
                )
            self.expect_punct(";")
            fields.append((key, value, key_tok))
        self.expect_punct("}")
        return Block(kind_tok.text, name, _canonical_fields(kind_tok.text, fields))

    def key(self) -> str:
        parts = [self.expect_ident("a field key").text]
        while self.at_punct("."):
            self.advance()
            parts.append(self.expect_ident("a key segment").text)
        return ".".join(parts)

    def value(self) -> Value:
        if self.at_punct("["):
            return self.list_value()
        tok = self.peek()
        if tok.kind == "ident" and not _VAR_RE.match(tok.text):
            self.advance()
            if not (self.at_punct(";") or self.at_punct(",") or self.at_punct("]")):
                self.fail(("';'", "','", "']'"))
            return tok.text
        return _canon(self.expr())

    def list_value(self) -> Tuple[Value, ...]:
        self.expect_punct("[")
        items: List[Value] = []
        if not self.at_punct("]"):
            items.append(self.value())
            while self.at_punct(","):
                self.advance()
                items.append(self.value())
        self.expect_punct("]")
        return tuple(items)

    # -- polynomial expressions ----------------------------------------------

    def expr(self):
        out = self.term()
        while self.at_punct("+") or self.at_punct("-"):
            sign = 1 if self.advance().text == "+" else -1
            out = _padd(out, self.term(), sign)
        return out

    def term(self):
        out = self.factor()
        while self.at_punct("*"):
            self.advance()
            out = _pmul(out, self.factor())
        return out

    def factor(self):
        neg = False
        while self.at_punct("-"):
            self.advance()
            neg = not neg
        base = self.atom()
        while self.at_punct("^"):
            self.advance()
            tok = self.peek()
            if tok.kind != "int":
                self.fail(("an integer exponent",))
            self.advance()
            base = _ppow(base, int(tok.text))
        return _padd(_pconst(Fraction(0)), base, -1 if neg else 1)

    def atom(self):
        tok = self.peek()
        if tok.kind == "int":
            self.advance()
            num = int(tok.text)
            if self.at_punct("/"):
                self.advance()
                den_tok = self.peek()
                if den_tok.kind != "int":
                    self.fail(("a denominator",))
                self.advance()
                return _pconst(Fraction(num, int(den_tok.text)))
            return _pconst(Fraction(num))
        if tok.kind == "ident":
            m = _VAR_RE.match(tok.text)
            if m:
                self.advance()
                return _pvar(int(m.group(1)) - 1)
            self.fail(("a variable x<k>",))
        if self.at_punct("("):
            self.advance()
            out = self.expr()
            self.expect_punct(")")
            return out
        self.fail(("a rational", "a variable x<k>", "'('"))


def _canonical_fields(kind: str, fields) -> Tuple[Tuple[str, Value], ...]:
    """Validate field keys for the block kind and sort them canonically."""

    def order_key(entry):
        key, _value, tok = entry
        if kind in _FIELD_ORDER:
            if key not in _FIELD_ORDER[kind]:
                raise ParseError(tok.line, tok.col, _FIELD_ORDER[kind], found=key)
            return (0, _FIELD_ORDER[kind].index(key), "")
        if kind == "graded":
            if key == "n":
                return (0, 0, "")
            if key.startswith("dim_") and _BITS_RE.match(key[4:]):
                return (1, 0, key[4:])
            if key.startswith("l_") and _BITS_RE.match(key[2:]) and key[2:].count("1") == 1:
                return (2, key[2:].index("1"), "")
            if key == "sigma":
                return (3, 0, "")
            raise ParseError(
                tok.line, tok.col, ("n", "dim_<bits>", "l_<unit bits>", "sigma"), found=key
            )
        # atlas: head fields, then src.dst.field edge entries
        if key in _ATLAS_HEAD:
            return (0, _ATLAS_HEAD.index(key), "")
        parts = key.split(".")
        if len(parts) == 3 and parts[2] in _EDGE_FIELDS:
            return (1, (parts[0], parts[1]), _EDGE_FIELDS.index(parts[2]))
        raise ParseError(
            tok.line, tok.col, _ATLAS_HEAD + ("<src>.<dst>.<field>",), found=key
        )

    decorated = sorted(((order_key(e), e) for e in fields), key=lambda p: p[0])
    return tuple((key, value) for _, (key, value, _tok) in decorated)


def parse(text: str) -> Document:
    """Parse source text into a canonical Document."""
    return _Parser(_tokenize(text)).document()


def format_value(v: Value) -> str:
    if isinstance(v, tuple):
        return "[" + ", ".join(format_value(x) for x in v) + "]"
    return str(v)


def print_document(doc: Document) -> str:
    """Render a Document canonically; parsing the output reproduces it."""
    chunks = []
    for b in doc.blocks:
        lines = [f"{b.kind} {b.name} {{"]
        for key, value in b.fields:
            lines.append(f"  {key} = {format_value(value)};")
        lines.append("}")
        chunks.append("\n".join(lines))
    return "\n\n".join(chunks) + "\n"


# ---------------------------------------------------------------------------
# Serialization of computational objects back into blocks


def value_of_poly(p: Poly) -> Value:
    """A Poly as a document value: a rational when constant."""
    terms: Dict[Monomial, Fraction] = {}
    for exp, c in p.terms.items():
        mono = tuple((i, e) for i, e in enumerate(exp) if e)
        terms[mono] = Fraction(c)
    return _canon(terms)


def _value_of_entry(x) -> Value:
    return value_of_poly(x) if isinstance(x, Poly) else Fraction(x)


def value_of_vec(v: Vec) -> Tuple[Value, ...]:
    return tuple(_value_of_entry(x) for x in v)


def value_of_mat(m: Mat) -> Tuple[Value, ...]:
    return tuple(tuple(_value_of_entry(x) for x in row) for row in m.rows)


def value_of_bilinear(b: Bilinear) -> Tuple[Value, ...]:
    return tuple(
        tuple(tuple(_value_of_entry(x) for x in row) for row in layer)
        for layer in b.entries
    )


def _canonical(kind: str, pairs) -> Tuple[Tuple[str, Value], ...]:
    dummy = [(k, v, Token("ident", k, 0, 0)) for k, v in pairs]
    return _canonical_fields(kind, dummy)


def block_from_space(name: str, rep: BispecialRep) -> Block:
    pairs = [("hull_dim", Fraction(rep.hull_dim)), ("alpha", value_of_vec(rep.alpha))]
    if rep.v is not None:
        pairs.append(("v", value_of_vec(rep.v)))
    return Block("space", name, _canonical("space", pairs))


def block_from_double(name: str, space, bundle=None, constraints=None) -> Block:
    """A double block from a DecomposedDouble plus optional structure."""
    pairs = [(k, Fraction(d)) for k, d in zip(("n1", "n2", "n3"), space.dims)]
    if bundle is not None:
        pairs.append(("l1", value_of_vec(bundle.l1)))
        pairs.append(("l2", value_of_vec(bundle.l2)))
        if bundle.sigma is not None:
            pairs.append(("sigma", value_of_vec(bundle.sigma)))
    if constraints is not None:
        pairs.append(
            ("constraints", tuple(tuple(Fraction(x) for x in row) for row in constraints))
        )
    return Block("double", name, _canonical("double", pairs))


def block_from_special_bundle(name: str, bundle: TrivialBispecial, omega=None) -> Block:
    pairs = [("m", Fraction(bundle.base_dim)), ("n", Fraction(bundle.n))]
    if omega is not None:
        pairs.append(("omega", value_of_vec(omega.coeffs)))
    return Block("special_bundle", name, _canonical("special_bundle", pairs))


def block_from_graded(name: str, a: NAffine) -> Block:
    n = a.space.n
    pairs = [("n", Fraction(n))]
    for deg in a.space.degrees():
        pairs.append(("dim_" + "".join(map(str, deg)), Fraction(a.space.dim_of(deg))))
    for i, l in enumerate(a.functionals):
        bits = "".join("1" if k == i else "0" for k in range(n))
        pairs.append((f"l_{bits}", value_of_vec(l)))
    if a.sigma is not None:
        pairs.append(("sigma", value_of_vec(a.sigma)))
    return Block("graded", name, _canonical("graded", pairs))


def block_from_atlas(name: str, atlas: Atlas) -> Block:
    pairs = [
        ("base_dim", Fraction(atlas.base_dim)),
        ("fiber_dims", tuple(Fraction(d) for d in atlas.fiber_dims)),
        ("charts", tuple(atlas.charts)),
    ]
    for src, dst, t in atlas.edges:
        stem = f"{src}.{dst}."
        pairs.extend(
            [
                (stem + "base_p", value_of_mat(t.base_map.P)),
                (stem + "base_q", value_of_vec(t.base_map.q)),
                (stem + "alpha0", value_of_vec(t.alpha0)),
                (stem + "alpha", value_of_mat(t.alpha)),
                (stem + "beta0", value_of_vec(t.beta0)),
                (stem + "beta", value_of_mat(t.beta)),
                (stem + "gamma00", value_of_vec(t.gamma00)),
                (stem + "gamma_y", value_of_mat(t.gamma_y)),
                (stem + "gamma_z", value_of_mat(t.gamma_z)),
                (stem + "gamma_yz", value_of_bilinear(t.gamma_yz)),
                (stem + "sigma", value_of_mat(t.sigma)),
                (stem + "samples", tuple(value_of_vec(s) for s in t.samples)),
            ]
        )
    return Block("atlas", name, _canonical("atlas", pairs))


# ---------------------------------------------------------------------------
# Elaboration into computational objects


@dataclass(frozen=True)
class DoubleBlock:
    """A decomposed double space, optionally with affine structure and
    level-set constraint rows."""

    space: DecomposedDouble
    bundle: Optional[DoubleAffine]
    constraints: Optional[Tuple[Tuple[Fraction, ...], ...]]


@dataclass(frozen=True)
class SpecialBundleBlock:
    bundle: TrivialBispecial
    omega: Optional[OneForm]


class _Fields:
    def __init__(self, block: Block):
        self.block = block
        self.map = block.field_map()

    def ctx(self, key: str) -> str:
        return f"{self.block.kind} block '{self.block.name}', field '{key}'"

    def need(self, key: str) -> Value:
        if key not in self.map:
            raise DaffineError(
                f"{self.block.kind} block '{self.block.name}' is missing field '{key}'"
            )
        return self.map[key]

    def opt(self, key: str) -> Optional[Value]:
        return self.map.get(key)


def _as_int(v: Value, ctx: str) -> int:
    if isinstance(v, Fraction) and v.denominator == 1:
        return int(v)
    raise DaffineError(f"{ctx}: expected an integer, got {format_value(v)}")


def _as_frac(v: Value, ctx: str) -> Fraction:
    if isinstance(v, Fraction):
        return v
    raise DaffineError(f"{ctx}: expected a rational, got {format_value(v)}")


def _as_vec(v: Value, ctx: str) -> Vec:
    if not isinstance(v, tuple):
        raise DaffineError(f"{ctx}: expected a vector")
    return Vec(_as_frac(x, ctx) for x in v)


def _as_rows(v: Value, ctx: str) -> Tuple[Tuple[Fraction, ...], ...]:
    if not isinstance(v, tuple):
        raise DaffineError(f"{ctx}: expected a list of rows")
    out = []
    for row in v:
        if not isinstance(row, tuple):
            raise DaffineError(f"{ctx}: expected rows of rationals")
        out.append(tuple(_as_frac(x, ctx) for x in row))
    return tuple(out)


def _as_poly(v: Value, m: int, ctx: str) -> Poly:
    if isinstance(v, Fraction):
        return Poly.const(m, v)
    if isinstance(v, PolyValue):
        try:
            return v.to_poly(m)
        except DimMismatch as e:
            raise DaffineError(f"{ctx}: {e}") from None
    raise DaffineError(f"{ctx}: expected a polynomial over x1..x{m}")


def _as_poly_vec(v: Value, m: int, ctx: str) -> Vec:
    if not isinstance(v, tuple):
        raise DaffineError(f"{ctx}: expected a vector of polynomials")
    return Vec(_as_poly(x, m, ctx) for x in v)


def _as_poly_mat(v: Value, m: int, ctx: str) -> Mat:
    if not isinstance(v, tuple) or not all(isinstance(r, tuple) for r in v):
        raise DaffineError(f"{ctx}: expected a matrix of polynomials")
    return Mat(tuple(tuple(_as_poly(x, m, ctx) for x in r) for r in v))


def _as_poly_bilinear(v: Value, m: int, ctx: str) -> Bilinear:
    if not isinstance(v, tuple):
        raise DaffineError(f"{ctx}: expected layers of matrices")
    layers = []
    for layer in v:
        if not isinstance(layer, tuple) or not all(isinstance(r, tuple) for r in layer):
            raise DaffineError(f"{ctx}: expected layers of matrices")
        layers.append(tuple(tuple(_as_poly(x, m, ctx) for x in r) for r in layer))
    return Bilinear(tuple(layers))


def _elaborate_space(block: Block) -> BispecialRep:
    f = _Fields(block)
    hull_dim = _as_int(f.need("hull_dim"), f.ctx("hull_dim"))
    alpha = _as_vec(f.need("alpha"), f.ctx("alpha"))
    v = f.opt("v")
    return BispecialRep(hull_dim, alpha, None if v is None else _as_vec(v, f.ctx("v")))


def _elaborate_double(block: Block) -> DoubleBlock:
    f = _Fields(block)
    dims = tuple(_as_int(f.need(k), f.ctx(k)) for k in ("n1", "n2", "n3"))
    space = DecomposedDouble(*dims)
    l1, l2 = f.opt("l1"), f.opt("l2")
    if (l1 is None) != (l2 is None):
        raise DaffineError(
            f"double block '{block.name}' needs both l1 and l2 or neither"
        )
    bundle = None
    if l1 is not None:
        sigma = f.opt("sigma")
        bundle = DoubleAffine(
            space,
            _as_vec(l1, f.ctx("l1")),
            _as_vec(l2, f.ctx("l2")),
            None if sigma is None else _as_vec(sigma, f.ctx("sigma")),
        )
    elif f.opt("sigma") is not None:
        raise DaffineError(f"double block '{block.name}' has sigma but no l1/l2")
    constraints = f.opt("constraints")
    return DoubleBlock(
        space,
        bundle,
        None if constraints is None else _as_rows(constraints, f.ctx("constraints")),
    )


def _elaborate_special_bundle(block: Block) -> SpecialBundleBlock:
    f = _Fields(block)
    m = _as_int(f.need("m"), f.ctx("m"))
    n = _as_int(f.need("n"), f.ctx("n"))
    omega = f.opt("omega")
    return SpecialBundleBlock(
        TrivialBispecial(m, n),
        None if omega is None else OneForm(_as_vec(omega, f.ctx("omega"))),
    )


def _elaborate_graded(block: Block) -> NAffine:
    f = _Fields(block)
    n = _as_int(f.need("n"), f.ctx("n"))
    dims = {}
    funcs: Dict[int, Vec] = {}
    sigma = None
    for key, value in block.fields:
        if key.startswith("dim_"):
            bits = key[4:]
            if len(bits) != n:
                raise DaffineError(f"{f.ctx(key)}: bitstring length must equal n={n}")
            dims[tuple(int(b) for b in bits)] = _as_int(value, f.ctx(key))
        elif key.startswith("l_"):
            bits = key[2:]
            if len(bits) != n:
                raise DaffineError(f"{f.ctx(key)}: bitstring length must equal n={n}")
            funcs[bits.index("1")] = _as_vec(value, f.ctx(key))
        elif key == "sigma":
            sigma = _as_vec(value, f.ctx(key))
    space = GradedSpace(n, dims)
    missing = [i for i in range(n) if i not in funcs]
    if missing:
        raise DaffineError(
            f"graded block '{block.name}' is missing functional l_"
            + "".join("1" if k == missing[0] else "0" for k in range(n))
        )
    return NAffine(space, tuple(funcs[i] for i in range(n)), sigma)


def _elaborate_atlas(block: Block) -> Atlas:
    f = _Fields(block)
    m = _as_int(f.need("base_dim"), f.ctx("base_dim"))
    fiber_value = f.need("fiber_dims")
    if not isinstance(fiber_value, tuple) or len(fiber_value) != 3:
        raise DaffineError(f"{f.ctx('fiber_dims')}: expected three dimensions")
    n1, n2, n3 = (_as_int(x, f.ctx("fiber_dims")) for x in fiber_value)
    charts_value = f.need("charts")
    if not isinstance(charts_value, tuple) or not all(
        isinstance(c, str) for c in charts_value
    ):
        raise DaffineError(f"{f.ctx('charts')}: expected chart names")
    charts = tuple(charts_value)

    grouped: Dict[Tuple[str, str], Dict[str, Value]] = {}
    for key, value in block.fields:
        if "." not in key:
            continue
        src, dst, field = key.split(".")
        for c in (src, dst):
            if c not in charts:
                raise UnresolvedReference(
                    f"atlas block '{block.name}' edge {src}->{dst} uses undeclared chart '{c}'"
                )
        grouped.setdefault((src, dst), {})[field] = value

    edges = []
    for (src, dst), data in sorted(grouped.items()):
        ctx = f"atlas block '{block.name}' edge {src}->{dst}"
        for field in _EDGE_FIELDS:
            if field not in data and field != "samples":
                raise DaffineError(f"{ctx} is missing field '{field}'")
        base_p = Mat(
            tuple(
                tuple(_as_frac(x, ctx) for x in row)
                for row in _as_rows(data["base_p"], ctx)
            )
        )
        base_q = _as_vec(data["base_q"], ctx)
        samples = tuple(
            Vec(row) for row in _as_rows(data.get("samples", ()), ctx)
        )
        t = TransitionData(
            base_map=BaseMap(base_p, base_q),
            alpha0=_as_poly_vec(data["alpha0"], m, ctx),
            alpha=_as_poly_mat(data["alpha"], m, ctx),
            beta0=_as_poly_vec(data["beta0"], m, ctx),
            beta=_as_poly_mat(data["beta"], m, ctx),
            gamma00=_as_poly_vec(data["gamma00"], m, ctx),
            gamma_y=_as_poly_mat(data["gamma_y"], m, ctx),
            gamma_z=_as_poly_mat(data["gamma_z"], m, ctx),
            gamma_yz=_as_poly_bilinear(data["gamma_yz"], m, ctx),
            sigma=_as_poly_mat(data["sigma"], m, ctx),
            samples=samples,
        )
        edges.append((src, dst, t))
    return Atlas(m, (n1, n2, n3), charts, tuple(edges))


_ELABORATORS = {
    "space": _elaborate_space,
    "double": _elaborate_double,
    "atlas": _elaborate_atlas,
    "special_bundle": _elaborate_special_bundle,
    "graded": _elaborate_graded,
}


def elaborate(doc: Document) -> Dict[str, object]:
    """Build the computational object described by every block."""
    return {b.name: _ELABORATORS[b.kind](b) for b in doc.blocks}
