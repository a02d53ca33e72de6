"""Weighted differential monomials, canonical term lists and the row codecs.

A term stands for

    c * lam^a * s^b * gamma^g * (prod of weight factors) * w_{t^i x^j} * w_{x^k}

optionally wrapped in a total t- or x-derivative (the divergence flags).
Unary terms (a single derivative of w, as produced by operator conjugation)
have ``second=None``.
"""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple, Sequence


class Schema(enum.Enum):
    POLY = "poly"
    EXP = "exp"


class SchemaError(ValueError):
    pass


class RowParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        self.message = message
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


class Deriv(NamedTuple):
    t: int
    x: int


_PHI_RE = re.compile(r"^phi([1-9][0-9]*)$")
EXP_BASE_SYMBOLS = ("vphi", "vphi_t", "vphi_tt")


def phi(k: int) -> str:
    """Symbol id of the k-th x-derivative of the spatial function phi."""
    if k < 1:
        raise SchemaError(f"phi derivative order must be >= 1, got {k}")
    return f"phi{k}"


def phi_order(symbol: str) -> int | None:
    m = _PHI_RE.match(symbol)
    return int(m.group(1)) if m else None


def symbol_rank(symbol: str) -> tuple[int, int]:
    if symbol == "mu":
        return (0, 0)
    k = phi_order(symbol)
    if k is not None:
        return (1, k)
    if symbol in EXP_BASE_SYMBOLS:
        return (2, EXP_BASE_SYMBOLS.index(symbol))
    raise SchemaError(f"unknown weight symbol {symbol!r}")


def check_symbol(symbol: str, schema: Schema) -> None:
    if schema is Schema.POLY:
        ok = symbol == "mu"
    else:
        ok = phi_order(symbol) is not None or symbol in EXP_BASE_SYMBOLS
    if not ok:
        raise SchemaError(f"symbol {symbol!r} does not belong to schema {schema.value}")


Factors = tuple[tuple[str, int], ...]


def normalize_factors(factors: Mapping[str, int] | Iterable[tuple[str, int]]) -> Factors:
    items = factors.items() if isinstance(factors, Mapping) else factors
    acc: dict[str, int] = {}
    for sym, e in items:
        if not isinstance(e, int) or isinstance(e, bool):
            raise SchemaError(f"exponent of {sym!r} must be an integer")
        acc[sym] = acc.get(sym, 0) + e
    for sym, e in acc.items():
        if e < 0:
            raise SchemaError(f"negative exponent {e} on {sym!r}")
    return tuple(sorted(((s, e) for s, e in acc.items() if e), key=lambda p: symbol_rank(p[0])))


def mul_factors(a: Factors, b: Factors) -> Factors:
    return normalize_factors(list(a) + list(b))


def _canonical_pair(first: Deriv, second: Deriv | None) -> tuple[Deriv, Deriv | None]:
    if second is None:
        return first, None
    # t-derivative slot first; among equal t-orders the lower x-order first
    if (second.t, -second.x) > (first.t, -first.x):
        return second, first
    return first, second


@dataclass(frozen=True)
class Term:
    coeff: Fraction
    lam: int = 0
    s: int = 0
    gamma: int = 0
    factors: Factors = ()
    first: Deriv = Deriv(0, 0)
    second: Deriv | None = Deriv(0, 0)
    dt: int = 0
    dx: int = 0
    schema: Schema = Schema.POLY

    def __post_init__(self):
        set_ = object.__setattr__
        set_(self, "coeff", Fraction(self.coeff))
        set_(self, "first", Deriv(*self.first))
        if self.second is not None:
            set_(self, "second", Deriv(*self.second))
        set_(self, "factors", normalize_factors(self.factors))
        for name in ("lam", "s", "gamma", "dt", "dx"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 0:
                raise SchemaError(f"{name} must be a nonnegative integer, got {v!r}")
        for d in (self.first, self.second):
            if d is not None and (d.t < 0 or d.x < 0):
                raise SchemaError(f"negative derivative order in {d}")
        if self.dt > 1 or self.dx > 1:
            raise SchemaError("divergence flags must be 0 or 1")
        for sym, _ in self.factors:
            check_symbol(sym, self.schema)
        if self.schema is Schema.POLY and self.s:
            raise SchemaError("poly-schema terms carry no s exponent")
        first, second = _canonical_pair(self.first, self.second)
        set_(self, "first", first)
        set_(self, "second", second)

    @property
    def key(self) -> tuple:
        return (self.lam, self.s, self.gamma, self.factors, self.first, self.second, self.dt, self.dx)

    @property
    def unary(self) -> bool:
        return self.second is None

    @property
    def flagged(self) -> bool:
        return bool(self.dt or self.dx)

    def exponent(self, symbol: str) -> int:
        return dict(self.factors).get(symbol, 0)

    def with_coeff(self, coeff) -> "Term":
        return replace(self, coeff=Fraction(coeff))


def canonicalize(term: Term) -> Term:
    """Return the canonical form of ``term``.

    Construction already canonicalizes, so this rebuilds through the
    constructor; kept as the explicit entry point for callers that assemble
    terms field by field.
    """
    return replace(term)


def order_key(term: Term) -> tuple:
    second = term.second if term.second is not None else Deriv(-1, -1)
    factor_key = tuple((symbol_rank(sym), -e) for sym, e in term.factors)
    return (
        -term.dx,
        -term.dt,
        -second.x,
        -term.first.t,
        -term.first.x,
        -term.lam,
        -term.s,
        -term.gamma,
        factor_key,
        term.coeff,
    )


def term_order(a: Term, b: Term) -> int:
    """Three-way comparison consistent with :func:`order_key`."""
    if a.schema is not b.schema:
        raise SchemaError("cannot order terms of different schemas")
    ka, kb = order_key(a), order_key(b)
    return (ka > kb) - (ka < kb)


def merge(terms: Iterable[Term]) -> list[Term]:
    """Collect like terms, drop zeros, sort canonically."""
    acc: dict[tuple, Term] = {}
    schema = None
    for t in terms:
        if schema is None:
            schema = t.schema
        elif t.schema is not schema:
            raise SchemaError("cannot merge terms of different schemas")
        prev = acc.get(t.key)
        acc[t.key] = t if prev is None else prev.with_coeff(prev.coeff + t.coeff)
    return sorted((t for t in acc.values() if t.coeff != 0), key=order_key)


def scale(terms: Iterable[Term], c) -> list[Term]:
    c = Fraction(c)
    return [t.with_coeff(t.coeff * c) for t in terms]


def subtract(a: Iterable[Term], b: Iterable[Term]) -> list[Term]:
    return merge(list(a) + scale(b, -1))


def instantiate_gamma(terms: Iterable[Term], value=1) -> list[Term]:
    """Substitute a numeric gamma (the presets use gamma = 1)."""
    value = Fraction(value)
    return merge(replace(t, gamma=0, coeff=t.coeff * value**t.gamma) for t in terms)


# ---------------------------------------------------------------------------
# row codecs

POLY_FIXED_COLUMNS = 8
EXP_FIXED_COLUMNS = 14
EXP_FIXED_SYMBOLS = ("phi1", "phi2", "phi3", "phi4", "vphi", "vphi_t")


def format_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def parse_coeff(text: str) -> Fraction:
    text = text.strip()
    if not re.fullmatch(r"[+-]?\d+(/\d+)?", text):
        raise ValueError(f"bad rational {text!r}")
    value = Fraction(text)
    return value


def _parse_nat(text: str) -> int:
    text = text.strip()
    if not re.fullmatch(r"[+-]?\d+", text):
        raise ValueError(f"non-integer field {text!r}")
    v = int(text)
    if v < 0:
        raise ValueError(f"negative exponent {v}")
    return v


def fixed_columns(schema: Schema, unary: bool = False) -> int:
    if schema is Schema.POLY:
        return 5 if unary else POLY_FIXED_COLUMNS
    return 11 if unary else EXP_FIXED_COLUMNS


def fits_fixed(term: Term) -> bool:
    if term.gamma:
        return False
    if term.second is not None and term.second.t != 0:
        return False
    if term.unary and term.flagged:
        return False
    if term.schema is Schema.EXP:
        return all(sym in EXP_FIXED_SYMBOLS for sym, _ in term.factors)
    return True


def parse_row(line: str, schema: Schema, *, unary: bool = False, lineno: int | None = None) -> Term:
    """Parse one fixed-format row (8/14 columns; 5/11 for unary terms)."""
    fields = [f for f in line.strip().split(",")]
    want = fixed_columns(schema, unary)
    if len(fields) != want:
        raise RowParseError(f"expected {want} fields for {schema.value} rows, got {len(fields)}", lineno)
    try:
        coeff = parse_coeff(fields[0])
        nums = [_parse_nat(f) for f in fields[1:]]
    except ValueError as exc:
        raise RowParseError(str(exc), lineno) from None
    try:
        if schema is Schema.POLY:
            lam, mu, bt, bx = nums[:4]
            factors = {"mu": mu}
            s = 0
            rest = nums[4:]
        else:
            lam, s = nums[:2]
            factors = dict(zip(EXP_FIXED_SYMBOLS, nums[2:8]))
            bt, bx = nums[8:10]
            rest = nums[10:]
        if unary:
            return Term(coeff, lam, s, 0, factors, Deriv(bt, bx), None, 0, 0, schema)
        cx, dt, dx = rest
        return Term(coeff, lam, s, 0, factors, Deriv(bt, bx), Deriv(0, cx), dt, dx, schema)
    except SchemaError as exc:
        raise RowParseError(str(exc), lineno) from None


def emit_row(term: Term) -> str:
    if not fits_fixed(term):
        raise SchemaError("term needs the sparse format (symbol or shape outside the fixed columns)")
    cols = [format_coeff(term.coeff), str(term.lam)]
    if term.schema is Schema.POLY:
        cols.append(str(term.exponent("mu")))
    else:
        cols.append(str(term.s))
        cols.extend(str(term.exponent(sym)) for sym in EXP_FIXED_SYMBOLS)
    cols += [str(term.first.t), str(term.first.x)]
    if not term.unary:
        cols += [str(term.second.x), str(term.dt), str(term.dx)]
    return ",".join(cols)


_SPARSE_PAIR = re.compile(r"\((\d+),(\d+)\)")


def emit_sparse(term: Term) -> str:
    scal = f"lam^{term.lam} s^{term.s} gamma^{term.gamma}"
    facs = " ".join(f"{sym}^{e}" for sym, e in term.factors)
    pair = f"({term.first.t},{term.first.x})"
    if term.second is not None:
        pair += f"({term.second.t},{term.second.x})"
    return f"{format_coeff(term.coeff)}; {scal}; {facs}; {pair}; ({term.dt},{term.dx})"


def parse_sparse(line: str, schema: Schema, *, lineno: int | None = None) -> Term:
    parts = [p.strip() for p in line.split(";")]
    if len(parts) != 5:
        raise RowParseError(f"sparse rows have 5 ';'-separated fields, got {len(parts)}", lineno)
    try:
        coeff = parse_coeff(parts[0])
        scal = {"lam": 0, "s": 0, "gamma": 0}
        for tok in parts[1].split():
            name, _, e = tok.partition("^")
            if name not in scal:
                raise ValueError(f"unknown scalar {name!r}")
            scal[name] = _parse_nat(e)
        factors = []
        for tok in parts[2].split():
            name, _, e = tok.partition("^")
            factors.append((name, _parse_nat(e)))
        pairs = [Deriv(int(a), int(b)) for a, b in _SPARSE_PAIR.findall(parts[3])]
        if len(pairs) not in (1, 2) or _SPARSE_PAIR.sub("", parts[3]).strip():
            raise ValueError(f"bad derivative field {parts[3]!r}")
        flags = _SPARSE_PAIR.findall(parts[4])
        if len(flags) != 1:
            raise ValueError(f"bad flag field {parts[4]!r}")
        dt, dx = (int(v) for v in flags[0])
        second = pairs[1] if len(pairs) == 2 else None
        return Term(coeff, scal["lam"], scal["s"], scal["gamma"], factors, pairs[0], second, dt, dx, schema)
    except (ValueError, SchemaError) as exc:
        raise RowParseError(str(exc), lineno) from None


# ---------------------------------------------------------------------------
# files: "# schema=poly|exp format=fixed|sparse [arity=1|2]" header, one row per line

@dataclass
class TermFile:
    schema: Schema
    terms: list[Term]
    fmt: str = "fixed"
    unary: bool = False
    comments: list[str] = field(default_factory=list)


_HEADER = re.compile(r"^#\s*(.*)$")


def parse_header(line: str) -> dict[str, str]:
    m = _HEADER.match(line.strip())
    if not m:
        raise RowParseError("missing '# schema=... format=...' header", 1)
    opts = dict(tok.split("=", 1) for tok in m.group(1).split() if "=" in tok)
    if "schema" not in opts:
        raise RowParseError("header lacks schema=", 1)
    return opts


def read_terms(text: str) -> TermFile:
    lines = text.splitlines()
    if not lines:
        raise RowParseError("empty file", 1)
    opts = parse_header(lines[0])
    try:
        schema = Schema(opts["schema"])
    except ValueError:
        raise RowParseError(f"unknown schema {opts['schema']!r}", 1) from None
    fmt = opts.get("format", "fixed")
    if fmt not in ("fixed", "sparse"):
        raise RowParseError(f"unknown format {fmt!r}", 1)
    unary = opts.get("arity", "2") == "1"
    out = TermFile(schema, [], fmt, unary)
    for n, line in enumerate(lines[1:], start=2):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            out.comments.append(stripped)
            continue
        if fmt == "fixed":
            out.terms.append(parse_row(stripped, schema, unary=unary, lineno=n))
        else:
            term = parse_sparse(stripped, schema, lineno=n)
            if term.unary != unary:
                raise RowParseError("row arity does not match header", n)
            out.terms.append(term)
    return out


def write_terms(terms: Sequence[Term], schema: Schema, fmt: str | None = None) -> str:
    unary = bool(terms) and all(t.unary for t in terms)
    if any(t.unary != unary for t in terms):
        raise SchemaError("cannot write unary and bilinear terms to one file")
    if fmt is None:
        fmt = "fixed" if all(fits_fixed(t) for t in terms) else "sparse"
    header = f"# schema={schema.value} format={fmt}" + (" arity=1" if unary else "")
    emit = emit_row if fmt == "fixed" else emit_sparse
    return "\n".join([header, *(emit(t) for t in terms)]) + "\n"
