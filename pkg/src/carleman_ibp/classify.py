"""Grouping of terminal rows, leading-order extraction, signs and rendering."""
from __future__ import annotations

import enum
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .conjugation import strip_derivatives
from .engine import ContractError, is_terminal
from .terms import (
    Deriv,
    RowParseError,
    Schema,
    Term,
    emit_row,
    emit_sparse,
    fits_fixed,
    format_coeff,
    merge,
    parse_header,
    parse_row,
    parse_sparse,
    phi_order,
)
from .weights import WeightMonomial


class BoundaryCondition(enum.Enum):
    NONE = "none"
    CLAMPED = "clamped"  # v = v_x = 0
    HINGED = "hinged"  # v = v_xx = 0
    COMPACT = "compact"  # v vanishes near the whole lateral boundary


_VANISHING = {
    BoundaryCondition.NONE: frozenset(),
    BoundaryCondition.CLAMPED: frozenset({0, 1}),
    BoundaryCondition.HINGED: frozenset({0, 2}),
}


def grade(term: Term) -> int:
    return term.lam + term.s


def shape(term: Term) -> tuple[int, int]:
    """x-orders of the two slots, lower first."""
    a, b = term.first.x, term.second.x
    return (a, b) if a <= b else (b, a)


@dataclass
class Graded:
    leading: list[Term]
    subleading: list[Term]
    rest: list[Term]


def leading(group: Sequence[Term]) -> Graded:
    """Split rows by total degree in the large parameters lam and s."""
    grades = sorted({grade(t) for t in group}, reverse=True)
    top = grades[0] if grades else None
    nxt = grades[1] if len(grades) > 1 else None
    return Graded(
        merge(t for t in group if grade(t) == top),
        merge(t for t in group if grade(t) == nxt),
        merge(t for t in group if grade(t) not in (top, nxt)),
    )


class Sign(enum.Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    INDEFINITE = "indefinite"


@dataclass
class SignContext:
    signs: dict[str, Sign] = field(default_factory=dict)
    # mu = 2(x - x0) < 0 on (0, L) since x0 > L; vphi = e^{s phi}/(t(T-t)) > 0
    defaults = {"mu": Sign.NEGATIVE, "vphi": Sign.POSITIVE, "lam": Sign.POSITIVE, "s": Sign.POSITIVE}

    def sign_of(self, symbol: str) -> Sign:
        if symbol in self.signs:
            return self.signs[symbol]
        return self.defaults.get(symbol, Sign.INDEFINITE)


def sign_verdict(term: Term, ctx: SignContext | None = None) -> Sign:
    """Sign of a diagonal row's weight, the square itself being nonnegative."""
    ctx = ctx or SignContext()
    negative = term.coeff < 0
    powers = [("lam", term.lam), ("s", term.s), ("gamma", term.gamma), *term.factors]
    for sym, e in powers:
        if e % 2 == 0:
            continue
        sign = ctx.sign_of(sym)
        if sign is Sign.INDEFINITE:
            return Sign.INDEFINITE
        if sign is Sign.NEGATIVE:
            negative = not negative
    return Sign.NEGATIVE if negative else Sign.POSITIVE


def sign_report(rows: Iterable[Term], ctx: SignContext | None = None) -> list[tuple[Term, Sign]]:
    return [(t, sign_verdict(t, ctx)) for t in rows]


@dataclass
class Report:
    schema: Schema
    time_boundary: list[Term] = field(default_factory=list)
    space_boundary: list[Term] = field(default_factory=list)
    energy: dict[int, list[Term]] = field(default_factory=dict)
    cross: list[Term] = field(default_factory=list)
    other: list[Term] = field(default_factory=list)
    audit: list[Term] = field(default_factory=list)
    leading: dict[int, list[Term]] = field(default_factory=dict)
    subleading: dict[int, list[Term]] = field(default_factory=dict)
    boundary_leading: dict[tuple[int, int], list[Term]] = field(default_factory=dict)
    boundary_subleading: dict[tuple[int, int], list[Term]] = field(default_factory=dict)
    sign_verdicts: dict[int, list[tuple[Term, Sign]]] = field(default_factory=dict)

    def groups(self) -> list[tuple[str, list[Term]]]:
        out = [("time-boundary", self.time_boundary), ("space-boundary", self.space_boundary)]
        out += [(f"energy k={k}", self.energy[k]) for k in sorted(self.energy, reverse=True)]
        out += [("cross", self.cross), ("other", self.other), ("audit", self.audit)]
        return out

    def all_rows(self) -> list[Term]:
        return [t for _, rows in self.groups() for t in rows]


def classify(
    rows: Iterable[Term],
    bc: BoundaryCondition = BoundaryCondition.NONE,
    drop_time_boundary: bool = False,
    ctx: SignContext | None = None,
) -> Report:
    rows = merge(rows)
    schema = rows[0].schema if rows else Schema.POLY
    rep = Report(schema)
    energy: dict[int, list[Term]] = defaultdict(list)
    vanishing = _VANISHING.get(bc, frozenset())
    for t in rows:
        if t.unary or not is_terminal(t):
            raise ContractError(f"classify needs terminal bilinear rows, got {t}")
        if t.dt:
            (rep.audit if drop_time_boundary else rep.time_boundary).append(t)
        elif t.dx:
            if bc is BoundaryCondition.COMPACT or {t.first.x, t.second.x} & vanishing:
                rep.audit.append(t)
            else:
                rep.space_boundary.append(t)
        elif t.first.t == 0 and t.first.x == t.second.x:
            energy[t.first.x].append(t)
        elif t.first.t == 1 and t.second.x == t.first.x + 1:
            rep.cross.append(t)
        else:
            rep.other.append(t)
    rep.energy = {k: energy[k] for k in sorted(energy, reverse=True)}
    for k, group in rep.energy.items():
        g = leading(group)
        rep.leading[k] = g.leading
        rep.subleading[k] = g.subleading
        rep.sign_verdicts[k] = sign_report(g.leading, ctx)
    by_shape: dict[tuple[int, int], list[Term]] = defaultdict(list)
    for t in rep.space_boundary:
        by_shape[shape(t)].append(t)
    for sh in sorted(by_shape, reverse=True):
        g = leading(by_shape[sh])
        rep.boundary_leading[sh] = g.leading
        rep.boundary_subleading[sh] = g.subleading
    return rep


class CrossShapeError(ValueError):
    pass


def cross_summary(cross: Iterable[Term]) -> tuple[list[WeightMonomial], list[Term]]:
    """Aggregate the weights multiplying u_t u_x.

    Returns the merged weight list and any cross rows of another shape
    (those are reported, never folded in).
    """
    main, odd = [], []
    for t in cross:
        if t.first == Deriv(1, 0) and t.second == Deriv(0, 1):
            main.append(t)
        else:
            odd.append(t)
    return strip_derivatives(main), odd


# ---------------------------------------------------------------------------
# rendering

def _latex_symbol(symbol: str) -> str:
    if symbol == "mu":
        return r"\mu"
    k = phi_order(symbol)
    if k is not None:
        return r"\phi_{" + "x" * k + "}" if k <= 4 else rf"\phi^{{({k})}}"
    return {"vphi": r"\varphi", "vphi_t": r"\varphi_{t}", "vphi_tt": r"\varphi_{tt}"}[symbol]


def _pow(base: str, e: int) -> str:
    return base if e == 1 else f"{base}^{{{e}}}"


def _deriv(var: str, d: Deriv) -> str:
    sub = "t" * d.t + "x" * d.x
    return f"{var}_{{{sub}}}" if sub else var


def _latex_coeff(c: Fraction) -> str:
    sign = "-" if c < 0 else ""
    c = abs(c)
    if c == 1:
        return sign
    if c.denominator == 1:
        return f"{sign}{c.numerator}"
    return rf"{sign}\frac{{{c.numerator}}}{{{c.denominator}}}"


def term_latex(term: Term) -> str:
    var = "w" if term.schema is Schema.POLY else "u"
    weight = []
    for name, e in (("lam", term.lam), ("s", term.s), ("gamma", term.gamma)):
        if e:
            weight.append(_pow({"lam": r"\lambda", "s": "s", "gamma": r"\gamma"}[name], e))
    weight += [_pow(_latex_symbol(sym), e) for sym, e in term.factors]
    if term.second is None:
        fn = _deriv(var, term.first)
    elif term.first == term.second:
        fn = _deriv(var, term.first) + "^{2}"
    else:
        fn = _deriv(var, term.first) + " " + _deriv(var, term.second)
    prefix = ""
    for part in weight:
        # a bare control word such as \lambda must not run into the next letter
        if prefix and prefix[-1].isalpha() and part[0].isalpha():
            prefix += " "
        prefix += part
    body = prefix + (" " if weight else "") + fn
    coeff = _latex_coeff(term.coeff)
    if term.dt or term.dx:
        return f"{coeff}({body})_{{{'t' if term.dt else 'x'}}}"
    return f"{coeff}{body}"


def emit_latex(report: Report) -> str:
    lines = []
    for name, rows in report.groups():
        lines.append(f"% {name}")
        for i, t in enumerate(rows):
            s = term_latex(t)
            lines.append(s if i == 0 or s.startswith("-") else "+" + s)
    return "\n".join(lines) + "\n"


def _emit_any(t: Term) -> str:
    return emit_row(t) if fits_fixed(t) else emit_sparse(t)


def emit_table(report: Report) -> str:
    fmt = "fixed" if all(fits_fixed(t) for t in report.all_rows()) else "sparse"
    lines = [f"# schema={report.schema.value} format={fmt}"]
    for name, rows in report.groups():
        lines.append(f"## {name}")
        lines.extend(emit_row(t) if fmt == "fixed" else emit_sparse(t) for t in rows)
    return "\n".join(lines) + "\n"


def parse_table(text: str) -> dict[str, list[Term]]:
    """Inverse of :func:`emit_table`: section name -> rows."""
    lines = text.splitlines()
    opts = parse_header(lines[0])
    schema = Schema(opts["schema"])
    fmt = opts.get("format", "fixed")
    out: dict[str, list[Term]] = {}
    current = None
    for n, line in enumerate(lines[1:], start=2):
        line = line.strip()
        if not line:
            continue
        if line.startswith("##"):
            current = line[2:].strip()
            out[current] = []
            continue
        if line.startswith("#"):
            continue
        if current is None:
            raise RowParseError("row outside any '## section'", n)
        row = parse_row(line, schema, lineno=n) if fmt == "fixed" else parse_sparse(line, schema, lineno=n)
        out[current].append(row)
    return out
