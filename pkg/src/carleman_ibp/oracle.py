"""Ground truth for decompositions.

Two unlike checks.  The formal one expands every divergence flag by the
product rule and compares merged lists exactly.  The numeric one rebuilds
each row as a sympy expression from closed forms (mu = 2(x - x0),
vphi = e^{s phi(x)}/(t(T - t))) and evaluates both sides at sample points.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath
import sympy as sp

from .terms import Deriv, Schema, Term, merge, phi_order, subtract
from .weights import Direction, Scalars, WeightModel, diff_factor_product, model_for


def expand_divergence(term: Term, model: WeightModel | None = None) -> list[Term]:
    if term.dt and term.dx:
        raise ValueError("a row carries at most one divergence flag")
    if not term.flagged:
        return [term]
    model = model or model_for(term.schema)
    direction = Direction.T if term.dt else Direction.X
    step = Deriv(1, 0) if term.dt else Deriv(0, 1)

    def bump(d: Deriv) -> Deriv:
        return Deriv(d.t + step.t, d.x + step.x)

    out = []
    for m in diff_factor_product(term.factors, Scalars(term.lam, term.s, term.gamma), direction, model):
        out.append(
            Term(term.coeff * m.coeff, m.scalars.lam, m.scalars.s, m.scalars.gamma, m.factors,
                 term.first, term.second, 0, 0, term.schema)
        )
    base = dict(lam=term.lam, s=term.s, gamma=term.gamma, factors=term.factors, schema=term.schema)
    if term.second is None:
        out.append(Term(term.coeff, first=bump(term.first), second=None, **base))
    else:
        out.append(Term(term.coeff, first=bump(term.first), second=term.second, **base))
        out.append(Term(term.coeff, first=term.first, second=bump(term.second), **base))
    return merge(out)


def expand_all(terms: Iterable[Term], model: WeightModel | None = None) -> list[Term]:
    return merge(r for t in terms for r in expand_divergence(t, model))


@dataclass
class VerifyResult:
    ok: bool
    diff: list[Term] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


def verify_identity(input: Sequence[Term], output: Sequence[Term], model: WeightModel | None = None) -> VerifyResult:
    """``output - input`` after expanding all divergence flags; ok iff zero."""
    diff = subtract(expand_all(output, model), expand_all(input, model))
    return VerifyResult(not diff, diff)


# ---------------------------------------------------------------------------
# numeric evaluation

t_sym, x_sym = sp.symbols("t x", real=True)


class SingularityError(ValueError):
    pass


def _rational(v) -> sp.Rational:
    v = Fraction(v)
    return sp.Rational(v.numerator, v.denominator)


@dataclass
class NumericConfig:
    x0: Fraction = Fraction(3, 2)
    t0: Fraction = Fraction(1, 2)
    beta: Fraction = Fraction(1)
    T: Fraction = Fraction(1)
    L: Fraction = Fraction(1)
    s: Fraction = Fraction(3, 2)
    lam: Fraction = Fraction(2)
    gamma: Fraction = Fraction(1)
    # w(t, x) as {(i, j): coeff} meaning coeff * t^i x^j
    w: dict = field(default_factory=lambda: {
        (0, 0): Fraction(1), (0, 1): Fraction(-2), (0, 3): Fraction(1, 3), (1, 2): Fraction(3),
        (0, 5): Fraction(1, 7), (2, 4): Fraction(-1, 5), (1, 6): Fraction(2, 9), (3, 1): Fraction(1, 2),
        (2, 7): Fraction(1, 11),
    })
    # phi(x) as {j: coeff}; default x(1 - x)(1 + x/3): positive on (0, 1), zero at both ends
    phi: dict = field(default_factory=lambda: {1: Fraction(1), 2: Fraction(-2, 3), 3: Fraction(-1, 3)})
    points: list = field(default_factory=list)

    def __post_init__(self):
        if self.x0 <= self.L:
            raise ValueError("x0 must exceed L")

    def w_expr(self) -> sp.Expr:
        return sum((_rational(c) * t_sym**i * x_sym**j for (i, j), c in self.w.items()), sp.Integer(0))

    def phi_expr(self) -> sp.Expr:
        return sum((_rational(c) * x_sym**j for j, c in self.phi.items()), sp.Integer(0))


def _symbol_expr(symbol: str, cfg: NumericConfig) -> sp.Expr:
    if symbol == "mu":
        return 2 * (x_sym - _rational(cfg.x0))
    k = phi_order(symbol)
    if k is not None:
        return sp.diff(cfg.phi_expr(), x_sym, k)
    vphi = sp.exp(_rational(cfg.s) * cfg.phi_expr()) / (t_sym * (_rational(cfg.T) - t_sym))
    n = {"vphi": 0, "vphi_t": 1, "vphi_tt": 2}[symbol]
    return sp.diff(vphi, t_sym, n)


def term_expr(term: Term, cfg: NumericConfig) -> sp.Expr:
    w = cfg.w_expr()

    def d(slot: Deriv) -> sp.Expr:
        e = w
        if slot.t:
            e = sp.diff(e, t_sym, slot.t)
        if slot.x:
            e = sp.diff(e, x_sym, slot.x)
        return e

    expr = _rational(term.coeff) * _rational(cfg.lam) ** term.lam * _rational(cfg.gamma) ** term.gamma
    if term.schema is Schema.EXP:
        expr *= _rational(cfg.s) ** term.s
    for sym, e in term.factors:
        expr *= _symbol_expr(sym, cfg) ** e
    expr *= d(term.first)
    if term.second is not None:
        expr *= d(term.second)
    if term.dt:
        expr = sp.diff(expr, t_sym)
    if term.dx:
        expr = sp.diff(expr, x_sym)
    return expr


def list_expr(terms: Iterable[Term], cfg: NumericConfig) -> sp.Expr:
    return sum((term_expr(t, cfg) for t in terms), sp.Integer(0))


def numeric_eval(terms: Sequence[Term], cfg: NumericConfig, model: WeightModel | None = None,
                 points: Sequence[tuple] | None = None, dps: int = 40) -> list:
    """Value of the summed list at each sample point.

    Poly lists evaluate to exact sympy rationals; exp lists to mpmath floats
    at ``dps`` digits.
    """
    points = list(points if points is not None else cfg.points)
    expr = list_expr(terms, cfg)
    exact = all(t.schema is Schema.POLY for t in terms)
    values = []
    for t, x in points:
        t, x = Fraction(t), Fraction(x)
        if not exact and t * (cfg.T - t) == 0:
            raise SingularityError(f"weight is singular at t={t}")
        subs = {t_sym: _rational(t), x_sym: _rational(x)}
        if exact:
            values.append(sp.Rational(expr.subs(subs)))
        else:
            with mpmath.workdps(dps):
                values.append(mpmath.mpf(sp.N(expr.subs(subs), dps)))
    return values


def relative_error(a, b) -> float:
    a, b = mpmath.mpf(a), mpmath.mpf(b)
    scale = max(abs(a), abs(b))
    return 0.0 if scale == 0 else float(abs(a - b) / scale)
