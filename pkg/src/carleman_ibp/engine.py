"""Integration-by-parts rewriting of bilinear terms to a terminal fixpoint."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Sequence

from .terms import Deriv, Term, merge, order_key
from .weights import Direction, Scalars, WeightModel, WeightMonomial, diff_factor_product, model_for

HALF = Fraction(1, 2)


class ContractError(ValueError):
    pass


def is_terminal(term: Term) -> bool:
    if term.second is None:
        raise ContractError("unary terms are not rewritten; multiply them first")
    if term.coeff == 0 or term.dt or term.dx:
        return True
    return term.first.t + term.first.x == term.second.x


def gap(term: Term) -> int:
    """Termination measure: zero exactly on unflagged terminal shapes.

    ``|c_x - b_x| + b_t`` drops strictly from a non-terminal term to each of
    its non-terminal children, under every rule.
    """
    b, c = term.first, term.second
    if b.t + b.x == c.x:
        return 0
    return abs(c.x - b.x) + b.t


def _with_weight(term: Term, m: WeightMonomial, coeff: Fraction, first: Deriv, second: Deriv) -> Term:
    return Term(
        coeff * m.coeff,
        m.scalars.lam,
        m.scalars.s,
        m.scalars.gamma,
        m.factors,
        first,
        second,
        0,
        0,
        term.schema,
    )


def _weight_derivative(term: Term, direction: Direction, model: WeightModel) -> list[WeightMonomial]:
    return diff_factor_product(term.factors, Scalars(term.lam, term.s, term.gamma), direction, model)


def rewrite_step(term: Term, model: WeightModel | None = None) -> list[Term]:
    """Apply the one integration-by-parts rule that matches ``term``.

    The outputs sum, once their divergence flags are expanded, to ``term``.
    """
    if is_terminal(term):
        raise ContractError(f"rewrite_step called on a terminal term: {term}")
    model = model or model_for(term.schema)
    if model.schema is not term.schema:
        raise ContractError("weight model and term schema differ")
    a = term.coeff
    b, c = term.first, term.second
    if b.t > 1:
        raise ContractError("first slot t-order above 1 is not supported")
    if c.t:
        raise ContractError("only one slot may carry a t-derivative")
    out: list[Term] = []

    if b.x == c.x:
        # b_t == 1: W w_{t x^k} w_{x^k} = 1/2 (W w_{x^k}^2)_t - 1/2 W_t w_{x^k}^2
        pair = (Deriv(0, b.x), c)
        out.append(replace(term, coeff=a * HALF, first=pair[0], second=pair[1], dt=1))
        for m in _weight_derivative(term, Direction.T, model):
            out.append(_with_weight(term, m, -a * HALF, *pair))
    elif b.t == 0 and c.x == b.x + 1:
        # W f f_x = 1/2 (W f^2)_x - 1/2 W_x f^2
        pair = (b, Deriv(0, b.x))
        out.append(replace(term, coeff=a * HALF, first=pair[0], second=pair[1], dx=1))
        for m in _weight_derivative(term, Direction.X, model):
            out.append(_with_weight(term, m, -a * HALF, *pair))
    elif c.x > b.x:
        # W f g_x = (W f g)_x - W f_x g - W_x f g, reducing the second slot
        reduced = (b, Deriv(0, c.x - 1))
        out.append(replace(term, first=reduced[0], second=reduced[1], dx=1))
        out.append(replace(term, coeff=-a, first=Deriv(b.t, b.x + 1), second=reduced[1]))
        for m in _weight_derivative(term, Direction.X, model):
            out.append(_with_weight(term, m, -a, *reduced))
    else:
        # first slot carries the higher x-order
        reduced = (Deriv(b.t, b.x - 1), c)
        if b.t == 0 and b.x - 1 == c.x:
            out.append(replace(term, coeff=a * HALF, first=reduced[0], second=reduced[1], dx=1))
            for m in _weight_derivative(term, Direction.X, model):
                out.append(_with_weight(term, m, -a * HALF, *reduced))
        else:
            out.append(replace(term, first=reduced[0], second=reduced[1], dx=1))
            out.append(replace(term, coeff=-a, first=reduced[0], second=Deriv(0, c.x + 1)))
            for m in _weight_derivative(term, Direction.X, model):
                out.append(_with_weight(term, m, -a, *reduced))
    return merge(out)


@dataclass
class Trace:
    """Per-loop snapshots of the unmerged working list."""

    snapshots: list[list[Term]] = field(default_factory=list)

    def record(self, rows: Sequence[Term]) -> None:
        self.snapshots.append(sorted(rows, key=order_key))


def reduce_rows(terms: Iterable[Term], model: WeightModel | None = None, trace: Trace | None = None) -> list[Term]:
    """Breadth-first loops until every row is terminal; rows stay unmerged."""
    rows = list(terms)
    if rows and model is None:
        model = model_for(rows[0].schema)
    if trace is not None:
        trace.record(rows)
    while True:
        nxt: list[Term] = []
        changed = False
        for t in rows:
            if is_terminal(t):
                nxt.append(t)
            else:
                nxt.extend(rewrite_step(t, model))
                changed = True
        if not changed:
            return rows
        rows = nxt
        if trace is not None:
            trace.record(rows)


def reduce(terms: Iterable[Term], model: WeightModel | None = None, trace: Trace | None = None) -> list[Term]:
    """Rewrite every term to terminal form; merged, canonically ordered."""
    return merge(reduce_rows(merge(terms), model, trace))
