"""Conjugated operator expansions and the multiplier groups built from them."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .terms import Deriv, Schema, SchemaError, Term, merge, mul_factors
from .weights import Direction, Scalars, WeightModel, WeightMonomial, diff_factor_product, merge_monomials, mono


class Order(enum.Enum):
    SECOND = "second"
    FOURTH = "fourth"


@dataclass(frozen=True)
class OperatorSpec:
    order: Order
    gamma_present: bool = True

    def __post_init__(self):
        if self.order is Order.SECOND and self.gamma_present:
            object.__setattr__(self, "gamma_present", False)


SECOND = OperatorSpec(Order.SECOND, False)
FOURTH = OperatorSpec(Order.FOURTH, True)


class GroupingError(ValueError):
    pass


# l_x for l = lam*psi (poly) or l = lam*rho (exp)
def ell_x(model: WeightModel) -> WeightMonomial:
    if model.schema is Schema.POLY:
        return mono(1, lam=1, mu=1)
    return mono(1, lam=1, s=1, phi1=1, vphi=1)


def _unary(m: WeightMonomial, d: Deriv, schema: Schema) -> Term:
    return Term(m.coeff, m.scalars.lam, m.scalars.s, m.scalars.gamma, m.factors, d, None, 0, 0, schema)


def dx_unary(terms: Iterable[Term], model: WeightModel) -> list[Term]:
    """x-derivative of a sum of unary terms."""
    out = []
    for t in terms:
        out.append(Term(t.coeff, t.lam, t.s, t.gamma, t.factors, Deriv(t.first.t, t.first.x + 1), None, 0, 0, t.schema))
        for m in diff_factor_product(t.factors, Scalars(t.lam, t.s, t.gamma), Direction.X, model):
            out.append(_unary(m._replace(coeff=m.coeff * t.coeff), t.first, t.schema))
    return merge(out)


def times_weight(terms: Iterable[Term], m: WeightMonomial) -> list[Term]:
    return merge(
        Term(
            t.coeff * m.coeff,
            t.lam + m.scalars.lam,
            t.s + m.scalars.s,
            t.gamma + m.scalars.gamma,
            mul_factors(t.factors, m.factors),
            t.first,
            None,
            0,
            0,
            t.schema,
        )
        for t in terms
    )


def conjugated_dx(terms: Iterable[Term], model: WeightModel) -> list[Term]:
    """theta * d/dx (theta^{-1} f) = f_x - l_x f."""
    terms = list(terms)
    lx = ell_x(model)
    return merge(dx_unary(terms, model) + times_weight(terms, lx._replace(coeff=-lx.coeff)))


@dataclass(frozen=True)
class Expansion:
    terms: tuple[Term, ...]
    omitted: tuple[str, ...] = ()


OMIT_ELL_T = "-gamma*l_t*w"
OMIT_RHO_XXXX = "-lam*rho_xxxx*u"


def conjugate(op: OperatorSpec, model: WeightModel) -> Expansion:
    """Expand theta*(gamma d_t + d_x^4)(theta^{-1} w) (or theta*d_x^2 theta^{-1}).

    Zeroth-order pieces carrying l_t or rho_xxxx have no encoding and are
    reported in ``omitted`` instead of being returned as terms.
    """
    w = [Term(1, 0, 0, 0, (), Deriv(0, 0), None, 0, 0, model.schema)]
    steps = 2 if op.order is Order.SECOND else 4
    acc = w
    for _ in range(steps):
        acc = conjugated_dx(acc, model)
    omitted: list[str] = []
    if op.order is Order.FOURTH and model.schema is Schema.EXP:
        # the lam^1 coefficient of u is exactly -l_xxxx = -lam rho_xxxx
        acc = [t for t in acc if not (t.first == Deriv(0, 0) and t.lam == 1)]
        omitted.append(OMIT_RHO_XXXX)
    if op.gamma_present:
        acc = merge(acc + [Term(1, 0, 0, 1, (), Deriv(1, 0), None, 0, 0, model.schema)])
        omitted.append(OMIT_ELL_T)
    return Expansion(tuple(acc), tuple(omitted))


# routing by (t-order, x-order, lam-degree) of each expansion term
_FOURTH_GROUPS = {
    (1, 0, 0): 1,
    (0, 3, 1): 1,
    (0, 1, 3): 1,
    (0, 0, 3): 1,
    (0, 4, 0): 2,
    (0, 2, 2): 2,
    (0, 0, 4): 2,
    (0, 0, 2): 2,
    (0, 2, 1): 3,
    (0, 1, 2): 3,
    (0, 1, 1): 3,
}
_SECOND_GROUPS = {
    (0, 1, 1): 1,
    (0, 2, 0): 2,
    (0, 0, 2): 2,
    (0, 0, 1): 2,
}


@dataclass(frozen=True)
class MultiplierSplit:
    I1: tuple[Term, ...]
    I2: tuple[Term, ...]
    I3: tuple[Term, ...] = ()
    I4: tuple[Term, ...] = ()
    omitted: tuple[str, ...] = field(default=())

    def group(self, k: int) -> tuple[Term, ...]:
        return (self.I1, self.I2, self.I3, self.I4)[k - 1]


def split_multiplier(expansion: Expansion, op: OperatorSpec = FOURTH) -> MultiplierSplit:
    table = _FOURTH_GROUPS if op.order is Order.FOURTH else _SECOND_GROUPS
    groups: dict[int, list[Term]] = {1: [], 2: [], 3: [], 4: []}
    for t in expansion.terms:
        k = table.get((t.first.t, t.first.x, t.lam))
        if k is None:
            raise GroupingError(f"expansion term matches no multiplier group: {t}")
        groups[k].append(t)
    return MultiplierSplit(*(tuple(merge(groups[k])) for k in (1, 2, 3, 4)), omitted=expansion.omitted)


def multiply(left: Sequence[Term], right: Sequence[Term], *, cross_only: bool = False) -> list[Term]:
    """Bilinear product of two unary lists.

    With ``cross_only`` a term is never paired with an identical copy of
    itself (the diagonal of a square).
    """
    out = []
    for a in left:
        for b in right:
            if not (a.unary and b.unary):
                raise SchemaError("multiply takes unary terms only")
            if a.schema is not b.schema:
                raise SchemaError("cannot multiply terms of different schemas")
            if cross_only and a == b:
                continue
            out.append(
                Term(
                    a.coeff * b.coeff,
                    a.lam + b.lam,
                    a.s + b.s,
                    a.gamma + b.gamma,
                    mul_factors(a.factors, b.factors),
                    a.first,
                    b.first,
                    0,
                    0,
                    a.schema,
                )
            )
    return merge(out)


def weight_times_unary(weights: Iterable[WeightMonomial], d: Deriv, schema: Schema) -> list[Term]:
    """Attach one derivative of w to each weight monomial (e.g. B * u_x)."""
    return merge(_unary(m, d, schema) for m in weights)


def strip_derivatives(terms: Iterable[Term]) -> list[WeightMonomial]:
    return merge_monomials(WeightMonomial(Fraction(t.coeff), Scalars(t.lam, t.s, t.gamma), t.factors) for t in terms)
