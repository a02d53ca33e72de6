"""Weight-function symbol tables and their differentiation rules.

Two models exist.  ``poly-psi`` has the single symbol ``mu = 2(x - x0)``
(mu_x = 2, mu_t = 0).  ``exp-rho`` has the derivatives ``phi1, phi2, ...``
of the spatial function, the singular weight ``vphi = e^{s phi}/(t(T-t))``
and its time derivatives ``vphi_t``, ``vphi_tt``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple

from .terms import (
    EXP_BASE_SYMBOLS,
    Factors,
    Schema,
    SchemaError,
    check_symbol,
    mul_factors,
    normalize_factors,
    phi,
    phi_order,
    symbol_rank,
)


class Direction(enum.Enum):
    T = "t"
    X = "x"


class UnsupportedSymbolError(SchemaError):
    pass


class Scalars(NamedTuple):
    lam: int = 0
    s: int = 0
    gamma: int = 0

    def __add__(self, other):  # type: ignore[override]
        return Scalars(self.lam + other[0], self.s + other[1], self.gamma + other[2])


class WeightMonomial(NamedTuple):
    """``coeff * lam^a s^b gamma^g * prod(factors)``."""

    coeff: Fraction
    scalars: Scalars
    factors: Factors

    @property
    def key(self):
        return (self.scalars, self.factors)


def merge_monomials(monos: Iterable[WeightMonomial]) -> list[WeightMonomial]:
    acc: dict = {}
    for m in monos:
        prev = acc.get(m.key)
        acc[m.key] = m if prev is None else prev._replace(coeff=prev.coeff + m.coeff)
    out = [m for m in acc.values() if m.coeff != 0]
    out.sort(key=lambda m: (tuple(-v for v in m.scalars), tuple((symbol_rank(s), -e) for s, e in m.factors)))
    return out


def mono_mul(a: WeightMonomial, b: WeightMonomial) -> WeightMonomial:
    return WeightMonomial(a.coeff * b.coeff, a.scalars + b.scalars, mul_factors(a.factors, b.factors))


def poly_mul(a: Iterable[WeightMonomial], b: Iterable[WeightMonomial]) -> list[WeightMonomial]:
    b = list(b)
    return merge_monomials(mono_mul(x, y) for x in a for y in b)


def mono(coeff=1, lam=0, s=0, gamma=0, **factors: int) -> WeightMonomial:
    return WeightMonomial(Fraction(coeff), Scalars(lam, s, gamma), normalize_factors(factors))


# a rule is a list of monomials giving the derivative of one symbol
Rule = list[WeightMonomial]


@dataclass(frozen=True)
class WeightModel:
    name: str
    schema: Schema

    def display(self, symbol: str) -> str:
        if symbol == "mu":
            return "mu"
        k = phi_order(symbol)
        if k is not None:
            return "phi_" + "x" * k if k <= 4 else f"phi^({k})"
        return {"vphi": "varphi", "vphi_t": "varphi_t", "vphi_tt": "varphi_tt"}[symbol]

    @property
    def symbols(self) -> tuple[str, ...]:
        """The base alphabet (the phi^(k) family is open-ended; four listed)."""
        if self.schema is Schema.POLY:
            return ("mu",)
        return tuple(phi(k) for k in range(1, 5)) + EXP_BASE_SYMBOLS

    def rule(self, symbol: str, direction: Direction) -> Rule:
        check_symbol(symbol, self.schema)
        if self.schema is Schema.POLY:
            return [mono(2)] if direction is Direction.X else []
        k = phi_order(symbol)
        if k is not None:
            return [WeightMonomial(Fraction(1), Scalars(), ((phi(k + 1), 1),))] if direction is Direction.X else []
        if symbol == "vphi_tt":
            raise UnsupportedSymbolError("vphi_tt is terminal; its derivatives are not modelled")
        if direction is Direction.X:
            return [mono(1, s=1, phi1=1, **{symbol: 1})]
        return [mono(1, **{"vphi_t" if symbol == "vphi" else "vphi_tt": 1})]


POLY_PSI = WeightModel("poly-psi", Schema.POLY)
EXP_RHO = WeightModel("exp-rho", Schema.EXP)
MODELS = {m.name: m for m in (POLY_PSI, EXP_RHO)}


def model_for(schema: Schema) -> WeightModel:
    return POLY_PSI if schema is Schema.POLY else EXP_RHO


def diff_factor_product(
    factors: Factors | Mapping[str, int],
    scalars: Scalars | tuple = Scalars(),
    direction: Direction = Direction.X,
    model: WeightModel = POLY_PSI,
) -> list[WeightMonomial]:
    """Product-rule derivative of ``lam^.. s^.. gamma^.. * prod(factors)``.

    The coefficient of the differentiated prefix is taken as 1.
    """
    factors = normalize_factors(factors)
    scalars = Scalars(*scalars)
    out = []
    for i, (sym, e) in enumerate(factors):
        rest = factors[:i] + ((sym, e - 1),) + factors[i + 1 :]
        base = WeightMonomial(Fraction(e), scalars, normalize_factors(rest))
        for r in model.rule(sym, direction):
            out.append(mono_mul(base, r))
    return merge_monomials(out)


# ---------------------------------------------------------------------------
# rho-derivative polynomials

class RhoMonomial(NamedTuple):
    """``coeff * lam^lam * s^s * rho_x^a rho_xx^b rho_xxx^c`` with powers {order: exponent}."""

    coeff: Fraction
    lam: int
    s: int
    powers: tuple[tuple[int, int], ...]


def rho_mono(coeff, lam=0, s=0, **powers: int) -> RhoMonomial:
    """``rho_mono(-6, lam=3, rx=2, rxx=1)`` is ``-6 lam^3 rho_x^2 rho_xx``."""
    names = {"rx": 1, "rxx": 2, "rxxx": 3, "rxxxx": 4}
    p = tuple(sorted((names[k], v) for k, v in powers.items() if v))
    return RhoMonomial(Fraction(coeff), lam, s, p)


# rho_x = s phi_x vphi; rho_xx = s^2 phi_x^2 vphi + s phi_xx vphi;
# rho_xxx = s^3 phi_x^3 vphi + 3 s^2 phi_x phi_xx vphi + s phi_xxx vphi
RHO_DERIVATIVES: dict[int, list[WeightMonomial]] = {
    1: [mono(1, s=1, phi1=1, vphi=1)],
    2: [mono(1, s=2, phi1=2, vphi=1), mono(1, s=1, phi2=1, vphi=1)],
    3: [
        mono(1, s=3, phi1=3, vphi=1),
        mono(3, s=2, phi1=1, phi2=1, vphi=1),
        mono(1, s=1, phi3=1, vphi=1),
    ],
}


def expand_rho_powers(expr: Iterable[RhoMonomial]) -> list[WeightMonomial]:
    out: list[WeightMonomial] = []
    for m in expr:
        acc = [WeightMonomial(m.coeff, Scalars(m.lam, m.s, 0), ())]
        for order, power in m.powers:
            if order not in RHO_DERIVATIVES:
                raise UnsupportedSymbolError(f"rho derivative of order {order} is not expanded")
            for _ in range(power):
                acc = poly_mul(acc, RHO_DERIVATIVES[order])
        out.extend(acc)
    return merge_monomials(out)
