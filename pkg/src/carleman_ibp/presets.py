"""End-to-end scenarios with golden expectations.

Each preset conjugates an operator, multiplies multiplier groups, reduces
the product, classifies the terminal rows and compares selected groups with
a golden file shipped under ``goldens/``.

Hand expansion behind the ``thm1-poly`` leading energies, one summand per
product of an I1 entry with an I2/I3 entry:

    w_xx^2 * lam^3 mu^2 :  72 - 36 - 12 + 96 = 120
    w_x^2  * lam^5 mu^4 : 120 + 72 - 60 - 96 = 36
    w^2    * lam^7 mu^6 :  28 - 12           = 16
"""
from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from typing import Callable

from .classify import BoundaryCondition, Report, classify, cross_summary, parse_table
from .conjugation import FOURTH, SECOND, OperatorSpec, multiply, split_multiplier, conjugate, weight_times_unary
from .engine import reduce
from .oracle import VerifyResult, verify_identity
from .terms import Deriv, Schema, Term, instantiate_gamma, merge
from .weights import EXP_RHO, POLY_PSI, WeightModel


class UnknownPresetError(KeyError):
    pass


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class PresetResult:
    name: str
    product: list[Term]
    output: list[Term]
    report: Report
    identity: VerifyResult
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


@dataclass(frozen=True)
class Preset:
    name: str
    operator: OperatorSpec
    model: WeightModel
    build_product: Callable[[], list[Term]]
    bc: BoundaryCondition
    drop_time_boundary: bool
    golden: str

    def goldens(self) -> dict[str, list[Term]]:
        return parse_table(golden_text(self.golden))


def golden_text(filename: str) -> str:
    return resources.files(__package__).joinpath("goldens").joinpath(filename).read_text(encoding="utf-8")


def _main_product(model: WeightModel) -> list[Term]:
    split = split_multiplier(conjugate(FOURTH, model))
    i1 = instantiate_gamma(split.I1)
    return multiply(i1, list(split.I2) + list(split.I3))


def prop1_product() -> list[Term]:
    # the p*v part of the operator is left out; only I1*I2 is formed
    split = split_multiplier(conjugate(SECOND, POLY_PSI), SECOND)
    return multiply(split.I1, split.I2)


def thm1_product() -> list[Term]:
    return _main_product(POLY_PSI)


def thm2_product() -> list[Term]:
    return _main_product(EXP_RHO)


def cross_weights() -> list:
    rep = classify(reduce(thm2_product(), EXP_RHO), BoundaryCondition.CLAMPED, True)
    weights, _ = cross_summary(rep.cross)
    return weights


def j1_tail() -> list[Term]:
    """u_t - J1 with gamma = 1: the terms substituted for u_t in B u_t u_x."""
    split = split_multiplier(conjugate(FOURTH, EXP_RHO))
    return merge(t.with_coeff(-t.coeff) for t in instantiate_gamma(split.I1) if t.first.t == 0)


def cross_reduction_product() -> list[Term]:
    bu = weight_times_unary(cross_weights(), Deriv(0, 1), Schema.EXP)
    return multiply(bu, j1_tail())


PRESETS: dict[str, Preset] = {
    p.name: p
    for p in (
        Preset("prop1-second-order", SECOND, POLY_PSI, prop1_product, BoundaryCondition.NONE, False,
               "prop1-second-order.txt"),
        Preset("thm1-poly", FOURTH, POLY_PSI, thm1_product, BoundaryCondition.COMPACT, True, "thm1-poly.txt"),
        Preset("thm2-exp-clamped", FOURTH, EXP_RHO, thm2_product, BoundaryCondition.CLAMPED, True,
               "thm2-exp-clamped.txt"),
        Preset("thm2-exp-hinged", FOURTH, EXP_RHO, thm2_product, BoundaryCondition.HINGED, True,
               "thm2-exp-hinged.txt"),
        Preset("thm2-cross-reduction", FOURTH, EXP_RHO, cross_reduction_product, BoundaryCondition.NONE, True,
               "thm2-cross-reduction.txt"),
    )
}


def degree_signature(t: Term) -> tuple:
    """(lam, s, vphi exponent, slot x-orders, flags): what an O(.)-class pins down."""
    return (t.lam, t.s, t.exponent("vphi"), tuple(sorted((t.first.x, t.second.x))), t.dt, t.dx)


def _same(name: str, got: list[Term], want: list[Term]) -> Check:
    got, want = merge(got), merge(want)
    if got == want:
        return Check(name, True)
    missing = [t for t in want if t not in got]
    extra = [t for t in got if t not in want]
    return Check(name, False, f"missing {missing}; unexpected {extra}")


def _same_degrees(name: str, got: list[Term], want: list[Term]) -> Check:
    g = sorted({degree_signature(t) for t in got})
    w = sorted({degree_signature(t) for t in want})
    return Check(name, g == w, "" if g == w else f"got {g}, want {w}")


def _flat(groups: dict) -> list[Term]:
    return [t for rows in groups.values() for t in rows]


def run_preset(name: str) -> PresetResult:
    try:
        preset = PRESETS[name]
    except KeyError:
        raise UnknownPresetError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
    product = preset.build_product()
    output = reduce(product, preset.model)
    report = classify(output, preset.bc, preset.drop_time_boundary)
    identity = verify_identity(product, output, preset.model)
    result = PresetResult(name, product, output, report, identity)
    result.checks.append(Check("identity", identity.ok, "" if identity.ok else f"residual {identity.diff}"))
    golden = preset.goldens()

    if "space-boundary" in golden:
        result.checks.append(_same("space-boundary", report.space_boundary, golden["space-boundary"]))
    if "energy" in golden:
        result.checks.append(_same("energy", _flat(report.energy), golden["energy"]))
    if "leading-energy" in golden:
        result.checks.append(_same("leading-energy", _flat(report.leading), golden["leading-energy"]))
    if "leading-energy-degrees" in golden:
        result.checks.append(
            _same_degrees("leading-energy-degrees", _flat(report.leading), golden["leading-energy-degrees"])
        )
    if "cross" in golden:
        weights, odd = cross_summary(report.cross)
        got = weight_times_unary(weights, Deriv(0, 0), Schema.EXP)
        want = [Term(t.coeff, t.lam, t.s, t.gamma, t.factors, Deriv(0, 0), None, 0, 0, t.schema)
                for t in golden["cross"]]
        check = _same("cross", got, want)
        if odd:
            check = Check("cross", False, f"cross rows of unexpected shape: {odd}")
        result.checks.append(check)
    if "boundary-leading" in golden:
        result.checks.append(_same("boundary-leading", _flat(report.boundary_leading), golden["boundary-leading"]))
    if "boundary-subleading-degrees" in golden:
        result.checks.append(
            _same_degrees("boundary-subleading-degrees", _flat(report.boundary_subleading),
                          golden["boundary-subleading-degrees"])
        )
    if name == "thm1-poly":
        degrees = {k: sorted({t.lam for t in rows}) for k, rows in report.leading.items()}
        want = {3: [1], 2: [3], 1: [5], 0: [7]}
        result.checks.append(Check("lambda-degree-pattern", degrees == want, f"got {degrees}"))
    return result
