from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, strategies as st

from carleman_ibp.terms import Schema, phi_order
from carleman_ibp.weights import (
    EXP_RHO,
    POLY_PSI,
    Direction,
    Scalars,
    UnsupportedSymbolError,
    WeightMonomial,
    diff_factor_product,
    expand_rho_powers,
    merge_monomials,
    mono,
    model_for,
    poly_mul,
    rho_mono,
)

X, T = Direction.X, Direction.T


def test_mu_rules():
    assert diff_factor_product({"mu": 3}, direction=X, model=POLY_PSI) == [mono(6, mu=2)]
    assert diff_factor_product({"mu": 3}, direction=T, model=POLY_PSI) == []


def test_exp_rules():
    # d/dx vphi^4 = 4 s phi_x vphi^4
    assert diff_factor_product({"vphi": 4}, Scalars(0, 5, 0), X, EXP_RHO) == [mono(4, s=6, phi1=1, vphi=4)]
    assert diff_factor_product({"phi2": 2}, direction=X, model=EXP_RHO) == [mono(2, phi2=1, phi3=1)]
    assert diff_factor_product({"vphi": 2}, direction=T, model=EXP_RHO) == [mono(2, vphi=1, vphi_t=1)]
    assert diff_factor_product({"phi1": 1}, direction=T, model=EXP_RHO) == []


def test_vphi_tt_terminal():
    with pytest.raises(UnsupportedSymbolError):
        diff_factor_product({"vphi_tt": 1}, direction=X, model=EXP_RHO)


def test_model_lookup():
    assert model_for(Schema.POLY) is POLY_PSI and model_for(Schema.EXP) is EXP_RHO
    assert EXP_RHO.display("phi3") == "phi_xxx"


def _deriv(monos, direction, model):
    return merge_monomials(
        WeightMonomial(m.coeff * d.coeff, d.scalars, d.factors)
        for m in monos
        for d in diff_factor_product(m.factors, m.scalars, direction, model)
    )


exp_factors = st.dictionaries(st.sampled_from(["phi1", "phi2", "phi3", "vphi", "vphi_t"]), st.integers(0, 4), max_size=4)


@given(exp_factors, exp_factors)
def test_leibniz(f, g):
    a = [mono(1, **f)] if f else [mono(1)]
    b = [mono(1, **g)] if g else [mono(1)]
    lhs = _deriv(poly_mul(a, b), X, EXP_RHO)
    rhs = merge_monomials(poly_mul(_deriv(a, X, EXP_RHO), b) + poly_mul(a, _deriv(b, X, EXP_RHO)))
    assert lhs == rhs


@given(st.dictionaries(st.sampled_from(["phi1", "phi2", "vphi"]), st.integers(0, 4), max_size=3))
def test_dt_dx_commute(f):
    m = [mono(1, s=1, **f)]
    assert _deriv(_deriv(m, X, EXP_RHO), T, EXP_RHO) == _deriv(_deriv(m, T, EXP_RHO), X, EXP_RHO)


# independent reference: rho = vphi = e^{s phi(x)}/(t(T - t)) with an undetermined phi
x, t, s, lam, Tend = sp.symbols("x t s lambda T", positive=True)
phi_f = sp.Function("phi")(x)
vphi = sp.exp(s * phi_f) / (t * (Tend - t))


def _to_sympy(monos):
    out = 0
    for m in monos:
        e = sp.Rational(m.coeff.numerator, m.coeff.denominator) * lam**m.scalars.lam * s**m.scalars.s
        for sym, p in m.factors:
            k = phi_order(sym)
            e *= (sp.diff(phi_f, x, k) if k else vphi) ** p
        out += e
    return out


@pytest.mark.parametrize(
    "rho, ref",
    [
        (rho_mono(1, rx=2, rxx=1), sp.diff(vphi, x) ** 2 * sp.diff(vphi, x, 2)),
        (rho_mono(-6, lam=3, rx=2, rxx=1), -6 * lam**3 * sp.diff(vphi, x) ** 2 * sp.diff(vphi, x, 2)),
        (rho_mono(4, lam=2, rx=1, rxxx=1), 4 * lam**2 * sp.diff(vphi, x) * sp.diff(vphi, x, 3)),
        (rho_mono(3, lam=2, rxx=2), 3 * lam**2 * sp.diff(vphi, x, 2) ** 2),
    ],
)
def test_expand_rho_powers_against_sympy(rho, ref):
    assert sp.simplify(_to_sympy(expand_rho_powers([rho])) - ref) == 0


def test_rho_x2_rho_xx_closed_form():
    got = expand_rho_powers([rho_mono(1, rx=2, rxx=1)])
    assert got == merge_monomials([mono(1, s=4, phi1=4, vphi=3), mono(1, s=3, phi1=2, phi2=1, vphi=3)])


def test_rho_xxxx_not_expanded():
    with pytest.raises(UnsupportedSymbolError):
        expand_rho_powers([rho_mono(1, rxxxx=1)])


def test_scalars_add():
    assert Scalars(1, 2, 0) + Scalars(0, 1, 1) == Scalars(1, 3, 1)
    assert mono(Fraction(1, 2), lam=1).coeff == Fraction(1, 2)
