from fractions import Fraction

import pytest

from darbouxcov.covariance import (
    ConfigViolation,
    PairConfig,
    boussinesq_reduce,
    build_pair,
    burgers_residual,
    first_covariance_residual,
    lax_compatibility,
    printed_boussinesq,
    printed_compatibility,
    same_equation,
    second_covariance_residual,
    standard_boussinesq,
)
from darbouxcov.diffring import coord, d_x, jet, param, substitute
from darbouxcov.lindop import LinDiffOp

b3, a2 = param("b3"), param("a2")


def test_default_pair_is_covariant():
    cfg = PairConfig()
    assert first_covariance_residual(cfg).is_zero()
    assert second_covariance_residual(cfg).is_zero()


def test_second_residual_is_burgers_without_constraint():
    res = second_covariance_residual(PairConfig(), impose_burgers=False)
    expect = -3 * b3 / (4 * a2 * a2) * burgers_residual(jet("a1"), a2)
    assert res == expect


def test_exact_form_needs_a1_beta_zero():
    assert second_covariance_residual(PairConfig(a1=0, beta=0), form="exact").is_zero()
    assert not second_covariance_residual(PairConfig(), form="exact").is_zero()


def test_printed_g_normalization_is_not_covariant():
    assert not second_covariance_residual(PairConfig(g_form="printed")).is_zero()


def test_wrong_b_coefficient_caught():
    cfg = PairConfig()
    L, A = build_pair(cfg)
    bad = LinDiffOp([L.coeff(0), L.coeff(1) + jet("w"), L.coeff(2), L.coeff(3)])
    res = first_covariance_residual(cfg, (bad, A))
    assert res == -(d_x(jet("a1")) + 2 * a2 * d_x(jet("sigma")))


def test_non_burgers_a1_caught():
    cfg = PairConfig(a1=coord("x"))
    assert not second_covariance_residual(cfg).is_zero()


def test_config_validation():
    with pytest.raises(ConfigViolation):
        PairConfig(b3=jet("b3"))
    with pytest.raises(ConfigViolation):
        PairConfig(a2=0)
    with pytest.raises(ConfigViolation):
        PairConfig(alpha=jet("w"))
    with pytest.raises(ConfigViolation):
        PairConfig(g_form="chain")  # only for the standard constants


def test_compatibility_top_coefficients():
    A = LinDiffOp([jet("w"), jet("a1"), a2])
    L = LinDiffOp([jet(f"b{k}") for k in range(4)])
    comp = dict(lax_compatibility(L, A))
    assert comp[4] == -2 * a2 * d_x(jet("b3"))
    printed = dict(printed_compatibility())
    for k in (4, 2, 1, 0):
        assert same_equation(comp[k], printed[k]), k


def test_printed_b3_line_differs_in_a1_order():
    A = LinDiffOp([jet("w"), jet("a1"), a2])
    L = LinDiffOp([jet("b0"), jet("b1"), jet("b2"), b3])
    comp = dict(lax_compatibility(L, A))[3]
    printed = dict(printed_compatibility())[3]
    printed = substitute(printed, {"b3": b3})
    # computed: 3 b3 a1'; printed: 3 b3 a1''
    assert comp - printed == 3 * b3 * d_x(jet("a1")) - 3 * b3 * d_x(jet("a1"), 2)
    assert not same_equation(comp, printed)


def test_reduction_standard_case():
    cfg = PairConfig(b3=1, a2=-1, a1=0, alpha=0, beta=0)
    red = boussinesq_reduce(cfg)
    assert red.variant == "standard"
    assert same_equation(red.evolution, standard_boussinesq())
    assert red.evolution - printed_boussinesq(cfg) == Fraction(1, 2) * jet("w", x=4)


def test_reduction_beta_law():
    red = boussinesq_reduce(PairConfig())
    assert red.variant == "generalized"
    beta, a1 = jet("beta"), jet("a1")
    assert red.beta_law == jet("beta", t=1) + 2 * beta * d_x(a1)


def test_reduction_constant_coefficient_variant():
    cfg = PairConfig(b3=1, a2=-1, a1=param("a1"), alpha=param("alpha"), beta=param("beta"))
    red = boussinesq_reduce(cfg)
    assert red.variant == "constant_coeff"
    assert not any(v.antider_x for v in red.evolution.jets())
