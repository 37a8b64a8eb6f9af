import pytest

from darbouxcov.diffring import d_x, jet, param, substitute
from darbouxcov.lindop import (
    D,
    LinDiffOp,
    NonInvertibleLeading,
    UnsupportedOrder,
    apply,
    bell,
    commutator,
    compose,
    darboux_transform,
    log_derivative_check,
    miura_residual,
    miura_rhs,
    ore_right_divide,
    parse_op,
    render_op,
)

s = jet("sigma")
phi = jet("phi")
generic = LinDiffOp([jet(f"b{k}") for k in range(4)])


def test_compose_product_rule():
    f = jet("f")
    # D o f = f D + f'
    assert compose(D, LinDiffOp([f])) == LinDiffOp([d_x(f), f])


def test_compose_factorization():
    L = compose(D - s, D + s)
    assert L == LinDiffOp([d_x(s) - s * s, 0, 1])


def test_commutator_antisymmetric():
    A = LinDiffOp([jet("w"), jet("a1"), param("a2")])
    assert commutator(A, generic) == -commutator(generic, A)


def test_bell_first_values():
    assert bell(0) == 1
    assert bell(1) == s
    assert bell(2) == d_x(s) + s * s
    assert bell(3) == d_x(s, 2) + 3 * s * d_x(s) + s**3


@pytest.mark.parametrize("n", range(9))
def test_bell_log_derivative_identity(n):
    e = bell(n) * phi - jet("phi", x=n)
    assert substitute(e, {"sigma": d_x(phi) / phi}).is_zero()


def test_exact_transform_matches_ore_quotient():
    N = compose(D - s, generic)
    Q, R = ore_right_divide(N, D - s)
    assert Q == darboux_transform(generic)
    assert R.order == 0
    combo = sum((generic.coeff(k) * bell(k) for k in range(4)), start=0 * s)
    assert R.coeff(0) == d_x(combo)


def test_printed_transform_differs_by_dropped_terms():
    ex = darboux_transform(generic)
    pr = darboux_transform(generic, form="printed")
    b2, b3 = jet("b2"), jet("b3")
    assert pr.coeff(0) - ex.coeff(0) == -(2 * b2 * d_x(s) + 2 * d_x(b3) * d_x(s) + d_x(b3) * s * s)
    assert pr.coeff(1) - ex.coeff(1) == -d_x(b3) * s
    # agree when b3 is constant and b2 = 0
    L = LinDiffOp([jet("b0"), jet("b1"), 0, param("b3")])
    assert darboux_transform(L) == darboux_transform(L, form="printed")


def test_second_order_transform_is_potential_shift():
    A = LinDiffOp([jet("w"), jet("a1"), param("a2")])
    A1 = darboux_transform(A)
    assert A1.coeff(2) == param("a2")
    assert A1.coeff(0) - jet("w") == d_x(jet("a1")) + 2 * param("a2") * d_x(s)


def test_order_four_not_closed_form():
    with pytest.raises(UnsupportedOrder):
        darboux_transform(generic * D)


def test_ore_needs_unit_leading():
    with pytest.raises(NonInvertibleLeading):
        ore_right_divide(generic, LinDiffOp([1, jet("f") + 1]))


def test_miura_identity_for_second_order():
    A = LinDiffOp([jet("w"), jet("a1"), param("a2")])
    assert log_derivative_check(miura_residual(A), A).is_zero()
    assert miura_rhs(A) == jet("w") + jet("a1") * s + param("a2") * bell(2)


def test_apply_and_round_trip():
    A = LinDiffOp([jet("w"), 0, param("a2")])
    assert apply(A, "psi") == jet("w") * jet("psi") + param("a2") * jet("psi", x=2)
    assert parse_op(render_op(generic)) == generic
