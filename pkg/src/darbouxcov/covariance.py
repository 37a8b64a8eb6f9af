"""Jointly covariant third/second order Lax pair in one potential ``w``.

``A = a2*D^2 + a1*D + w`` and ``L = b3*D^3 + b2*D^2 + b*D + G``.  The
coefficients ``b``, ``b2`` and ``G`` are fixed by asking that the Darboux
transform of ``L`` be induced by the transform ``w -> w + a1' + 2*a2*s'`` of
the potential alone, matched through the Frechet derivative in the jets of
``w`` (including ``Ix(w)`` and ``Ix(w_t)``).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction

from .diffring import (
    DiffExpr,
    DiffRingError,
    JetVar,
    coord,
    d_t,
    d_x,
    eliminate_t,
    frechet,
    jet,
    param,
    substitute,
)
from .lindop import LinDiffOp, commutator, darboux_transform, miura_rhs

__all__ = [
    "ConfigViolation",
    "PairConfig",
    "G_FORMS",
    "build_pair",
    "potential_shift",
    "first_covariance_residual",
    "second_covariance_residual",
    "burgers_residual",
    "lax_compatibility",
    "printed_compatibility",
    "same_equation",
    "BoussinesqReduction",
    "boussinesq_reduce",
    "printed_boussinesq",
]


class ConfigViolation(DiffRingError):
    pass


W = jet("w")
IW = DiffExpr.lift(JetVar("w", 0, 0, 1, 0))
IWT = DiffExpr.lift(JetVar("w", 0, 1, 1, 0))

# Normalizations of the zeroth coefficient G(w, t).
#   compatible:      G_wx = 3b3/4a2, G_Iw = b2'/2a2, G_Iwt = 3b3/4a2^2
#   printed:         twice the above (the closed form as printed)
#   chain:           -3w'/4 + 3 Ix(w_t)      (b3=1, a2=-1, a1=0 only)
#   chain_restated:  3w'/4 - 3 Ix(w_t)/4 with b = 3w/2 + alpha (same restriction)
G_FORMS = ("compatible", "printed", "chain", "chain_restated")


def _const(x) -> DiffExpr:
    if isinstance(x, DiffExpr):
        return x
    if isinstance(x, float):
        # decimal reading keeps 0.31 as 31/100
        x = Fraction(repr(x))
    return DiffExpr.lift(Fraction(x))


@dataclass(frozen=True)
class PairConfig:
    b3: DiffExpr = field(default_factory=lambda: param("b3"))
    a2: DiffExpr = field(default_factory=lambda: param("a2"))
    a1: DiffExpr = field(default_factory=lambda: jet("a1"))
    alpha: DiffExpr = field(default_factory=lambda: jet("alpha"))
    beta: DiffExpr = field(default_factory=lambda: jet("beta"))
    g_form: str = "compatible"

    def __post_init__(self):
        for name in ("b3", "a2", "a1", "alpha", "beta"):
            object.__setattr__(self, name, _const(getattr(self, name)))
        for name in ("b3", "a2"):
            v = getattr(self, name)
            if not v.is_constant():
                raise ConfigViolation(f"{name} must be a constant, got {v}")
            if v.is_zero():
                raise ConfigViolation(f"{name} must be nonzero")
        for name in ("alpha", "beta"):
            v = getattr(self, name)
            if not d_x(v).is_zero():
                raise ConfigViolation(f"{name} must not depend on x, got {v}")
        if "w" in self.a1.bases():
            raise ConfigViolation("a1 must not depend on the potential")
        if self.g_form not in G_FORMS:
            raise ConfigViolation(f"unknown g_form {self.g_form!r}")
        if self.g_form.startswith("chain") and not self.is_standard():
            raise ConfigViolation(f"g_form {self.g_form!r} needs b3=1, a2=-1, a1=0, beta=0")

    def is_standard(self) -> bool:
        return self.b3 == 1 and self.a2 == -1 and self.a1.is_zero() and self.beta.is_zero()

    def with_(self, **kw) -> "PairConfig":
        return replace(self, **kw)


def b_coeff(cfg: PairConfig) -> DiffExpr:
    if cfg.g_form == "chain_restated":
        return Fraction(3, 2) * W + cfg.alpha
    return 3 * cfg.b3 / (2 * cfg.a2) * W + cfg.alpha


def b2_coeff(cfg: PairConfig) -> DiffExpr:
    return 3 * cfg.b3 / (2 * cfg.a2) * cfg.a1 + cfg.beta


def g_coeff(cfg: PairConfig) -> DiffExpr:
    b3, a2 = cfg.b3, cfg.a2
    if cfg.g_form == "chain":
        return Fraction(-3, 4) * d_x(W) + 3 * IWT
    if cfg.g_form == "chain_restated":
        return Fraction(3, 4) * d_x(W) - Fraction(3, 4) * IWT
    scale = 1 if cfg.g_form == "printed" else Fraction(1, 2)
    return scale * (
        3 * b3 / (2 * a2) * d_x(W)
        + 3 * b3 / (2 * a2 * a2) * d_x(cfg.a1) * IW
        + 3 * b3 / (2 * a2 * a2) * IWT
    )


def build_pair(cfg: PairConfig) -> tuple[LinDiffOp, LinDiffOp]:
    """Return ``(L, A)`` for the configuration."""
    A = LinDiffOp([W, cfg.a1, cfg.a2])
    L = LinDiffOp([g_coeff(cfg), b_coeff(cfg), b2_coeff(cfg), cfg.b3])
    return L, A


def potential_shift(A: LinDiffOp) -> DiffExpr:
    """``w[1] - w`` induced by the Darboux transform of ``A``."""
    return darboux_transform(A).coeff(0) - A.coeff(0)


def _impose(expr: DiffExpr, cfg: PairConfig, burgers: bool) -> DiffExpr:
    if burgers and "a1" in expr.bases():
        a1 = jet("a1")
        expr = eliminate_t(expr, "a1", -cfg.a2 * d_x(a1, 2) - a1 * d_x(a1))
    return expr


def first_covariance_residual(cfg: PairConfig, pair=None) -> DiffExpr:
    """DT of ``b1`` minus the Frechet derivative of ``b(w)`` along ``w[1]-w``."""
    L, A = pair if pair is not None else build_pair(cfg)
    dt_side = darboux_transform(L).coeff(1) - L.coeff(1)
    fd_side = frechet(L.coeff(1), "w", potential_shift(A))
    return dt_side - fd_side


def second_covariance_residual(
    cfg: PairConfig, pair=None, form: str = "linearized", impose_burgers: bool = True
) -> DiffExpr:
    """Covariance residual for the zeroth coefficient ``G``.

    ``form="linearized"`` uses the left side in which ``3*b3*(s^2/2)'`` is
    replaced through the evolution law with the ``a1*s`` term dropped, which
    is the form from which the values of ``G_wx``, ``G_Iw``, ``G_Iwt`` and
    the Burgers constraint on ``a1`` follow. ``form="exact"`` uses the full
    transform of the zeroth coefficient and the full evolution law for
    ``s_t``; it vanishes only for ``a1 = beta = 0``.

    With ``impose_burgers`` the t-derivatives of ``a1`` are eliminated with
    ``a1_t = -a2*a1'' - a1*a1'``.
    """
    L, A = pair if pair is not None else build_pair(cfg)
    b3, a2 = cfg.b3, cfg.a2
    s = jet("sigma")
    shift = potential_shift(A)
    fd_side = frechet(L.coeff(0), "w", shift)
    if form == "linearized":
        lhs = (
            d_x(L.coeff(1))
            + s * d_x(L.coeff(2))
            + 3 * b3 / (2 * a2) * (d_t(s) - d_x(W))
            + Fraction(3, 2) * b3 * d_x(s, 2)
        )
    elif form == "exact":
        lhs = darboux_transform(L).coeff(0) - L.coeff(0)
    else:
        raise ValueError(f"unknown form {form!r}")
    res = lhs - fd_side
    res = eliminate_t(res, "sigma", d_x(miura_rhs(A)))
    return _impose(res, cfg, impose_burgers)


def burgers_residual(a1, a2):
    """``a1_t + a2*a1'' + a1*a1'``.

    Symbolic for a DiffExpr ``a1``; for a sampled field (anything with
    ``values`` and grid spacings) the derivatives are centered differences.
    """
    if isinstance(a1, DiffExpr):
        return d_t(a1) + _const(a2) * d_x(a1, 2) + a1 * d_x(a1)
    from .dressing import Field2D, stencil_derivative

    if not isinstance(a1, Field2D):
        raise TypeError("a1 must be a DiffExpr or Field2D")
    v = a1.values
    ax = stencil_derivative(v, a1.dx, 1, axis=0, accuracy=4)
    axx = stencil_derivative(v, a1.dx, 2, axis=0, accuracy=4)
    res = a2 * axx + v * ax
    if a1.nt >= 3:
        res = res + stencil_derivative(v, a1.dt, 1, axis=1, accuracy=2)
    return a1.with_values(res)


def lax_compatibility(L: LinDiffOp, A: LinDiffOp) -> list[tuple[int, DiffExpr]]:
    """Coefficients of ``D^k`` in ``L_t - (A o L - L o A)``, highest first.

    The ``D^(n+m-1)`` coefficient is included even when zero; the top
    coefficient cancels whenever the leading coefficients are constant.
    """
    C = L.dt() - commutator(A, L)
    top = L.order + A.order - 1
    extra = [k for k in range(top + 1, C.order + 1) if not C.coeff(k).is_zero()]
    if extra:
        raise DiffRingError(f"nonzero coefficient above D^{top}: {extra}")
    return [(k, C.coeff(k)) for k in range(top, -1, -1)]


def printed_compatibility() -> list[tuple[int, DiffExpr]]:
    """The five compatibility equations as printed (``lhs - rhs``), for
    generic ``b0..b3``, ``a1``, ``a0 = w`` and constant ``a2``."""
    a2 = param("a2")
    b0, b1, b2, b3 = (jet(f"b{k}") for k in range(4))
    a1, a0 = jet("a1"), W
    dx = d_x
    return [
        (4, 2 * a2 * dx(b3) - 3 * b3 * dx(a2)),
        (3, d_t(b3) - (2 * a2 * dx(b2) - 3 * b3 * dx(a1, 2))),
        (2, d_t(b2) - (a2 * dx(b2, 2) + 2 * a2 * dx(b1) + a1 * dx(b2) - 3 * b3 * dx(a1, 2)
                       - 2 * b2 * dx(a1) - 3 * b3 * dx(a0))),
        (1, d_t(b1) - (a2 * dx(b1, 2) + a1 * dx(b1) - b3 * dx(a1, 3) - b2 * dx(a1, 2) - b1 * dx(a1)
                       - 3 * b3 * dx(a0, 2) - 2 * b2 * dx(a0) + 2 * a2 * dx(b0))),
        (0, d_t(b0) - (a1 * dx(b0) + a2 * dx(b0, 2) - b1 * dx(a0) - b2 * dx(a0, 2) - b3 * dx(a0, 3))),
    ]


def same_equation(e1: DiffExpr, e2: DiffExpr) -> bool:
    """True when ``e1 = c*e2`` for a nonzero constant ``c``."""
    if e1.is_zero() or e2.is_zero():
        return e1.is_zero() and e2.is_zero()
    m, c1 = e1.items()[0]
    c2 = e2.terms.get(m)
    if c2 is None:
        return False
    ratio = DiffExpr({(): c1}) / DiffExpr({(): c2})
    return e1 == ratio * e2


@dataclass(frozen=True)
class BoussinesqReduction:
    variant: str  # generalized | constant_coeff | standard
    evolution: DiffExpr  # zeroth-order equation, once differentiated in x
    constraint: DiffExpr  # first-order equation
    beta_law: DiffExpr  # second-order equation after the Burgers constraint
    raw: tuple  # ((k, expr), ...) as returned by lax_compatibility


def boussinesq_reduce(cfg: PairConfig) -> BoussinesqReduction:
    """Reduce the compatibility system of the covariant pair.

    ``evolution`` is ``d_x`` of the zeroth-order compatibility equation, so it
    carries no ``Ix(w_tt)`` jet; with ``a1`` and ``b2`` constant it is free of
    antiderivatives and can be sampled on a grid.
    """
    L, A = build_pair(cfg)
    raw = lax_compatibility(L, A)
    eqs = dict(raw)
    beta_law = _impose(eqs[2], cfg, True)
    b2 = b2_coeff(cfg)
    a1_const = d_x(cfg.a1).is_zero() and d_t(cfg.a1).is_zero()
    if a1_const and d_x(b2).is_zero():
        variant = "standard" if cfg.is_standard() else "constant_coeff"
    else:
        variant = "generalized"
    evolution = _impose(d_x(eqs[0]), cfg, variant == "generalized")
    constraint = _impose(eqs[1], cfg, variant == "generalized")
    return BoussinesqReduction(variant, evolution, constraint, beta_law, tuple(raw))


def printed_boussinesq(cfg: PairConfig) -> DiffExpr:
    """The constant-coefficient evolution equation as printed, ``lhs - rhs``."""
    b3, a2, a1, al, be = cfg.b3, cfg.a2, cfg.a1, cfg.alpha, cfg.beta
    wx = d_x(W)
    lhs = 3 * b3 * d_t(d_t(W) + a1 * W) / (4 * a2 * a2)
    inner = (
        (3 * b3 * W / (2 * a2) + al) * wx
        - b3 * d_x(W, 3) / 4
        + 3 * b3 * a1 * d_t(W) / (4 * a2 * a2)
        + (be - 3 * b3 * a1 / (4 * a2)) * d_x(W, 2)
    )
    return lhs + d_x(inner)


def printed_generalized() -> tuple[DiffExpr, DiffExpr]:
    """The printed pair of equations for ``b3 = 1``, ``a2 = -1`` (``lhs - rhs``)."""
    a1, al, be = jet("a1"), jet("alpha"), jet("beta")
    dx = d_x
    first = (al * W + d_t(al) + Fraction(3, 2) * dx(a1, 2) * IW + (2 * be - Fraction(3, 2) * a1) * dx(W)
             + dx(a1, 3) + Fraction(3, 2) * a1 * dx(a1, 2))
    # the printed second line carries Ix((w_t + a1 w)_t); compare after d_x
    lhs = Fraction(3, 4) * d_t(d_t(W) + a1 * W)
    rhs = dx(
        (al - Fraction(3, 2) * W) * dx(W) - dx(W, 3) / 4 + Fraction(3, 4) * a1 * d_t(W)
        + Fraction(3, 4) * a1 * dx(a1, 2) * IW + Fraction(3, 4) * a1 * dx(a1) * W
        - Fraction(3, 4) * dx(a1) * dx(W) + (be + Fraction(3, 4) * a1) * dx(W, 2)
    )
    return first, lhs - rhs


def standard_boussinesq() -> DiffExpr:
    """``w_tt - (w^2)_xx + w_xxxx/3`` (the form reached for b3=1, a2=-1, a1=beta=0, alpha=0)."""
    return d_t(W, 2) - d_x(W * W, 2) + d_x(W, 4) / 3
