"""Linear differential operators with differential-polynomial coefficients.

``LinDiffOp((a0, a1, ..., an))`` stands for ``a0 + a1*D + ... + an*D^n``
where ``D`` is the total x-derivative.
"""

from __future__ import annotations

import re
from functools import lru_cache
from math import comb
from typing import Sequence

from .diffring import (
    DiffExpr,
    DiffRingError,
    NotInvertible,
    d_t,
    d_x,
    eliminate_t,
    jet,
    parse,
    render,
    substitute,
)

__all__ = [
    "LinDiffOp",
    "UnsupportedOrder",
    "NonInvertibleLeading",
    "D",
    "compose",
    "commutator",
    "apply",
    "bell",
    "darboux_transform",
    "ore_right_divide",
    "miura_residual",
    "miura_rhs",
    "parse_op",
    "render_op",
    "log_derivative_check",
]


class UnsupportedOrder(DiffRingError):
    pass


class NonInvertibleLeading(DiffRingError):
    pass


class LinDiffOp:
    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence = ()):
        cs = [DiffExpr.lift(c) for c in coeffs]
        while cs and cs[-1].is_zero():
            cs.pop()
        self.coeffs: tuple[DiffExpr, ...] = tuple(cs)

    @classmethod
    def scalar(cls, f) -> "LinDiffOp":
        return cls([f])

    @classmethod
    def identity(cls) -> "LinDiffOp":
        return cls([1])

    @property
    def order(self) -> int:
        """Order of the operator; -1 for the zero operator."""
        return len(self.coeffs) - 1

    def coeff(self, k: int) -> DiffExpr:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else DiffExpr()

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other):
        other = _as_op(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return LinDiffOp([self.coeff(k) + other.coeff(k) for k in range(n)])

    __radd__ = __add__

    def __neg__(self):
        return LinDiffOp([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-_as_op(other))

    def __rsub__(self, other):
        return _as_op(other) - self

    def __mul__(self, other):
        return compose(self, _as_op(other))

    def __rmul__(self, other):
        return compose(_as_op(other), self)

    __matmul__ = __mul__

    def __pow__(self, k: int):
        out = LinDiffOp.identity()
        for _ in range(k):
            out = compose(out, self)
        return out

    def __eq__(self, other):
        if not isinstance(other, LinDiffOp):
            try:
                other = _as_op(other)
            except TypeError:
                return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def map(self, fn) -> "LinDiffOp":
        """Apply ``fn`` to every coefficient."""
        return LinDiffOp([fn(c) for c in self.coeffs])

    def dt(self) -> "LinDiffOp":
        """Operator whose coefficients are the t-derivatives of ours."""
        return self.map(d_t)

    def __str__(self):
        return render_op(self)

    def __repr__(self):
        return f"LinDiffOp({render_op(self)!r})"


def _as_op(x) -> LinDiffOp:
    if isinstance(x, LinDiffOp):
        return x
    return LinDiffOp.scalar(DiffExpr.lift(x))


D = LinDiffOp([0, 1])


def compose(L: LinDiffOp, M: LinDiffOp) -> LinDiffOp:
    """Operator product ``L o M`` using ``D^i f = sum C(i,k) f^(k) D^(i-k)``."""
    if L.is_zero() or M.is_zero():
        return LinDiffOp()
    out = [DiffExpr() for _ in range(L.order + M.order + 1)]
    for j, b in enumerate(M.coeffs):
        if b.is_zero():
            continue
        derivs = [b]
        for i, a in enumerate(L.coeffs):
            if a.is_zero():
                continue
            while len(derivs) <= i:
                derivs.append(d_x(derivs[-1]))
            for k in range(i + 1):
                if derivs[k].is_zero():
                    continue
                out[i + j - k] = out[i + j - k] + comb(i, k) * a * derivs[k]
    return LinDiffOp(out)


def commutator(L: LinDiffOp, M: LinDiffOp) -> LinDiffOp:
    return compose(L, M) - compose(M, L)


def apply(L: LinDiffOp, psi: str = "psi") -> DiffExpr:
    """``L`` acting on the jet base ``psi``."""
    total = DiffExpr()
    for k, a in enumerate(L.coeffs):
        total = total + a * jet(psi, x=k)
    return total


@lru_cache(maxsize=None)
def bell(n: int, base: str = "sigma") -> DiffExpr:
    """Differential Bell polynomial: B0 = 1, B(n+1) = B(n)' + s*B(n)."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if n == 0:
        return DiffExpr.lift(1)
    prev = bell(n - 1, base)
    return d_x(prev) + jet(base) * prev


def darboux_transform(L: LinDiffOp, sigma: str = "sigma", form: str = "exact") -> LinDiffOp:
    """Coefficients of ``L[1]`` with ``(D - s) o L = L[1] o (D - s) + r``.

    ``form="exact"`` gives the full closed form for order <= 3.
    ``form="printed"`` reproduces the shortened third-order formulas in which
    the terms carrying ``b3'`` (beyond ``b2 + b3'``) and ``2*b2*s'`` are
    absent; they agree with the exact form only when ``b3`` is constant and
    ``b2 = 0``.
    """
    n = L.order
    if n > 3:
        raise UnsupportedOrder(f"closed form available up to order 3, got {n}; use ore_right_divide")
    s = jet(sigma)
    s1, s2 = d_x(s), d_x(s, 2)
    c = [L.coeff(k) for k in range(4)]
    if form == "printed":
        if n == 3:
            return LinDiffOp([
                c[0] + d_x(c[1]) + s * d_x(c[2]) + 3 * c[3] * (s * s1 + s2),
                c[1] + d_x(c[2]) + 3 * c[3] * s1,
                c[2] + d_x(c[3]),
                c[3],
            ])
        form = "exact"
    if form != "exact":
        raise ValueError(f"unknown form {form!r}")
    b0, b1, b2, b3 = c
    db3 = d_x(b3)
    q3 = b3
    q2 = b2 + db3
    q1 = b1 + d_x(b2) + db3 * s + 3 * b3 * s1
    q0 = b0 + d_x(b1) + s * d_x(b2) + 2 * b2 * s1 + db3 * s * s + 2 * db3 * s1 + 3 * b3 * (s * s1 + s2)
    return LinDiffOp([q0, q1, q2, q3])


def ore_right_divide(N: LinDiffOp, Dv: LinDiffOp) -> tuple[LinDiffOp, LinDiffOp]:
    """Right division ``N = Q o Dv + R`` with ``order(R) < order(Dv)``."""
    if Dv.order < 1:
        raise ValueError("divisor must have order >= 1")
    try:
        inv_lead = Dv.coeffs[-1].inverse()
    except NotInvertible:
        raise NonInvertibleLeading(f"leading coefficient {Dv.coeffs[-1]} is not a unit") from None
    m = Dv.order
    Q = [DiffExpr() for _ in range(max(N.order - m + 1, 0))]
    R = N
    while R.order >= m:
        k = R.order - m
        q = R.coeffs[-1] * inv_lead
        Q[k] = Q[k] + q
        shift = LinDiffOp([0] * k + [q])
        R = R - compose(shift, Dv)
    return LinDiffOp(Q), R


def miura_rhs(A: LinDiffOp, sigma: str = "sigma") -> DiffExpr:
    """``r = sum a_n B_n(s)`` for the operator ``A``."""
    total = DiffExpr()
    for n, a in enumerate(A.coeffs):
        total = total + a * bell(n, sigma)
    return total


def miura_residual(A: LinDiffOp, sigma: str = "sigma") -> DiffExpr:
    """``s_t - (sum a_n B_n(s))_x``; the Abelian commutator term vanishes."""
    return d_t(jet(sigma)) - d_x(miura_rhs(A, sigma))


def log_derivative_check(expr: DiffExpr, A: LinDiffOp, sigma: str = "sigma", phi: str = "phi") -> DiffExpr:
    """Substitute ``s = phi_x/phi`` and eliminate ``phi_t`` by ``phi_t = A phi``."""
    p = jet(phi)
    out = substitute(expr, {sigma: d_x(p) * p.inverse()})
    return eliminate_t(out, phi, apply(A, phi))


# --------------------------------------------------------------------------
# text form


def render_op(L: LinDiffOp) -> str:
    if L.is_zero():
        return "0"
    parts = []
    for k in range(L.order, -1, -1):
        c = L.coeffs[k]
        if c.is_zero():
            continue
        dk = "" if k == 0 else ("D" if k == 1 else f"D^{k}")
        cs = render(c)
        if not dk:
            parts.append(f"({cs})")
        elif c == 1:
            parts.append(dk)
        else:
            parts.append(f"({cs})*{dk}")
    return " + ".join(parts)


def parse_op(text: str) -> LinDiffOp:
    text = text.strip()
    if text == "0":
        return LinDiffOp()
    coeffs: dict[int, DiffExpr] = {}
    for part in _split_plus(text):
        part = part.strip()
        m = re.fullmatch(r"(?:\((.*)\)\*)?D(?:\^(\d+))?", part)
        if m:
            k = int(m.group(2) or 1)
            c = parse(m.group(1)) if m.group(1) is not None else DiffExpr.lift(1)
        elif part.startswith("(") and part.endswith(")"):
            k, c = 0, parse(part[1:-1])
        else:
            raise DiffRingError(f"bad operator term {part!r}")
        coeffs[k] = coeffs.get(k, DiffExpr()) + c
    n = max(coeffs) if coeffs else -1
    return LinDiffOp([coeffs.get(k, DiffExpr()) for k in range(n + 1)])


def _split_plus(s: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for i, ch in enumerate(s):
        depth += ch == "("
        depth -= ch == ")"
        if depth == 0 and s[i : i + 3] == " + ":
            parts.append("".join(cur))
            cur = []
            continue
        cur.append(ch)
    parts.append("".join(cur))
    return [p.strip("+ ").strip() if p.startswith("+") else p for p in parts]
