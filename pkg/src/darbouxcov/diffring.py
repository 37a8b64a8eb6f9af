"""Commutative differential polynomials over jet variables.

A :class:`DiffExpr` is a finite sum of monomials in jet variables with exact
coefficients. Jets carry x- and t-derivative orders and counts of formal
antiderivatives. Monomials are Laurent (negative exponents are allowed), so
quotients such as ``phi_x / phi`` live in the ring and zero-testing stays a
plain comparison of canonical term maps.

Coefficients are :class:`fractions.Fraction` or, when they depend on constant
parameters (``b3``, ``a2``, ``lam``...), elements of a rational function field
built on :mod:`sympy.polys`.
"""

from __future__ import annotations

import re
import threading
from fractions import Fraction
from typing import Callable, Iterable, Mapping, NamedTuple, Union

import sympy
from sympy import QQ
from sympy.polys.fields import FracElement, field

__all__ = [
    "DiffRingError",
    "NonIntegrable",
    "UnprolongableAntiderivative",
    "NotInvertible",
    "JetVar",
    "DiffExpr",
    "register_base",
    "base_depends",
    "jet",
    "param",
    "const",
    "coord",
    "d_x",
    "d_t",
    "int_x",
    "int_t",
    "substitute",
    "eliminate_t",
    "is_zero",
    "parse",
    "parse_jet",
    "render",
    "frechet",
    "declare_param",
    "sum_exprs",
]


class DiffRingError(Exception):
    pass


class NonIntegrable(DiffRingError):
    pass


class UnprolongableAntiderivative(DiffRingError):
    pass


class NotInvertible(DiffRingError):
    pass


# --------------------------------------------------------------------------
# base registry

_COORDS = {"x": frozenset("x"), "t": frozenset("t")}

_BASES: dict[str, frozenset] = {}
_lock = threading.Lock()


def register_base(name: str, depends: str = "xt") -> None:
    """Declare a jet base and the independent variables it depends on.

    ``depends`` is any subset of ``"xt"``; an empty string declares an
    x- and t-constant symbol. Re-registering with a different dependency is
    an error.
    """
    if not re.fullmatch(r"[A-Za-z][A-Za-z0-9]*", name) or name in _COORDS:
        raise ValueError(f"invalid base name {name!r}")
    deps = frozenset(depends)
    if not deps <= {"x", "t"}:
        raise ValueError(f"invalid dependency {depends!r}")
    with _lock:
        old = _BASES.get(name)
        if old is not None and old != deps:
            raise ValueError(f"base {name!r} already registered with {''.join(sorted(old))!r}")
        _BASES[name] = deps


def base_depends(name: str) -> frozenset:
    if name in _COORDS:
        return _COORDS[name]
    try:
        return _BASES[name]
    except KeyError:
        raise DiffRingError(f"unregistered jet base {name!r}") from None


for _b in ("w", "u", "v", "sigma", "phi", "psi", "a0", "a1", "b0", "b1", "b2", "b3", "f", "g"):
    register_base(_b, "xt")
for _b in ("alpha", "beta"):
    register_base(_b, "t")


class JetVar(NamedTuple):
    """A jet: ``base`` differentiated or integrated in x and t.

    Field order gives the canonical ordering (base, then orders).
    """

    base: str
    x_order: int = 0
    t_order: int = 0
    antider_x: int = 0
    antider_t: int = 0

    @property
    def x_rank(self) -> int:
        return self.x_order - self.antider_x

    @property
    def t_rank(self) -> int:
        return self.t_order - self.antider_t

    def __str__(self) -> str:
        return _render_jet(self)


def _make_jet(base: str, xr: int, tr: int) -> JetVar:
    """Jet from signed orders (negative = antiderivatives)."""
    return JetVar(base, max(xr, 0), max(tr, 0), max(-xr, 0), max(-tr, 0))


# --------------------------------------------------------------------------
# coefficients

_PARAM_NAMES: list[str] = ["a1", "a2", "alpha", "b3", "beta", "c", "k", "lam", "mu", "nu"]
_field_state: dict = {}


def _build_field():
    K, *gens = field(",".join(_PARAM_NAMES), QQ)
    _field_state["K"] = K
    _field_state["gens"] = dict(zip(_PARAM_NAMES, gens))


_build_field()


def declare_param(name: str) -> None:
    """Add a constant parameter symbol to the coefficient field."""
    if not re.fullmatch(r"[A-Za-z][A-Za-z0-9]*", name):
        raise ValueError(f"invalid parameter name {name!r}")
    with _lock:
        if name not in _PARAM_NAMES:
            _PARAM_NAMES.append(name)
            _build_field()


Coef = Union[Fraction, FracElement]


def _field():
    return _field_state["K"]


def _lift(c: Coef) -> FracElement:
    K = _field()
    if isinstance(c, FracElement):
        return c if c.field == K else c.set_field(K)
    return K(QQ(c.numerator, c.denominator))


def _qq(x) -> Fraction:
    return Fraction(int(x.numerator), int(x.denominator))


def _demote(c: FracElement) -> Coef:
    # constant field elements are stored as Fractions so equality stays syntactic
    if not c.numer:
        return Fraction(0)
    if c.numer.is_ground and c.denom.is_ground:
        return _qq(c.numer.LC) / _qq(c.denom.LC)
    return c


def _cadd(a: Coef, b: Coef) -> Coef:
    if type(a) is Fraction and type(b) is Fraction:
        return a + b
    return _demote(_lift(a) + _lift(b))


def _cmul(a: Coef, b: Coef) -> Coef:
    if type(a) is Fraction and type(b) is Fraction:
        return a * b
    return _demote(_lift(a) * _lift(b))


def _cinv(a: Coef) -> Coef:
    if type(a) is Fraction:
        return 1 / a
    return _demote(1 / _lift(a))


def _cis_zero(a: Coef) -> bool:
    return not a


def _coef_str(c: Coef) -> str:
    if type(c) is Fraction:
        return str(c)
    return "(" + str(c) + ")"


def _coef_parse(s: str) -> Coef:
    syms = {n: sympy.Symbol(n) for n in _PARAM_NAMES}
    expr = sympy.parse_expr(s, local_dict=syms, evaluate=True)
    unknown = expr.free_symbols - set(syms.values())
    if unknown:
        raise DiffRingError(f"unknown parameters {sorted(map(str, unknown))}")
    return _demote(_field().from_expr(expr)) if expr.free_symbols else Fraction(str(sympy.Rational(expr)))


def _coef_value(c: Coef, params: Mapping[str, complex]):
    if type(c) is Fraction:
        return c
    expr = c.as_expr()
    return complex(expr.subs({sympy.Symbol(k): v for k, v in params.items()}))


# --------------------------------------------------------------------------
# monomials: sorted tuples of (JetVar, nonzero int exponent)

Monomial = tuple


def _mono_mul(m1: Monomial, m2: Monomial) -> Monomial:
    if not m1:
        return m2
    if not m2:
        return m1
    d = dict(m1)
    for v, e in m2:
        ne = d.get(v, 0) + e
        if ne:
            d[v] = ne
        else:
            d.pop(v, None)
    return tuple(sorted(d.items()))


def _mono_pow(m: Monomial, k: int) -> Monomial:
    return tuple((v, e * k) for v, e in m) if k else ()


def _mono_without(m: Monomial, v: JetVar) -> tuple[int, Monomial]:
    for i, (w, e) in enumerate(m):
        if w == v:
            return e, m[:i] + m[i + 1 :]
    return 0, m


# --------------------------------------------------------------------------
# DiffExpr


class DiffExpr:
    """Immutable normalized differential polynomial.

    ``terms`` maps a monomial (sorted tuple of ``(JetVar, exponent)``) to a
    nonzero coefficient.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping | None = None):
        clean = {}
        if terms:
            for m, c in terms.items():
                if not isinstance(c, FracElement):
                    c = Fraction(c)
                else:
                    c = _demote(c)
                if not _cis_zero(c):
                    clean[m] = c
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict) -> "DiffExpr":
        obj = cls.__new__(cls)
        obj._terms = terms
        obj._hash = None
        return obj

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    # ---- conversion
    @staticmethod
    def lift(x) -> "DiffExpr":
        if isinstance(x, DiffExpr):
            return x
        if isinstance(x, JetVar):
            return DiffExpr._raw({((x, 1),): Fraction(1)})
        if isinstance(x, (int, Fraction)):
            return DiffExpr({(): Fraction(x)})
        if isinstance(x, FracElement):
            return DiffExpr({(): x})
        raise TypeError(f"cannot convert {type(x).__name__} to DiffExpr")

    # ---- ring operations
    def __add__(self, other):
        try:
            other = DiffExpr.lift(other)
        except TypeError:
            return NotImplemented
        if len(other._terms) > len(self._terms):
            a, b = other, self
        else:
            a, b = self, other
        out = dict(a._terms)
        for m, c in b._terms.items():
            if m in out:
                s = _cadd(out[m], c)
                if _cis_zero(s):
                    del out[m]
                else:
                    out[m] = s
            else:
                out[m] = c
        return DiffExpr._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return DiffExpr._raw({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        try:
            other = DiffExpr.lift(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return DiffExpr.lift(other) - self

    def __mul__(self, other):
        try:
            other = DiffExpr.lift(other)
        except TypeError:
            return NotImplemented
        out: dict = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = _mono_mul(m1, m2)
                c = _cmul(c1, c2)
                if m in out:
                    s = _cadd(out[m], c)
                    if _cis_zero(s):
                        del out[m]
                    else:
                        out[m] = s
                else:
                    out[m] = c
        return DiffExpr._raw(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = DiffExpr.lift(other)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return DiffExpr.lift(other) * self.inverse()

    def inverse(self) -> "DiffExpr":
        """Inverse of a single-term expression (Laurent monomial)."""
        if len(self._terms) != 1:
            raise NotInvertible(f"{self} is not a unit")
        ((m, c),) = self._terms.items()
        return DiffExpr._raw({_mono_pow(m, -1): _cinv(c)})

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result = DiffExpr.lift(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    # ---- comparison
    def __eq__(self, other):
        try:
            other = DiffExpr.lift(other)
        except TypeError:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset((m, str(c)) for m, c in self._terms.items()))
        return self._hash

    def __bool__(self):
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    # ---- inspection
    def jets(self) -> set[JetVar]:
        return {v for m in self._terms for v, _ in m}

    def bases(self) -> set[str]:
        return {v.base for v in self.jets()}

    def is_constant(self) -> bool:
        return all(not m for m in self._terms)

    def constant_value(self) -> Coef:
        return self._terms.get((), Fraction(0))

    def degree_in(self, v: JetVar) -> tuple[int, int]:
        """(min, max) exponent of ``v`` over all terms."""
        exps = [dict(m).get(v, 0) for m in self._terms] or [0]
        return min(exps), max(exps)

    def coeff(self, v: JetVar, k: int = 1) -> "DiffExpr":
        """Coefficient of ``v**k`` viewing self as a Laurent polynomial in ``v``."""
        out = {}
        for m, c in self._terms.items():
            e, rest = _mono_without(m, v)
            if e == k:
                out[rest] = c
        return DiffExpr._raw(out)

    def partial(self, v: JetVar) -> "DiffExpr":
        """Partial derivative treating ``v`` as an independent variable."""
        out: dict = {}
        for m, c in self._terms.items():
            e, rest = _mono_without(m, v)
            if e:
                nm = _mono_mul(rest, ((v, e - 1),)) if e != 1 else rest
                cc = _cmul(c, Fraction(e))
                if nm in out:
                    s = _cadd(out[nm], cc)
                    if _cis_zero(s):
                        del out[nm]
                    else:
                        out[nm] = s
                else:
                    out[nm] = cc
        return DiffExpr._raw(out)

    def items(self):
        return sorted(self._terms.items(), key=lambda mc: _mono_key(mc[0]))

    def __len__(self):
        return len(self._terms)

    # ---- rendering
    def __str__(self):
        return render(self)

    def __repr__(self):
        return f"DiffExpr({render(self)!r})"

    # ---- calculus shortcuts
    def dx(self, n: int = 1) -> "DiffExpr":
        e = self
        for _ in range(n):
            e = d_x(e)
        return e

    def dt(self, n: int = 1) -> "DiffExpr":
        e = self
        for _ in range(n):
            e = d_t(e)
        return e

    def evaluate(self, values: Mapping, params: Mapping | None = None):
        """Numeric value given arrays/numbers for each jet and parameter.

        ``values`` maps JetVar (or its rendered string) to numbers or numpy
        arrays; the coordinates ``x`` and ``t`` are looked up the same way.
        """
        params = params or {}
        lookup = {}
        for k, val in values.items():
            lookup[k if isinstance(k, JetVar) else parse_jet(k)] = val
        total = 0
        for m, c in self._terms.items():
            term = _coef_value(c, params)
            if type(term) is Fraction:
                term = float(term)
            elif term.imag == 0:
                term = term.real
            for v, e in m:
                if v not in lookup:
                    raise KeyError(f"no value for jet {v}")
                term = term * lookup[v] ** e
            total = total + term
        return total


def _mono_key(m: Monomial):
    deg = sum(e for _, e in m)
    return (-len(m) if m else 0, deg, m)


# --------------------------------------------------------------------------
# constructors


def jet(base: str, x: int = 0, t: int = 0) -> DiffExpr:
    base_depends(base)
    if x < 0 or t < 0:
        return DiffExpr.lift(_make_jet(base, x, t)) if base not in _COORDS else _bad_coord()
    return d_x(d_t(DiffExpr.lift(JetVar(base)), t), x) if (x or t) else DiffExpr.lift(JetVar(base))


def _bad_coord():
    raise DiffRingError("coordinates have no antiderivative jets")


def const(value) -> DiffExpr:
    return DiffExpr.lift(Fraction(value) if not isinstance(value, FracElement) else value)


def param(name: str) -> DiffExpr:
    """A constant parameter as a coefficient (e.g. ``b3``, ``a2``)."""
    if name not in _PARAM_NAMES:
        declare_param(name)
    return DiffExpr({(): _field_state["gens"][name]})


def coord(name: str = "x") -> DiffExpr:
    if name not in _COORDS:
        raise DiffRingError(f"unknown coordinate {name!r}")
    return DiffExpr.lift(JetVar(name))


# --------------------------------------------------------------------------
# derivations


def _jet_d(v: JetVar, var: str):
    """Derivative of a single jet: returns a JetVar, 1, or None (zero)."""
    deps = base_depends(v.base)
    if var not in deps:
        return None
    if v.base in _COORDS:
        return 1
    if var == "x":
        if v.antider_x:
            return v._replace(antider_x=v.antider_x - 1)
        return v._replace(x_order=v.x_order + 1)
    if v.antider_t:
        return v._replace(antider_t=v.antider_t - 1)
    return v._replace(t_order=v.t_order + 1)


def _derive(e: DiffExpr, var: str) -> DiffExpr:
    out: dict = {}
    cache: dict = {}
    for m, c in e._terms.items():
        for i, (v, k) in enumerate(m):
            if v not in cache:
                cache[v] = _jet_d(v, var)
            dv = cache[v]
            if dv is None:
                continue
            rest = m[:i] + m[i + 1 :]
            if k != 1:
                rest = _mono_mul(rest, ((v, k - 1),))
            nm = rest if dv == 1 else _mono_mul(rest, ((dv, 1),))
            cc = _cmul(c, Fraction(k))
            if nm in out:
                s = _cadd(out[nm], cc)
                if _cis_zero(s):
                    del out[nm]
                else:
                    out[nm] = s
            else:
                out[nm] = cc
    return DiffExpr._raw(out)


def d_x(e, n: int = 1) -> DiffExpr:
    """Total x-derivative (Leibniz rule; antiderivative markers cancel)."""
    e = DiffExpr.lift(e)
    for _ in range(n):
        e = _derive(e, "x")
    return e


def d_t(e, n: int = 1) -> DiffExpr:
    """Total t-derivative."""
    e = DiffExpr.lift(e)
    for _ in range(n):
        e = _derive(e, "t")
    return e


def _rank(v: JetVar, var: str):
    if var == "x":
        return (v.x_rank, v.base, v.t_rank)
    return (v.t_rank, v.base, v.x_rank)


def _pred(v: JetVar, var: str) -> JetVar:
    if var == "x":
        return _make_jet(v.base, v.x_rank - 1, v.t_rank)
    return _make_jet(v.base, v.x_rank, v.t_rank - 1)


def _integrate(e: DiffExpr, var: str, max_iter: int = 10_000) -> DiffExpr:
    """Antiderivative by successive removal of the highest-ranked jet.

    If ``e = D(F)`` then ``e`` is linear in its top jet ``v`` with
    coefficient ``dF/d(pred v)``; integrating that coefficient in
    ``pred v`` and subtracting ``D`` of the result strictly lowers the top
    rank. Any failure of linearity or of rank descent means ``e`` is not a
    total derivative in this ring.
    """
    e = DiffExpr.lift(e)
    result = DiffExpr()
    derive = d_x if var == "x" else d_t
    last_rank = None
    for _ in range(max_iter):
        if e.is_zero():
            return result
        movers = [v for v in e.jets() if var in base_depends(v.base) and v.base not in _COORDS]
        if not movers:
            return result + _integrate_coordinate(e, var)
        v = max(movers, key=lambda j: _rank(j, var))
        r = _rank(v, var)
        if last_rank is not None and r >= last_rank:
            raise NonIntegrable(f"no antiderivative for expression with top jet {v}")
        last_rank = r
        lo, hi = e.degree_in(v)
        if lo < 0 or hi > 1:
            raise NonIntegrable(f"not linear in top jet {v}")
        A = e.coeff(v, 1)
        for u in A.jets():
            if var in base_depends(u.base) and u.base not in _COORDS and _rank(u, var)[0] >= r[0]:
                raise NonIntegrable(f"coefficient of {v} contains {u}")
        p = _pred(v, var)
        F = DiffExpr()
        for m, c in A._terms.items():
            k, rest = _mono_without(m, p)
            if k == -1:
                raise NonIntegrable(f"logarithmic antiderivative in {p}")
            F = F + DiffExpr._raw({_mono_mul(rest, ((p, k + 1),)): _cmul(c, Fraction(1, k + 1))})
        result = result + F
        e = e - derive(F)
    raise NonIntegrable("integration did not terminate")


def _integrate_coordinate(e: DiffExpr, var: str) -> DiffExpr:
    X = JetVar(var)
    out = DiffExpr()
    for m, c in e._terms.items():
        k, rest = _mono_without(m, X)
        if k == -1:
            raise NonIntegrable(f"logarithmic antiderivative in {var}")
        out = out + DiffExpr._raw({_mono_mul(rest, ((X, k + 1),)): _cmul(c, Fraction(1, k + 1))})
    return out


def int_x(e) -> DiffExpr:
    """Formal x-antiderivative with zero integration constant."""
    return _integrate(DiffExpr.lift(e), "x")


def int_t(e) -> DiffExpr:
    """Formal t-antiderivative with zero integration constant."""
    return _integrate(DiffExpr.lift(e), "t")


# --------------------------------------------------------------------------
# substitution


def _map_jets(e: DiffExpr, replace: Callable[[JetVar], DiffExpr | None]) -> DiffExpr:
    cache: dict = {}
    out = DiffExpr()
    for m, c in e._terms.items():
        term = DiffExpr._raw({(): c})
        keep = []
        for v, k in m:
            if v not in cache:
                cache[v] = replace(v)
            r = cache[v]
            if r is None:
                keep.append((v, k))
            else:
                term = term * (r**k)
        if keep:
            term = term * DiffExpr._raw({tuple(keep): Fraction(1)})
        out = out + term
    return out


def _prolong(rule: DiffExpr, v: JetVar) -> DiffExpr:
    r = rule
    r = d_t(r, v.t_order) if v.t_order else r
    r = d_x(r, v.x_order) if v.x_order else r
    try:
        for _ in range(v.antider_t):
            r = int_t(r)
        for _ in range(v.antider_x):
            r = int_x(r)
    except NonIntegrable as exc:
        raise UnprolongableAntiderivative(f"cannot substitute into {v}: {exc}") from None
    return r


def substitute(e, rules: Mapping[str, object]) -> DiffExpr:
    """Replace jet bases by expressions, prolonging to all derivative jets."""
    e = DiffExpr.lift(e)
    rules = {k: DiffExpr.lift(v) for k, v in rules.items()}

    def rep(v: JetVar):
        if v.base in rules:
            return _prolong(rules[v.base], v)
        return None

    return _map_jets(e, rep)


def eliminate_t(e, base: str, rhs) -> DiffExpr:
    """Eliminate t-derivatives of ``base`` using the evolution law ``base_t = rhs``.

    Every jet of ``base`` with ``t_order >= 1`` is rewritten by repeated use
    of the law; x-derivatives and x-antiderivatives are prolonged.
    """
    rhs = DiffExpr.lift(rhs)
    tower: dict[int, DiffExpr] = {}

    def level(j: int) -> DiffExpr:
        if j not in tower:
            if j == 1:
                tower[j] = reduce(rhs)
            else:
                tower[j] = reduce(d_t(level(j - 1)))
        return tower[j]

    def rep(v: JetVar):
        if v.base != base or v.t_order == 0:
            return None
        r = level(v.t_order)
        r = d_x(r, v.x_order) if v.x_order else r
        try:
            for _ in range(v.antider_x):
                r = int_x(r)
        except NonIntegrable as exc:
            raise UnprolongableAntiderivative(f"cannot eliminate {v}: {exc}") from None
        return r

    def reduce(x: DiffExpr) -> DiffExpr:
        if not any(v.base == base and v.t_order for v in x.jets()):
            return x
        return _map_jets(x, rep)

    return reduce(DiffExpr.lift(e))


def is_zero(e) -> bool:
    return DiffExpr.lift(e).is_zero()


def frechet(e, base: str, direction) -> DiffExpr:
    """Linearization of ``e`` in the field ``base`` along ``direction``.

    Sum over the jets ``v`` of ``base`` occurring in ``e`` of
    ``de/dv`` times the matching derivative or antiderivative of
    ``direction``.
    """
    e = DiffExpr.lift(e)
    direction = DiffExpr.lift(direction)
    total = DiffExpr()
    for v in sorted(e.jets()):
        if v.base == base:
            total = total + e.partial(v) * _prolong(direction, v)
    return total


# --------------------------------------------------------------------------
# text form


def _render_jet(v: JetVar) -> str:
    s = v.base
    if v.x_order or v.t_order:
        s += "_" + "x" * v.x_order + "t" * v.t_order
    for tag, k in (("It", v.antider_t), ("Ix", v.antider_x)):
        if k:
            s = f"{tag}{k if k > 1 else ''}({s})"
    return s


def _render_mono(m: Monomial) -> str:
    parts = []
    for v, e in m:
        s = _render_jet(v)
        parts.append(s if e == 1 else f"{s}^{e}")
    return "*".join(parts)


def render(e: DiffExpr) -> str:
    """Deterministic text form, parseable by :func:`parse`."""
    if not e._terms:
        return "0"
    out = []
    for m, c in e.items():
        neg = type(c) is Fraction and c < 0
        cc = -c if neg else c
        mono = _render_mono(m)
        if not mono:
            body = _coef_str(cc)
        elif cc == 1:
            body = mono
        else:
            body = _coef_str(cc) + "*" + mono
        if not out:
            out.append(("-" if neg else "") + body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out)


_JET_RE = re.compile(r"(?:(Ix|It)(\d*)\()*([A-Za-z][A-Za-z0-9]*)(?:_([xt]+))?\)*")


def parse_jet(s: str) -> JetVar:
    s = s.strip()
    ax = at = 0
    while True:
        m = re.match(r"(Ix|It)(\d*)\((.*)\)$", s)
        if not m:
            break
        k = int(m.group(2) or 1)
        if m.group(1) == "Ix":
            ax += k
        else:
            at += k
        s = m.group(3)
    m = re.fullmatch(r"([A-Za-z][A-Za-z0-9]*)(?:_([xt]+))?", s)
    if not m:
        raise DiffRingError(f"bad jet {s!r}")
    base, suff = m.group(1), m.group(2) or ""
    base_depends(base)
    xo, to = suff.count("x"), suff.count("t")
    if suff != "x" * xo + "t" * to:
        raise DiffRingError(f"non-canonical jet suffix in {s!r}")
    if (ax and xo) or (at and to):
        raise DiffRingError(f"antiderivative of a derivative in {s!r}")
    return JetVar(base, xo, to, ax, at)


def _split_top(s: str, seps: str) -> list[tuple[str, str]]:
    """Split at top-level separator characters, keeping the separator."""
    parts, depth, cur, sep = [], 0, [], ""
    i = 0
    while i < len(s):
        ch = s[i]
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if depth == 0 and ch in seps and (ch != "-" or (cur and s[i - 1] not in "^*/(")):
            parts.append((sep, "".join(cur)))
            sep, cur = ch, []
        else:
            cur.append(ch)
        i += 1
    parts.append((sep, "".join(cur)))
    return parts


def parse(text: str) -> DiffExpr:
    """Inverse of :func:`render`."""
    text = text.strip()
    if text == "0":
        return DiffExpr()
    total = DiffExpr()
    for sign, term in _split_top(text, "+-"):
        term = term.strip()
        if not term:
            if sign:
                raise DiffRingError(f"empty term in {text!r}")
            continue
        val = _parse_term(term)
        total = total - val if sign == "-" else total + val
    return total


_NUM_RE = re.compile(r"-?\d+(?:/\d+)?")


def _parse_term(term: str) -> DiffExpr:
    neg = term.startswith("-")
    if neg:
        term = term[1:]
    result = DiffExpr.lift(1)
    for _, factor in _split_top(term, "*"):
        factor = factor.strip()
        if factor.startswith("(") and factor.endswith(")") and _balanced(factor[1:-1]):
            result = result * DiffExpr({(): _coef_parse(factor[1:-1])})
        elif _NUM_RE.fullmatch(factor):
            result = result * DiffExpr.lift(Fraction(factor))
        else:
            base, _, exp = factor.rpartition("^") if re.search(r"\^-?\d+$", factor) else (factor, "", "1")
            v = parse_jet(base)
            result = result * DiffExpr._raw({((v, int(exp)),): Fraction(1)})
    return -result if neg else result


def _balanced(s: str) -> bool:
    depth = 0
    for ch in s:
        depth += ch == "("
        depth -= ch == ")"
        if depth < 0:
            return False
    return depth == 0


def symbols(*names: str) -> tuple[DiffExpr, ...]:
    return tuple(jet(n) for n in names)


def sum_exprs(items: Iterable) -> DiffExpr:
    total = DiffExpr()
    for it in items:
        total = total + it
    return total
