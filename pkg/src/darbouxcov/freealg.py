"""Free noncommutative polynomials with central parameters.

A term is a word over an alphabet of noncommuting letters times a monomial
in central parameters times an exact rational. Central monomials can be
rewritten by relations such as ``beta^2 -> alpha^3``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping

import numpy as np

__all__ = [
    "NCPoly",
    "NonlinearPotential",
    "RelationNotConfluent",
    "Relation",
    "gen",
    "central",
    "nc_mul",
    "nc_commutator",
    "symmetric_poly",
    "covariance_residual",
    "combination_check",
    "power_sum_check",
    "parse_relation",
]


class NonlinearPotential(ValueError):
    pass


class RelationNotConfluent(ValueError):
    pass


def _cm_mul(a: tuple, b: tuple) -> tuple:
    d = dict(a)
    for k, e in b:
        d[k] = d.get(k, 0) + e
    return tuple(sorted((k, e) for k, e in d.items() if e))


def _cm_str(cm: tuple) -> str:
    return "*".join(k if e == 1 else f"{k}^{e}" for k, e in cm)


class NCPoly:
    """Immutable; ``terms`` maps ``(word, central_monomial)`` to a Fraction."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping | None = None):
        clean = {}
        for key, c in (terms or {}).items():
            c = Fraction(c)
            if c:
                clean[key] = clean.get(key, 0) + c
        self.terms = {k: v for k, v in clean.items() if v}

    @staticmethod
    def lift(x) -> "NCPoly":
        if isinstance(x, NCPoly):
            return x
        return NCPoly({((), ()): Fraction(x)})

    def __add__(self, other):
        other = NCPoly.lift(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return NCPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return NCPoly({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-NCPoly.lift(other))

    def __rsub__(self, other):
        return NCPoly.lift(other) - self

    def __mul__(self, other):
        return nc_mul(self, NCPoly.lift(other))

    def __rmul__(self, other):
        return nc_mul(NCPoly.lift(other), self)

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers are not defined")
        out = NCPoly.lift(1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        try:
            other = NCPoly.lift(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self):
        return len(self.terms)

    def words(self) -> set:
        return {w for w, _ in self.terms}

    def letters(self) -> set:
        return {a for w, _ in self.terms for a in w}

    def degree_in(self, letter: str) -> tuple[int, int]:
        counts = [w.count(letter) for w, _ in self.terms] or [0]
        return min(counts), max(counts)

    def homogeneous_part(self, letter: str, degree: int) -> "NCPoly":
        return NCPoly({k: c for k, c in self.terms.items() if k[0].count(letter) == degree})

    def subs(self, rules: Mapping[str, "NCPoly"]) -> "NCPoly":
        """Algebra homomorphism sending letters to polynomials."""
        rules = {k: NCPoly.lift(v) for k, v in rules.items()}
        total = NCPoly()
        for (w, cm), c in self.terms.items():
            term = NCPoly({((), cm): c})
            for a in w:
                term = term * (rules[a] if a in rules else gen(a))
            total = total + term
        return total

    def subs_central(self, values: Mapping[str, object]) -> "NCPoly":
        """Substitute rational values for central parameters."""
        out = {}
        for (w, cm), c in self.terms.items():
            keep = []
            for k, e in cm:
                if k in values:
                    c = c * Fraction(values[k]) ** e
                else:
                    keep.append((k, e))
            key = (w, tuple(keep))
            out[key] = out.get(key, 0) + c
        return NCPoly(out)

    def reduce(self, relations, max_steps: int = 10_000) -> "NCPoly":
        """Normal form under central rewrite rules (see ``Relation``)."""
        relations = list(relations)
        if not relations:
            return self
        a = _rewrite(self, relations, max_steps)
        b = _rewrite(self, relations[::-1], max_steps)
        if a != b:
            raise RelationNotConfluent(f"rewrite order changes the normal form: {a} vs {b}")
        return a

    def evaluate(self, values: Mapping[str, np.ndarray], params: Mapping[str, complex] | None = None):
        """Matrix value; every letter must be bound in ``values``."""
        params = params or {}
        n = next(iter(values.values())).shape[0]
        eye = np.eye(n, dtype=complex)
        total = np.zeros((n, n), dtype=complex)
        for (w, cm), c in self.terms.items():
            s = complex(c)
            for k, e in cm:
                s *= complex(params[k]) ** e
            m = eye
            for a in w:
                m = m @ values[a]
            total = total + s * m
        return total

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for (w, cm), c in sorted(self.terms.items(), key=lambda kv: (len(kv[0][0]), kv[0])):
            word = "*".join(w)
            cms = _cm_str(cm)
            body = "*".join(p for p in (cms, word) if p)
            if not body:
                parts.append(str(c))
            elif c == 1:
                parts.append(body)
            elif c == -1:
                parts.append("-" + body)
            else:
                parts.append(f"{c}*{body}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return f"NCPoly({str(self)!r})"


def gen(letter: str) -> NCPoly:
    return NCPoly({((letter,), ()): 1})


def central(name: str) -> NCPoly:
    """A parameter commuting with every letter."""
    return NCPoly({((), ((name, 1),)): 1})


def nc_mul(p: NCPoly, q: NCPoly) -> NCPoly:
    out: dict = {}
    for (w1, c1), a in p.terms.items():
        for (w2, c2), b in q.terms.items():
            key = (w1 + w2, _cm_mul(c1, c2))
            out[key] = out.get(key, 0) + a * b
    return NCPoly(out)


def nc_commutator(p: NCPoly, q: NCPoly) -> NCPoly:
    p, q = NCPoly.lift(p), NCPoly.lift(q)
    return nc_mul(p, q) - nc_mul(q, p)


# --------------------------------------------------------------------------
# central relations


class Relation:
    """Rewrite ``lhs -> rhs`` on central monomials, e.g. ``beta^2 -> alpha^3``."""

    def __init__(self, lhs: dict, rhs: dict, coeff=1):
        self.lhs = tuple(sorted((k, e) for k, e in lhs.items() if e))
        self.rhs = tuple(sorted((k, e) for k, e in rhs.items() if e))
        self.coeff = Fraction(coeff)
        if not self.lhs:
            raise ValueError("relation needs a nonconstant left side")

    def divides(self, cm: tuple) -> bool:
        d = dict(cm)
        return all(d.get(k, 0) >= e for k, e in self.lhs)

    def apply(self, cm: tuple) -> tuple:
        d = dict(cm)
        for k, e in self.lhs:
            d[k] -= e
        return _cm_mul(tuple(sorted((k, e) for k, e in d.items() if e)), self.rhs)

    def __repr__(self):
        return f"Relation({_cm_str(self.lhs)} -> {self.coeff}*{_cm_str(self.rhs) or 1})"


def parse_relation(text: str) -> Relation:
    """``"beta^2 -> alpha^3"`` style rules."""
    lhs, rhs = (s.strip() for s in text.split("->"))

    def mono(s):
        out: dict = {}
        coeff = Fraction(1)
        for f in s.split("*"):
            f = f.strip()
            if not f or f == "1":
                continue
            name, _, e = f.partition("^")
            try:
                coeff *= Fraction(name)
                continue
            except ValueError:
                pass
            out[name] = out.get(name, 0) + int(e or 1)
        return out, coeff

    (l, lc), (r, rc) = mono(lhs), mono(rhs)
    return Relation(l, r, rc / lc)


def _rewrite(p: NCPoly, relations, max_steps) -> NCPoly:
    terms = dict(p.terms)
    for _ in range(max_steps):
        hit = None
        for (w, cm), c in terms.items():
            for r in relations:
                if r.divides(cm):
                    hit = (w, cm, c, r)
                    break
            if hit:
                break
        if hit is None:
            return NCPoly(terms)
        w, cm, c, r = hit
        del terms[(w, cm)]
        key = (w, r.apply(cm))
        terms[key] = terms.get(key, 0) + c * r.coeff
        if not terms[key]:
            del terms[key]
    raise RelationNotConfluent(f"rewriting did not terminate within {max_steps} steps")


# --------------------------------------------------------------------------
# covariance identities


def symmetric_poly(n: int, H: NCPoly | str = "H", u: str = "u") -> NCPoly:
    """``sum_{p=0}^n H^(n-p) u H^p``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    H = gen(H) if isinstance(H, str) else H
    U = gen(u)
    return sum((H ** (n - p) * U * H**p for p in range(n + 1)), NCPoly())


def covariance_residual(F: NCPoly, Y: NCPoly, J: NCPoly, u: str = "u", sigma: str = "sigma") -> NCPoly:
    """``F(u + [J, s]) - F(u) - [Y, s]`` expanded over words."""
    if F.degree_in(u)[1] > 1:
        raise NonlinearPotential(f"potential has degree {F.degree_in(u)[1]} in {u!r}")
    S = gen(sigma)
    shifted = F.subs({u: gen(u) + nc_commutator(J, S)})
    return shifted - F - nc_commutator(Y, S)


def combination_check(alpha=None, beta=None, relations=None, E=None) -> NCPoly:
    """Residual for ``f = Hu + uH + S^2 u + S u S + u S^2`` with ``Y = A B + C D E``.

    Assignments ``A = B = J = H``, ``C = D = alpha H``, ``S = beta H`` and,
    by default, ``E = alpha H``. ``alpha``/``beta`` default to central
    symbols; pass rationals for numeric instances.
    """
    H = gen("H")
    al = central("alpha") if alpha is None else NCPoly.lift(alpha)
    be = central("beta") if beta is None else NCPoly.lift(beta)
    A = B = J = H
    C = D = al * H
    E = al * H if E is None else E
    S = be * H
    f = symmetric_poly(1) + symmetric_poly(2, S)
    Y = A * B + C * D * E
    res = covariance_residual(f, Y, J)
    if relations is None:
        relations = [Relation({"beta": 2}, {"alpha": 3})] if beta is None else []
    return res.reduce(relations)


def power_sum_check(N: int, relation: str = "natural") -> NCPoly:
    """Residual for ``sum_n P_n(beta_n H, u)`` with ``Y = sum_n (alpha_n H)^(n+1)``.

    ``alpha_1 = beta_1 = 1``. ``relation="natural"`` rewrites
    ``beta_n^n -> alpha_n^(n+1)`` (n=2 gives the ``alpha^3 = beta^2`` link);
    ``relation="printed"`` rewrites ``beta_n^(n+1) -> alpha_n^(n+2)``.
    """
    H = gen("H")
    F, Y, rels = NCPoly(), NCPoly(), []
    for n in range(1, N + 1):
        if n == 1:
            a = b = NCPoly.lift(1)
        else:
            a, b = central(f"alpha{n}"), central(f"beta{n}")
            if relation == "natural":
                rels.append(Relation({f"beta{n}": n}, {f"alpha{n}": n + 1}))
            elif relation == "printed":
                rels.append(Relation({f"beta{n}": n + 1}, {f"alpha{n}": n + 2}))
            else:
                raise ValueError(f"unknown relation {relation!r}")
        F = F + symmetric_poly(n, b * H)
        Y = Y + (a * H) ** (n + 1)
    return covariance_residual(F, Y, H).reduce(rels)
