"""Dense-matrix checks for the non-Abelian constructions.

Matrices are plain complex ``numpy`` arrays; ``mat_dense`` validates them.
Potentials are ``NCPoly`` in the letters ``H`` and ``u``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dressing import GridTooSmall, stencil_derivative
from .freealg import NCPoly, gen, symmetric_poly

__all__ = [
    "ZSError",
    "DimensionMismatch",
    "StepRejected",
    "DegenerateEigenvalue",
    "OrthogonalPair",
    "mat_dense",
    "random_hermitian",
    "potential",
    "dt_potential",
    "covariance_residual_numeric",
    "euler_rhs",
    "euler_step",
    "euler_integrate",
    "drift_order",
    "EulerTrajectory",
    "ZS_VARIANTS",
    "zs_compatibility_residual",
    "zero_seed_zs",
    "ProjectorDT",
    "projector_dt",
    "FrechetReport",
    "frechet_left",
    "frechet_right",
    "frechet_symmetric",
    "remainder_exponent",
    "read_matrix",
    "write_matrix",
]


class ZSError(Exception):
    pass


class DimensionMismatch(ZSError):
    pass


class StepRejected(ZSError):
    pass


class DegenerateEigenvalue(ZSError):
    pass


class OrthogonalPair(ZSError):
    pass


def mat_dense(a, hermitian: bool = False, tol: float = 1e-12) -> np.ndarray:
    m = np.array(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    if hermitian and np.max(np.abs(m - m.conj().T), initial=0.0) > tol * max(1.0, np.abs(m).max()):
        raise ValueError("matrix is not Hermitian")
    return m


def random_hermitian(n: int, rng: np.random.Generator) -> np.ndarray:
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (a + a.conj().T) / 2


def _check_dims(*ms):
    shapes = {m.shape for m in ms}
    if len(shapes) != 1:
        raise DimensionMismatch(f"shapes differ: {sorted(shapes)}")


def potential(spec) -> NCPoly:
    """``"P3"`` -> ``P_3(H, u)``, ``"u2"`` -> ``u^2``; NCPoly passes through."""
    if isinstance(spec, NCPoly):
        return spec
    s = str(spec).strip()
    if s[:1] in ("P", "p") and s[1:].isdigit():
        return symmetric_poly(int(s[1:]))
    if s == "u2":
        return gen("u") * gen("u")
    raise ValueError(f"unknown potential {spec!r}")


def _comm(a, b):
    return a @ b - b @ a


def dt_potential(u, J, sigma) -> np.ndarray:
    """``u + [J, s]``."""
    u, J, sigma = (np.asarray(m) for m in (u, J, sigma))
    _check_dims(u, J, sigma)
    return u + _comm(J, sigma)


def covariance_residual_numeric(F, Y, J, u, sigma, H) -> float:
    """Max-abs entry of ``F(u + [J, s]) - F(u) - [Y, s]``."""
    F = potential(F)
    Y, J, u, sigma, H = (np.asarray(m, dtype=complex) for m in (Y, J, u, sigma, H))
    _check_dims(Y, J, u, sigma, H)
    ev = lambda v: F.evaluate({"H": H, "u": v})
    r = ev(dt_potential(u, J, sigma)) - ev(u) - _comm(Y, sigma)
    return float(np.max(np.abs(r)))


# --------------------------------------------------------------------------
# Euler top u_y + [u^2, H] = 0


def euler_rhs(u, H):
    return -_comm(u @ u, H)


def euler_step(u, H, dy):
    """One classical Runge-Kutta step."""
    k1 = euler_rhs(u, H)
    k2 = euler_rhs(u + dy / 2 * k1, H)
    k3 = euler_rhs(u + dy / 2 * k2, H)
    k4 = euler_rhs(u + dy * k3, H)
    return u + dy / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


@dataclass
class EulerTrajectory:
    ys: np.ndarray
    us: np.ndarray  # (steps+1, n, n)
    traces: np.ndarray  # (steps+1, m): tr(u^k), k = 1..max(n, 3)
    eigenvalues: np.ndarray  # (steps+1, n), sorted

    @property
    def trace_drift(self) -> np.ndarray:
        return np.max(np.abs(self.traces - self.traces[0]), axis=0)

    @property
    def eigen_drift(self) -> float:
        return float(np.max(np.abs(self.eigenvalues - self.eigenvalues[0])))

    def report(self) -> dict:
        return {
            "steps": len(self.ys) - 1,
            "trace_drift": {f"tr(u^{k + 1})": float(d) for k, d in enumerate(self.trace_drift)},
            "eigen_drift": self.eigen_drift,
        }


def _invariants(u):
    n = u.shape[0]
    tr, p = [], np.eye(n, dtype=complex)
    for _ in range(max(n, 3)):
        p = p @ u
        tr.append(np.trace(p))
    ev = np.linalg.eigvals(u)
    return np.array(tr), ev[np.lexsort((ev.imag, ev.real))]


def euler_integrate(u0, H, y_span=(0.0, 1.0), dy=1e-3, drift_bound=None) -> EulerTrajectory:
    """RK4 trajectory with per-step conservation checks.

    ``StepRejected`` is raised as soon as a trace invariant drifts more than
    ``drift_bound`` from its initial value.
    """
    u = mat_dense(u0)
    H = mat_dense(H)
    _check_dims(u, H)
    if dy <= 0:
        raise ValueError("dy must be positive")
    y0, y1 = y_span
    steps = int(round((y1 - y0) / dy))
    if steps < 1 or not np.isclose(steps * dy, y1 - y0, rtol=1e-9, atol=1e-12):
        raise ValueError("y_span must be a whole number of steps")
    ys = y0 + dy * np.arange(steps + 1)
    us = np.empty((steps + 1,) + u.shape, dtype=complex)
    trs = np.empty((steps + 1, max(u.shape[0], 3)), dtype=complex)
    evs = np.empty((steps + 1, u.shape[0]), dtype=complex)
    us[0] = u
    trs[0], evs[0] = _invariants(u)
    for i in range(1, steps + 1):
        u = euler_step(u, H, dy)
        us[i] = u
        trs[i], evs[i] = _invariants(u)
        if drift_bound is not None:
            drift = np.max(np.abs(trs[i] - trs[0]))
            if drift > drift_bound:
                raise StepRejected(f"trace drift {drift:.3g} at y={ys[i]:.6g} exceeds {drift_bound:g}; reduce dy")
    return EulerTrajectory(ys, us, trs, evs)


def drift_order(u0, H, y_span=(0.0, 1.0), dys=(0.1, 0.05, 0.025)):
    """Total invariant drift for each step size and the observed orders.

    Orders are ``nan`` where the drift is at rounding level (fixed points).
    """
    drifts = []
    for dy in dys:
        tr = euler_integrate(u0, H, y_span, dy)
        drifts.append(float(max(tr.trace_drift.max(), tr.eigen_drift)))
    orders = []
    for i in range(len(dys) - 1):
        a, b = drifts[i], drifts[i + 1]
        ok = min(a, b) > 1e-14
        orders.append(float(np.log(a / b) / np.log(dys[i] / dys[i + 1])) if ok else float("nan"))
    return drifts, orders


# --------------------------------------------------------------------------
# compatibility of the (t, y) pair with w = Hu + uH, Y = H^2, J = H

ZS_VARIANTS = ("printed", "symmetric", "derived")


def _x_block(variant, H, ux):
    H2 = H @ H
    if variant == "printed":
        return H2 @ ux + H @ ux @ H + H2 @ ux
    if variant == "symmetric":
        return H2 @ ux + H @ ux @ H + ux @ H2
    if variant == "derived":
        return H @ ux @ H
    raise ValueError(f"unknown variant {variant!r}")


def _deriv(u, h, axis, accuracy=4):
    if u.shape[axis] == 1:
        return np.zeros_like(u)
    need = 2 * ((1 + 1) // 2 - 1 + accuracy // 2) + 1
    if u.shape[axis] < need:
        raise GridTooSmall(f"axis {axis} has {u.shape[axis]} points, stencil needs {need}")
    return stencil_derivative(u, h, 1, axis=axis, accuracy=accuracy)


def zs_compatibility_residual(u, spacing, H, variant="printed", accuracy=4) -> float:
    """Max residual of ``u_y - H u_t - u_t H + [u,H]u + u[u,H] + X(u_x)``.

    ``u`` has shape ``(nx, ny, nt, n, n)``; an axis of length one marks a
    field independent of that variable. ``X`` is the x-derivative block of
    ``variant``. Only points where every stencil fits are compared.
    """
    u = np.asarray(u, dtype=complex)
    if u.ndim != 5:
        raise DimensionMismatch("u must have shape (nx, ny, nt, n, n)")
    H = np.asarray(H, dtype=complex)
    if H.shape != u.shape[-2:]:
        raise DimensionMismatch("H does not match the field")
    hx, hy, ht = spacing
    ux, uy, ut = (_deriv(u, h, ax, accuracy) for ax, h in ((0, hx), (1, hy), (2, ht)))
    C = u @ H - H @ u
    res = uy - H @ ut - ut @ H + C @ u + u @ C + _x_block(variant, H, ux)
    ok = np.all(np.isfinite(res), axis=(-2, -1))
    if not ok.any():
        raise GridTooSmall("no interior points")
    return float(np.max(np.abs(res[ok])))


def zero_seed_zs(H, ks, amplitudes, x, y, t):
    """Dressed potential ``u = [H, phi_x phi^{-1}]`` for the zero seed.

    ``phi = sum_j exp(k_j (x + t H + y H^2)) C_j`` with H diagonalizable.
    Returns an array of shape ``x.shape + (n, n)``.
    """
    H = np.asarray(H, dtype=complex)
    lam, V = np.linalg.eig(H)
    Vi = np.linalg.inv(V)
    X, Yg, T = np.broadcast_arrays(*(np.asarray(a, float) for a in (x, y, t)))
    n = H.shape[0]
    phi = np.zeros(X.shape + (n, n), complex)
    phix = np.zeros_like(phi)
    for k, C in zip(ks, amplitudes):
        arg = k * (X[..., None] + T[..., None] * lam + Yg[..., None] * lam**2)
        E = (V * np.exp(arg)[..., None, :]) @ Vi
        phi += E @ C
        phix += k * (E @ C)
    sigma = phix @ np.linalg.inv(phi)
    return H @ sigma - sigma @ H


# --------------------------------------------------------------------------
# projector Darboux transform


@dataclass
class ProjectorDT:
    nu: complex
    mu: complex
    lam: complex
    chi: np.ndarray
    phi: np.ndarray
    P: np.ndarray
    T: np.ndarray
    rho1: np.ndarray = field(repr=False)
    z: dict = field(default_factory=dict)


def _left_eig(M):
    z, V = np.linalg.eig(M.T)
    return z, V.T  # rows are left eigenvectors: v M = z v


def _gap_ok(z, i, tol):
    others = np.delete(z, i)
    scale = max(1.0, np.abs(z).max())
    return others.size == 0 or np.min(np.abs(others - z[i])) > tol * scale


def projector_dt(rho, H, nu, mu, lam, tol=1e-8, psi_index=None):
    """Build ``P``, ``T`` and the transformed row eigenvector; return ``(dt, residual)``.

    ``residual`` is the largest ``|| psi1 (rho1 - lam H) - z psi1 ||`` over the
    unit-norm left eigenvectors ``psi`` of ``rho - lam H`` (or only
    ``psi_index``).
    """
    rho, H = mat_dense(rho), mat_dense(H)
    _check_dims(rho, H)
    if nu == 0:
        raise ValueError("nu must be nonzero")
    if mu == 0:
        raise ValueError("mu = 0 makes T singular")
    if lam in (nu, mu):
        raise ValueError("lam must differ from nu and mu")
    n = rho.shape[0]
    zc, chis = _left_eig(rho - nu * H)
    zp, phis = np.linalg.eig(rho - mu * H)
    phis = phis.T
    best = None
    for i in np.argsort(zc.real, kind="stable"):
        for j in np.argsort(zp.real, kind="stable"):
            c, p = chis[i], phis[j]
            ov = abs(c @ p) / (np.linalg.norm(c) * np.linalg.norm(p))
            if best is None or ov > best[0] + 1e-14:
                best = (ov, i, j)
    ov, i, j = best
    if ov < tol:
        raise OrthogonalPair("every <chi|phi> pairing vanishes")
    if not (_gap_ok(zc, i, tol) and _gap_ok(zp, j, tol)):
        raise DegenerateEigenvalue("selected eigenvalue is degenerate")
    chi, phi = chis[i], phis[j]
    P = np.outer(phi, chi) / (chi @ phi)
    I = np.eye(n, dtype=complex)
    T = I + (mu - nu) / nu * P
    rho1 = T @ rho @ np.linalg.inv(T)
    zl, psis = _left_eig(rho - lam * H)
    idx = range(n) if psi_index is None else [psi_index]
    res = 0.0
    for k in idx:
        if not _gap_ok(zl, k, tol):
            raise DegenerateEigenvalue("eigenvalue of rho - lam H is degenerate")
        psi = psis[k] / np.linalg.norm(psis[k])
        psi1 = psi @ (I + (nu - mu) / (mu - lam) * P)
        r = psi1 @ (rho1 - lam * H) - zl[k] * psi1
        res = max(res, float(np.linalg.norm(r)))
    dt = ProjectorDT(nu, mu, lam, chi, phi, P, T, rho1, {"nu": zc[i], "mu": zp[j]})
    return dt, res


# --------------------------------------------------------------------------
# Frechet derivatives


def _linearize(F: NCPoly, u0, h, H):
    """Exact derivative of a word polynomial: sum over occurrences of u."""
    n = u0.shape[0]
    vals = {"H": H, "u": u0}
    total = np.zeros((n, n), complex)
    for (w, cm), c in F.terms.items():
        if cm:
            raise ValueError("numeric Frechet derivative needs rational coefficients")
        for pos, a in enumerate(w):
            if a != "u":
                continue
            m = np.eye(n, dtype=complex)
            for q, b in enumerate(w):
                m = m @ (h if q == pos else vals[b])
            total += complex(c) * m
    return total


@dataclass
class FrechetReport:
    differential: np.ndarray
    difference: np.ndarray

    @property
    def remainder(self) -> np.ndarray:
        return self.difference - self.differential

    @property
    def remainder_norm(self) -> float:
        return float(np.linalg.norm(self.remainder, 2))


def _report(F, u0, h, H):
    F = potential(F)
    u0, h = np.asarray(u0, complex), np.asarray(h, complex)
    H = np.zeros_like(u0) if H is None else np.asarray(H, complex)
    _check_dims(u0, h, H)
    diff = F.evaluate({"H": H, "u": u0 + h}) - F.evaluate({"H": H, "u": u0})
    return F, u0, h, H, diff


def frechet_left(F, u0, h, H=None) -> FrechetReport:
    """``L(u0) h`` with the increment added on the left of ``u0``."""
    F, u0, h, H, _ = _report(F, u0, h, H)
    diff = F.evaluate({"H": H, "u": h + u0}) - F.evaluate({"H": H, "u": u0})
    return FrechetReport(_linearize(F, u0, h, H), diff)


def frechet_right(F, u0, h, H=None) -> FrechetReport:
    """``h L^(u0)``; in a matrix algebra the strong derivative is unique, so
    this agrees with the left form."""
    F, u0, h, H, diff = _report(F, u0, h, H)
    return FrechetReport(_linearize(F, u0, h, H), diff)


def frechet_symmetric(F, u0, h, H=None) -> FrechetReport:
    left, right = frechet_left(F, u0, h, H), frechet_right(F, u0, h, H)
    return FrechetReport((left.differential + right.differential) / 2, left.difference)


def remainder_exponent(F, u0, h, H=None, eps=(1e-1, 5e-2, 2.5e-2, 1.25e-2)) -> float:
    """Least-squares slope of ``log ||remainder(eps h)||`` against ``log eps``."""
    norms = [frechet_left(F, u0, e * np.asarray(h), H).remainder_norm for e in eps]
    if min(norms) == 0:
        return float("inf")
    return float(np.polyfit(np.log(eps), np.log(norms), 1)[0])


# --------------------------------------------------------------------------
# matrix files: first line n, then n rows of 2n floats (re im pairs)


def read_matrix(path) -> np.ndarray:
    with open(path) as fh:
        rows = [ln.split() for ln in fh if ln.strip() and not ln.lstrip().startswith("#")]
    try:
        n = int(rows[0][0])
        if len(rows) != n + 1 or any(len(r) != 2 * n for r in rows[1:]):
            raise ValueError
        vals = np.array([[float(v) for v in r] for r in rows[1:]])
    except (ValueError, IndexError):
        raise ValueError(f"{path}: expected n then n rows of 2n floats") from None
    return mat_dense(vals[:, 0::2] + 1j * vals[:, 1::2])


def write_matrix(path, m) -> None:
    m = mat_dense(m)
    with open(path, "w") as fh:
        fh.write(f"{m.shape[0]}\n")
        for row in m:
            fh.write(" ".join(f"{z.real:.17g} {z.imag:.17g}" for z in row) + "\n")
