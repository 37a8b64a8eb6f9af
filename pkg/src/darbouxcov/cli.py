"""Command line entry point: ``darbouxcov <verb> [options]``.

Every verb reads an optional YAML config (``--config``), merges command
line flags on top, validates the result against a strict schema and writes
a JSON report that echoes the resolved config. Exit codes: 0 all checks
pass, 1 a check failed, 2 invalid input.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from . import covariance as cov
from . import dressing as drs
from . import freealg as fa
from . import zs
from .diffring import DiffRingError, parse, render
from .lindop import LinDiffOp

VERBS = (
    "verify-covariance",
    "compatibility",
    "boussinesq",
    "dress",
    "chain",
    "nc-check",
    "euler-top",
    "projector-dt",
    "frechet",
)


class InvalidInput(Exception):
    pass


# --------------------------------------------------------------------------
# schema helpers


def _expr(v):
    """Numbers become exact constants, strings are parsed expressions."""
    if isinstance(v, bool):
        raise InvalidInput(f"expected an expression, got {v!r}")
    if isinstance(v, (int, float)):
        return cov._const(v)
    if isinstance(v, str):
        return parse(v)
    raise InvalidInput(f"expected a number or expression string, got {v!r}")


def _num(v):
    if isinstance(v, bool) or not isinstance(v, (int, float, str)):
        raise InvalidInput(f"expected a number, got {v!r}")
    try:
        return float(v)
    except ValueError:
        raise InvalidInput(f"expected a number, got {v!r}") from None


def _cplx(v):
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(_num(v[0]), _num(v[1]))
    if isinstance(v, bool):
        raise InvalidInput(f"expected a complex number, got {v!r}")
    try:
        return complex(str(v).replace(" ", "").replace("i", "j")) if isinstance(v, str) else complex(v)
    except (TypeError, ValueError):
        raise InvalidInput(f"expected a complex number, got {v!r}") from None


def _int(v):
    if isinstance(v, bool) or not isinstance(v, int):
        raise InvalidInput(f"expected an integer, got {v!r}")
    return v


def _str(v):
    if not isinstance(v, str):
        raise InvalidInput(f"expected a string, got {v!r}")
    return v


def _list(conv):
    def f(v):
        if not isinstance(v, list):
            raise InvalidInput(f"expected a list, got {v!r}")
        return [conv(x) for x in v]

    return f


def _range(v):
    vals = _list(_num)(v)
    if len(vals) != 2 or not vals[0] < vals[1]:
        raise InvalidInput(f"expected an increasing pair, got {v!r}")
    return vals


def _grid(v):
    if not isinstance(v, dict):
        raise InvalidInput("grid must be a mapping")
    return _validate(v, GRID_SCHEMA, "grid")


def _seeds(v):
    if not isinstance(v, list) or not v:
        raise InvalidInput("seeds must be a non-empty list")
    return [_validate(s, SEED_SCHEMA, "seed") for s in v]


GRID_SCHEMA = {"x": (_range, [-10.0, 10.0]), "t": (_range, [0.0, 1.0]), "nx": (_int, 400), "nt": (_int, 400)}
SEED_SCHEMA = {"lam": (_num, None), "amplitudes": (_list(_num), [1.0, 1.0]), "select": (_list(_int), None)}

PAIR = {
    "b3": (_expr, 1),
    "a2": (_expr, -1),
    "a1": (_expr, 0),
    "alpha": (_expr, 0),
    "beta": (_expr, 0),
}

SCHEMAS = {
    "verify-covariance": {
        **{k: (_expr, f"({k})" if k in ("b3", "a2") else k) for k in PAIR},
        "g_form": (_str, "compatible"),
        "impose_burgers": (bool, True),
    },
    "compatibility": {"a2": (_expr, "(a2)")},
    "boussinesq": {**PAIR, "g_form": (_str, "compatible")},
    "dress": {
        **PAIR,
        "alpha": (_expr, -0.21),
        "lam": (_num, 0.02),
        "amplitudes": (_list(_num), [1.0, 1.0]),
        "select": (_list(_int), [0, 2]),
        "grid": (_grid, {}),
    },
    "chain": {
        **PAIR,
        "alpha": (_expr, -0.21),
        "seeds": (
            _seeds,
            [
                {"lam": -0.03, "amplitudes": [1.0, 1.0], "select": [0, 1]},
                {"lam": -0.015, "amplitudes": [1.0, -1.0], "select": [0, 2]},
                {"lam": 0.015, "amplitudes": [1.0, -1.0], "select": [0, 2]},
            ],
        ),
        "steps": (_int, 2),
        "grid": (_grid, {}),
    },
    "nc-check": {
        "potential": (_str, "P1"),
        "n": (_int, None),
        "y_power": (_int, None),
        "combination": (dict, None),
    },
    "euler-top": {
        "H": (_str, None),
        "u0": (_str, None),
        "span": (_range, [0.0, 1.0]),
        "dy": (_num, 1e-3),
        "drift_bound": (_num, None),
    },
    "projector-dt": {
        "rho": (_str, None),
        "H": (_str, None),
        "nu": (_cplx, None),
        "mu": (_cplx, None),
        "lambda": (_cplx, None),
    },
    "frechet": {
        "potential": (_str, "P1"),
        "u0": (_str, None),
        "h": (_str, None),
        "H": (_str, None),
    },
}

COMBINATION_SCHEMA = {
    "alpha": (lambda v: v if v == "symbolic" else Fraction(str(v)), "symbolic"),
    "beta": (lambda v: v if v == "symbolic" else Fraction(str(v)), "symbolic"),
    "relations": (_list(_str), None),
}

DEFAULT_TOL = {
    "verify-covariance": 0.0,
    "compatibility": 0.0,
    "boussinesq": 0.0,
    "dress": 1e-6,
    "chain": 1e-6,
    "nc-check": 0.0,
    "euler-top": 1e-8,
    "projector-dt": 1e-10,
    "frechet": 1e-12,
}

VARIANTS = {
    "boussinesq": ("derived", "printed"),
    "dress": ("derived", "printed"),
    "chain": drs.TWO_STEP_VARIANTS,
}


def _validate(raw, schema, where):
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise InvalidInput(f"{where}: config must be a mapping")
    unknown = sorted(set(raw) - set(schema))
    if unknown:
        raise InvalidInput(f"{where}: unknown keys {unknown}")
    out = {}
    for key, (conv, default) in schema.items():
        v = raw.get(key, default)
        if v is None:
            out[key] = None
        elif conv is bool:
            if not isinstance(v, bool):
                raise InvalidInput(f"{where}.{key}: expected true/false")
            out[key] = v
        elif conv is dict:
            if not isinstance(v, dict):
                raise InvalidInput(f"{where}.{key}: expected a mapping")
            out[key] = v
        else:
            try:
                out[key] = conv(v)
            except InvalidInput as exc:
                raise InvalidInput(f"{where}.{key}: {exc}") from None
            except (DiffRingError, ValueError) as exc:
                raise InvalidInput(f"{where}.{key}: {exc}") from None
    return out


def _echo(v):
    """JSON-friendly copy of a resolved config value."""
    if isinstance(v, dict):
        return {k: _echo(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_echo(x) for x in v]
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, Fraction):
        return str(v)
    if hasattr(v, "items") and hasattr(v, "jets"):
        return render(v)
    return v


def _pair_config(p, g_form="compatible"):
    try:
        return cov.PairConfig(b3=p["b3"], a2=p["a2"], a1=p["a1"], alpha=p["alpha"], beta=p["beta"], g_form=g_form)
    except cov.ConfigViolation as exc:
        raise InvalidInput(f"ConfigViolation: {exc}") from None


# --------------------------------------------------------------------------
# verbs; each returns (report, passed)


def _verify_covariance(p, tol, variant):
    cfg = _pair_config(p, p["g_form"])
    r1 = cov.first_covariance_residual(cfg)
    r2 = cov.second_covariance_residual(cfg, impose_burgers=p["impose_burgers"])
    rows = {
        "first_covariance": {"residual": render(r1), "zero": r1.is_zero()},
        "second_covariance": {"residual": render(r2), "zero": r2.is_zero()},
    }
    L, A = cov.build_pair(cfg)
    return {"L": str(L), "A": str(A), "residuals": rows}, r1.is_zero() and r2.is_zero()


def _compatibility(p, tol, variant):
    from .diffring import jet

    A = LinDiffOp([jet("w"), jet("a1"), p["a2"]])
    L = LinDiffOp([jet(f"b{k}") for k in range(4)])
    comp = dict(cov.lax_compatibility(L, A))
    rows = {}
    ok = True
    for k, printed in cov.printed_compatibility():
        same = cov.same_equation(comp[k], printed)
        ok &= same
        rows[f"D^{k}"] = {"computed": render(comp[k]), "printed": render(printed), "match": same}
    return {"equations": rows}, ok


def _boussinesq(p, tol, variant):
    cfg = _pair_config(p, p["g_form"])
    red = cov.boussinesq_reduce(cfg)
    rep = {
        "variant": red.variant,
        "evolution": render(red.evolution),
        "constraint": render(red.constraint),
        "beta_law": render(red.beta_law),
    }
    if red.variant != "generalized":
        printed = cov.printed_boussinesq(cfg)
        rep["printed"] = render(printed)
        rep["matches_printed"] = cov.same_equation(red.evolution, printed)
        rep["selected"] = rep["printed"] if variant == "printed" else rep["evolution"]
        if variant == "printed":
            return rep, red.constraint.is_zero() and rep["matches_printed"]
    return rep, red.constraint.is_zero()


def _grid_field(g):
    return drs.Field2D.grid(g["x"], g["t"], g["nx"], g["nt"])


def _dress(p, tol, variant, out=None):
    cfg = _pair_config(p)
    seed = drs.make_seed(cfg, p["lam"], p["amplitudes"], p["select"])
    grid = _grid_field(p["grid"])
    w = drs.dress_once(seed, cfg, grid)
    err, res = drs.pde_residual(w, cfg, variant or "derived")
    rep = {
        "max_residual": err,
        "grid": {"nx": grid.nx, "nt": grid.nt, "dx": grid.dx, "dt": grid.dt},
        "seed": [[complex(c), complex(k), complex(om)] for c, k, om in seed.terms],
        "equation": variant or "derived",
    }
    if out is not None:
        _write_csv(out, w, res)
        rep["csv"] = str(out)
    return rep, err < tol


def _write_csv(path, w, res):
    hx = int(round((res.x0 - w.x0) / w.dx))
    ht = int(round((res.t0 - w.t0) / w.dt))
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["x", "t", "w", "residual"])
        for i, x in enumerate(w.x):
            for j, t in enumerate(w.t):
                ii, jj = i - hx, j - ht
                inside = 0 <= ii < res.nx and 0 <= jj < res.nt
                r = f"{res.values[ii, jj]:.17g}" if inside else ""
                wr.writerow([f"{x:.17g}", f"{t:.17g}", f"{w.values[i, j]:.17g}", r])


def _chain(p, tol, variant):
    cfg = _pair_config(p)
    seeds = [drs.make_seed(cfg, s["lam"], s["amplitudes"], s["select"]) for s in p["seeds"]]
    grid = _grid_field(p["grid"])
    states = drs.run_chain(seeds, cfg, grid, p["steps"])
    chosen = variant or "derived"
    records, ok = [], True
    for st in states:
        fi = drs.first_integral_variants(st, cfg)
        rec = {"n": st.n, "c_n": st.c_n, **st.records, "first_integral": fi}
        records.append(rec)
        if st.n > 0:
            ok &= st.records[f"two_step_{chosen}"] < tol
        ok &= fi["derived"]["spread"] < tol
    tel = drs.telescoping_residual(states)
    return {"steps": records, "telescoping": tel, "chosen_variant": chosen}, bool(ok)


def _nc_check(p, tol, variant):
    if p["combination"] is not None:
        c = _validate(p["combination"], COMBINATION_SCHEMA, "combination")
        al = None if c["alpha"] == "symbolic" else c["alpha"]
        be = None if c["beta"] == "symbolic" else c["beta"]
        rels = None if c["relations"] is None else [fa.parse_relation(r) for r in c["relations"]]
        res = fa.combination_check(al, be, rels)
        return {"combination": _echo(c), "residual": str(res)}, res.is_zero()
    F = zs.potential(p["potential"] if p["n"] is None else f"P{p['n']}")
    n = p["n"] if p["n"] is not None else int(p["potential"][1:])
    k = p["y_power"] if p["y_power"] is not None else n + 1
    H = fa.gen("H")
    res = fa.covariance_residual(F, H**k, H)
    return {"potential": f"P{n}", "Y": f"H^{k}", "J": "H", "residual": str(res) if not res.is_zero() else ""}, res.is_zero()


def _need(p, *keys):
    missing = [k for k in keys if p.get(k) is None]
    if missing:
        raise InvalidInput(f"missing required {missing}")


def _euler_top(p, tol, variant):
    _need(p, "H", "u0")
    H, u0 = zs.read_matrix(p["H"]), zs.read_matrix(p["u0"])
    try:
        tr = zs.euler_integrate(u0, H, tuple(p["span"]), p["dy"], p["drift_bound"])
    except zs.StepRejected as exc:
        return {"error": f"StepRejected: {exc}"}, False
    rep = tr.report()
    stride = max(1, (len(tr.ys) - 1) // 100)
    rep["trajectory"] = [
        {"y": float(y), "u": [[[z.real, z.imag] for z in row] for row in u]}
        for y, u in zip(tr.ys[::stride], tr.us[::stride])
    ]
    worst = max(float(tr.trace_drift.max()), tr.eigen_drift)
    return rep, worst < tol


def _projector_dt(p, tol, variant):
    _need(p, "rho", "H", "nu", "mu", "lambda")
    rho, H = zs.read_matrix(p["rho"]), zs.read_matrix(p["H"])
    dt, res = zs.projector_dt(rho, H, p["nu"], p["mu"], p["lambda"])
    idem = float(np.max(np.abs(dt.P @ dt.P - dt.P)))
    return {"residual": res, "idempotency": idem, "z": {k: [v.real, v.imag] for k, v in dt.z.items()}}, (
        res < tol and idem < 1e-12
    )


def _frechet(p, tol, variant):
    _need(p, "u0", "h")
    u0, h = zs.read_matrix(p["u0"]), zs.read_matrix(p["h"])
    H = zs.read_matrix(p["H"]) if p["H"] else None
    rep = zs.frechet_left(p["potential"], u0, h, H)
    expo = zs.remainder_exponent(p["potential"], u0, h, H)
    linear = zs.potential(p["potential"]).degree_in("u")[1] <= 1
    passed = rep.remainder_norm <= tol if linear else abs(expo - 2.0) <= 0.1
    return {"remainder_norm": rep.remainder_norm, "remainder_exponent": expo, "linear": linear}, passed


HANDLERS = {
    "verify-covariance": _verify_covariance,
    "compatibility": _compatibility,
    "boussinesq": _boussinesq,
    "dress": _dress,
    "chain": _chain,
    "nc-check": _nc_check,
    "euler-top": _euler_top,
    "projector-dt": _projector_dt,
    "frechet": _frechet,
}


# --------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="darbouxcov", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="verb", required=True)
    for verb in VERBS:
        sp = sub.add_parser(verb)
        sp.add_argument("--config", type=Path, help="YAML file with the verb parameters")
        sp.add_argument("--out", type=Path, help="report path (JSON; CSV for dress)")
        sp.add_argument("--tolerance", type=float)
        sp.add_argument("--variant")
        if verb == "chain":
            sp.add_argument("--steps", type=int)
        if verb == "nc-check":
            sp.add_argument("--potential")
            sp.add_argument("--n", type=int)
            sp.add_argument("--y-power", type=int, dest="y_power")
            sp.add_argument("--combination", type=Path)
        if verb == "euler-top":
            sp.add_argument("--H", dest="H")
            sp.add_argument("--u0")
            sp.add_argument("--span", type=float, nargs=2)
            sp.add_argument("--dy", type=float)
            sp.add_argument("--drift-bound", type=float, dest="drift_bound")
        if verb == "projector-dt":
            sp.add_argument("--rho")
            sp.add_argument("--H", dest="H")
            sp.add_argument("--nu")
            sp.add_argument("--mu")
            sp.add_argument("--lambda", dest="lambda")
        if verb == "frechet":
            sp.add_argument("--potential")
            sp.add_argument("--u0")
            sp.add_argument("--h")
            sp.add_argument("--H", dest="H")
    return ap


_COMMON = {"verb", "config", "out", "tolerance", "variant"}


def _load_yaml(path: Path):
    try:
        with open(path) as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise InvalidInput(f"cannot read {path}: {exc}") from None
    except yaml.YAMLError as exc:
        raise InvalidInput(f"{path}: {exc}") from None
    return {} if data is None else data


def resolve(args) -> tuple[dict, float, str | None]:
    raw = _load_yaml(args.config) if args.config else {}
    if not isinstance(raw, dict):
        raise InvalidInput("config must be a mapping")
    raw = dict(raw)
    tol = raw.pop("tolerance", None)
    variant = raw.pop("variant", None)
    for k, v in vars(args).items():
        if k in _COMMON or v is None:
            continue
        if k == "combination":
            v = _load_yaml(v)
        if k == "span":
            v = list(v)
        raw[k] = v
    params = _validate(raw, SCHEMAS[args.verb], args.verb)
    if args.tolerance is not None:
        tol = args.tolerance
    tol = DEFAULT_TOL[args.verb] if tol is None else _num(tol)
    if args.variant is not None:
        variant = args.variant
    if variant is not None:
        allowed = VARIANTS.get(args.verb)
        if not allowed or variant not in allowed:
            raise InvalidInput(f"variant {variant!r} not available for {args.verb} (choices: {allowed})")
    return params, tol, variant


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        params, tol, variant = resolve(args)
        handler = HANDLERS[args.verb]
        if args.verb == "dress":
            out_csv = args.out
            report, ok = handler(params, tol, variant, out_csv)
        else:
            report, ok = handler(params, tol, variant)
    except InvalidInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (
        DiffRingError,
        drs.DressingError,
        zs.ZSError,
        fa.NonlinearPotential,
        fa.RelationNotConfluent,
        ValueError,
    ) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    doc = {
        "manifest": {
            "verb": args.verb,
            "version": __version__,
            "params": _echo(params),
            "tolerance": tol,
            "variant": variant,
        },
        "passed": bool(ok),
        "report": _echo(report),
    }
    text = json.dumps(doc, indent=2, sort_keys=True, default=_json_default)
    if args.out is not None:
        dest = args.out.with_suffix(".json") if args.verb == "dress" else args.out
        dest.write_text(text + "\n")
    else:
        print(text)
    return 0 if ok else 1


def _json_default(o):
    if isinstance(o, complex):
        return [o.real, o.imag]
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.bool_):
        return bool(o)
    return str(o)


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
