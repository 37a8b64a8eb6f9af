import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from darbouxcov.zs import (
    DimensionMismatch,
    StepRejected,
    covariance_residual_numeric,
    drift_order,
    euler_integrate,
    frechet_left,
    frechet_right,
    mat_dense,
    projector_dt,
    random_hermitian,
    read_matrix,
    remainder_exponent,
    write_matrix,
    zero_seed_zs,
    zs_compatibility_residual,
)

rng = np.random.default_rng(7)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_numeric_covariance_of_symmetric_poly(n):
    H, u, s = (random_hermitian(4, rng) for _ in range(3))
    assert covariance_residual_numeric(f"P{n}", np.linalg.matrix_power(H, n + 1), H, u, s, H) < 1e-10
    assert covariance_residual_numeric(f"P{n}", np.linalg.matrix_power(H, n + 2), H, u, s, H) > 1e-3


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        covariance_residual_numeric("P1", np.eye(2), np.eye(2), np.eye(3), np.eye(2), np.eye(2))
    with pytest.raises(DimensionMismatch):
        mat_dense(np.ones((2, 3)))


def test_euler_fixed_point_and_companion_order():
    H = np.diag([1.0, 2.0])
    tr = euler_integrate([[0, 1], [1, 0]], H)
    assert tr.trace_drift.max() == 0 and tr.eigen_drift == 0
    drifts, orders = drift_order([[0.5, 1], [1, 0]], H)
    assert all(o > 3.8 for o in orders)
    assert drifts[0] > drifts[1] > drifts[2]


def test_euler_step_rejection():
    H = np.diag([1.0, 2.0])
    with pytest.raises(StepRejected):
        euler_integrate([[0.5, 1], [1, 0]], H, (0.0, 1.0), 0.5, drift_bound=1e-12)


def test_zs_compatibility_derived_block():
    H = np.diag([1.0, 1.5])
    ks = [0.4, -0.3]
    C = [np.array([[1, 0.2], [0.1, 1]]), np.array([[1, -0.3], [0.4, 1]])]
    errs = {}
    for n in (21, 41):
        x = np.linspace(-1, 1, n)
        y = np.linspace(0, 0.5, n)
        t = np.linspace(0, 0.5, n)
        X, Y, T = np.meshgrid(x, y, t, indexing="ij")
        u = zero_seed_zs(H, ks, C, X, Y, T)
        sp = (x[1] - x[0], y[1] - y[0], t[1] - t[0])
        errs[n] = {v: zs_compatibility_residual(u, sp, H, v) for v in ("derived", "printed")}
    assert errs[41]["derived"] < errs[21]["derived"] / 8
    assert errs[41]["derived"] < 1e-6
    assert errs[41]["printed"] > 1e-2


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6))
def test_projector_is_idempotent(seed):
    r = np.random.default_rng(seed)
    rho, H = random_hermitian(4, r), random_hermitian(4, r)
    dt, res = projector_dt(rho, H, 0.7, -0.5, 1.3)
    assert np.max(np.abs(dt.P @ dt.P - dt.P)) < 1e-10
    assert res < 1e-8


def test_projector_mu_equals_nu_is_identity():
    rho, H = random_hermitian(4, rng), random_hermitian(4, rng)
    dt, _ = projector_dt(rho, H, 0.7, 0.7, 1.3)
    assert np.array_equal(dt.T, np.eye(4))


def test_projector_rejects_bad_parameters():
    rho, H = random_hermitian(3, rng), random_hermitian(3, rng)
    with pytest.raises(ValueError):
        projector_dt(rho, H, 0.0, 1.0, 2.0)
    with pytest.raises(ValueError):
        projector_dt(rho, H, 1.0, 2.0, 1.0)


def test_frechet_linear_and_quadratic():
    H, u0, h = (random_hermitian(3, rng) for _ in range(3))
    assert frechet_left("P1", u0, h, H).remainder_norm < 1e-13
    rep = frechet_left("u2", u0, h)
    assert np.allclose(rep.remainder, h @ h)
    assert np.allclose(frechet_right("u2", u0, h).differential, rep.differential)
    assert abs(remainder_exponent("u2", u0, h) - 2) < 0.05


def test_matrix_file_round_trip(tmp_path):
    m = random_hermitian(3, rng)
    write_matrix(tmp_path / "m.txt", m)
    assert np.array_equal(read_matrix(tmp_path / "m.txt"), m)
    (tmp_path / "bad.txt").write_text("2\n1 0 0\n")
    with pytest.raises(ValueError):
        read_matrix(tmp_path / "bad.txt")
