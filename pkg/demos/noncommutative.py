"""Noncommutative covariance, the Euler top and the projector transform.

Run: python demos/noncommutative.py
"""

import numpy as np

from darbouxcov.freealg import combination_check, covariance_residual, gen, symmetric_poly
from darbouxcov.zs import drift_order, euler_integrate, projector_dt, random_hermitian, remainder_exponent

H = gen("H")

# %% P_n(H, u) is covariant with Y = H^(n+1), J = H
for n in range(1, 6):
    print(n, symmetric_poly(n), "->", covariance_residual(symmetric_poly(n), H ** (n + 1), H))

# %% mixed potential: zero only with beta^2 = alpha^3
print("with rule   :", combination_check())
print("without rule:", combination_check(relations=[]))

# %% Euler top u_y + [u^2, H] = 0
Hm = np.diag([1.0, 2.0])
tr = euler_integrate([[0.5, 1], [1, 0]], Hm, (0.0, 1.0), 1e-3)
print(tr.report())
print("drift vs dy:", drift_order([[0.5, 1], [1, 0]], Hm))

# %% projector Darboux transform on a random Hermitian pencil
rng = np.random.default_rng(0)
dt, res = projector_dt(random_hermitian(4, rng), random_hermitian(4, rng), 0.7, -0.5, 1.3)
print("|P^2 - P| =", np.abs(dt.P @ dt.P - dt.P).max(), " eigen residual =", res)

# %% Frechet remainder of u^2 scales as |h|^2
u0, h = random_hermitian(3, rng), random_hermitian(3, rng)
print("remainder exponent:", remainder_exponent("u2", u0, h))
