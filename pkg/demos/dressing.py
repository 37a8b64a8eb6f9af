"""Zero-seed dressing of the Boussinesq pair and a two-step dressing chain.

Run: python demos/dressing.py
"""

import numpy as np

from darbouxcov.covariance import PairConfig
from darbouxcov.dressing import (
    Field2D,
    characteristic_roots,
    convergence_study,
    dress_once,
    first_integral_variants,
    make_seed,
    run_chain,
    telescoping_residual,
)

cfg = PairConfig(b3=1, a2=-1, a1=0, alpha=-0.21, beta=0)

# %% roots of k^3 - 0.21 k = 0.02 and a two-term seed
print("roots:", characteristic_roots(cfg, 0.02).real)
seed = make_seed(cfg, 0.02, [1.0, 1.0], select=[0, 2])

# %% a single dressing: w = 2 a2 (log phi)_xx
g = Field2D.grid((-10, 10), (0, 1), 400, 400)
w = dress_once(seed, cfg, g)
print("w range:", w.values.min(), w.values.max())

# %% grid residual of the reduced equation under refinement
hs, errs, slopes = convergence_study(seed, cfg, (-10, 10), (0, 1), [100, 200, 400])
for h, e in zip(hs, errs):
    print(f"dx={h:.4f}  max residual={e:.3e}")
print("observed orders:", np.round(slopes, 2))

# %% dressing chain with three eigenfunctions
seeds = [
    make_seed(cfg, -0.03, [1.0, 1.0], [0, 1]),
    make_seed(cfg, -0.015, [1.0, -1.0], [0, 2]),
    make_seed(cfg, 0.015, [1.0, -1.0], [0, 2]),
]
states = run_chain(seeds, cfg, g, 2)
for s in states[1:]:
    print(f"step {s.n}:", {k: f"{v:.2e}" for k, v in s.records.items()})
print("telescoping:", telescoping_residual(states))
for name, v in first_integral_variants(states[2], cfg).items():
    print(f"first integral [{name}] spread={v['spread']:.2e} value={v['value'].real:.6f}")
