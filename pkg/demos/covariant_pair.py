"""Covariant third/second order pair and its Boussinesq reduction.

Run: python demos/covariant_pair.py
"""

from darbouxcov.covariance import (
    PairConfig,
    boussinesq_reduce,
    build_pair,
    first_covariance_residual,
    printed_boussinesq,
    second_covariance_residual,
    standard_boussinesq,
)
from darbouxcov.diffring import render
from darbouxcov.lindop import render_op

# %% the pair with symbolic b3, a2 and free a1, alpha, beta
cfg = PairConfig()
L, A = build_pair(cfg)
print("L =", render_op(L))
print("A =", render_op(A))

# %% both covariance residuals reduce to the zero polynomial
print("first residual :", render(first_covariance_residual(cfg)))
print("second residual:", render(second_covariance_residual(cfg)))

# %% without the Burgers constraint on a1 the residual is a multiple of it
print("no Burgers     :", render(second_covariance_residual(cfg, impose_burgers=False)))

# %% standard constants: the evolution equation is Boussinesq
std = PairConfig(b3=1, a2=-1, a1=0, alpha=0, beta=0)
red = boussinesq_reduce(std)
print("derived  :", render(red.evolution))
print("textbook :", render(standard_boussinesq()))
print("printed  :", render(printed_boussinesq(std)))
