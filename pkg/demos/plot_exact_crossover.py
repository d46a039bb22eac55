"""
From bright to dark: the exact steady state
===========================================

A weak drive mostly excites the bright mode, so light is emitted at up to
``N Gamma`` per excitation.  A strong drive populates all modes equally
and the emission per excitation drops to ``Gamma``.  We solve the Lindblad
steady state exactly for six atoms.
"""

import numpy as np

from collective_decay import SystemParams, build_model, solve_model, summarize

print(" Omega     n_s    k_s/N   k_s/N - n_s     C_1")
for omega in (0.1, 0.3, 1.0, 2.0, 5.0):
    model = build_model(SystemParams(n_atoms=6, omega=omega, a_over_lambda=0.08))
    rho = solve_model(model)
    s = summarize(rho, model)
    print(f"{omega:6.2f}  {s.n_s:.4f}  {s.k_s_over_n:.4f}  {s.excess: .5f}     {s.c_d[0]: .4f}")

# %%
# The excess ``k_s/N - n_s`` is the part of the emission carried by
# inter-atomic coherences.  It is positive (superradiant) at weak drive and
# becomes negative (subradiant) once the drive saturates the chain.
