"""
Dipole couplings and collective decay modes
===========================================

Atoms sit on a line with spacing ``a``.  The exchange of virtual photons
gives a coherent hopping ``V`` and a dissipative coupling ``R`` between
every pair, both functions of ``kappa = 2 pi a d / lambda``.
"""

import numpy as np

from collective_decay import (SystemParams, build_coupling_matrices, coherent_coupling,
                              collective_modes, dissipative_coupling)

# At short distance R tends to 1 (perfectly correlated decay) while V
# diverges like 1/kappa^3.
for k in (0.05, 0.5, 1.0, 2 * np.pi):
    print(f"kappa={k:6.3f}  V={coherent_coupling(k): .4e}  R={dissipative_coupling(k): .6f}")

# %%
# Diagonalising the R matrix gives the collective decay channels.  For
# a sub-wavelength chain most of the total rate N Gamma is carried by a
# single bright mode; the rest are nearly dark.
params = SystemParams(n_atoms=6, a_over_lambda=0.08)
coupling = build_coupling_matrices(params)
modes = collective_modes(coupling)
print("\nmode rates (Gamma):", np.array2string(modes.rates, precision=4))
print("sum of rates:", modes.rates.sum(), "= N")
print("bright fraction:", modes.rates.max() / modes.rates.sum())
