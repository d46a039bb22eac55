"""
Mean-field bistability
======================

Replacing the pair correlations by products of single-atom expectation
values yields a cubic equation for the excitation density.  Inside a lobe
of the (Omega, Delta) plane it has two stable roots.
"""

import numpy as np

from collective_decay import (SystemParams, bistable_region_scan, build_coupling_matrices,
                              mean_field_sums)
from collective_decay.meanfield import large_drive_asymptote

sums = mean_field_sums(build_coupling_matrices(SystemParams(n_atoms=12)))
print(f"V~ = {sums.v_tilde:.3f}   R~ = {sums.r_tilde:.3f}")

scan = bistable_region_scan(np.linspace(0.1, 3, 59), np.linspace(-3, 3, 61), sums)
print(f"{int(scan.bistable.sum())} bistable grid points")

# %%
# A coarse text map, Omega increasing downwards and Delta to the right.
for i in range(0, len(scan.omegas), 4):
    line = "".join("#" if b else "." for b in scan.bistable[i, ::2])
    print(f"{scan.omegas[i]:5.2f} {line}")

# %%
# Far above saturation the density approaches 1/2 as Omega^-2.
print("\nlarge-drive fit:", large_drive_asymptote(sums))
