"""
Running a sweep from the command line
=====================================

The ``collective-decay`` command runs the same solvers over an
(Omega, Delta) grid and writes CSV tables plus a JSON manifest.  Here we
call its entry point in-process and read the results back.
"""

import csv
import json
import os
import tempfile

from collective_decay.cli import main

out = tempfile.mkdtemp(prefix="sweep_")
code = main(["sweep", "--solver", "steady", "--n-atoms", "4", "--omega", "1.0",
             "--out", out])
print("exit code", code)

# %%
# A configuration file describes larger grids; command-line flags override it.
cfg = os.path.join(out, "grid.cfg")
with open(cfg, "w") as fh:
    fh.write("n_atoms = 4\nomega_min = 0.2\nomega_max = 3\nomega_steps = 5\n")
code = main(["steady", "--config", cfg, "--out", os.path.join(out, "grid")])

with open(os.path.join(out, "grid", "observables.csv")) as fh:
    for row in csv.DictReader(fh):
        print(row["omega"], row["n_s"], row["k_s_over_N_gamma"])
with open(os.path.join(out, "grid", "manifest.json")) as fh:
    print(json.load(fh)["files"])
