"""Driven chains of two-level atoms with collective (non-local) decay.

Exact Lindblad steady states, quantum-jump trajectories and homogeneous
mean-field theory for atoms on a one-dimensional lattice coupled through
the free-space dipole-dipole interaction.
"""

__version__ = "0.1.0"

from .errors import CapacityError, NonUniqueSteadyState, NumericalError, ValidationError
from .lattice import (PRESETS, CollectiveModes, CouplingMatrices, SystemParams,
                      build_coupling_matrices, coherent_coupling, collective_modes,
                      dissipative_coupling, get_preset, kappa)
from .operators import (ChainModel, build_decay_operator, build_hamiltonian,
                        build_jump_operators, build_model, effective_hamiltonian)
from .steady import (build_liouvillian, solve_model, solve_steady_state,
                     validate_density_matrix)
from .observables import (build_histogram, coherence_matrix, emission_rate,
                          excitation_density, spatial_coherence, summarize,
                          trace_distance)
from .meanfield import (MeanFieldState, MeanFieldSums, bistable_region_scan,
                        mean_field_sums, mf_stability, mf_stationary_roots)
from .qjmc import (QjmcConfig, TrajectoryRecord, evolve_trajectory, run_ensemble,
                   stationary_window_samples)
