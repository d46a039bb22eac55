"""Many-body operators on the 2**N dimensional chain Hilbert space.

Basis convention (bit exact): a basis index ``x`` encodes the chain with
site 0 as the most significant bit, bit value 0 = ground state and
1 = excited state.  The single-site lowering operator is therefore the
2x2 matrix ``[[0, 1], [0, 0]]`` and ``kron`` products run from site 0 to
site N-1.

Operators are ``scipy.sparse.csr_matrix`` with complex entries.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import ValidationError
from .lattice import build_coupling_matrices, collective_modes

__all__ = [
    "site_mask", "excitation_counts", "embed_lowering", "number_operator",
    "build_hamiltonian", "build_decay_operator", "build_jump_operators",
    "effective_hamiltonian", "ChainModel", "build_model",
]


def site_mask(site, n_atoms):
    return 1 << (n_atoms - 1 - site)


def excitation_counts(n_atoms):
    """Number of excited atoms in every basis state."""
    x = np.arange(2 ** n_atoms)
    bits = (x[:, None] >> np.arange(n_atoms)) & 1
    return bits.sum(axis=1)


def _check_site(site, n_atoms):
    if not 0 <= site < n_atoms:
        raise ValidationError(f"site {site} outside chain of {n_atoms}",
                              field="site")


def embed_lowering(site, n_atoms):
    """``b_site = |g><e|`` on ``site``, identity elsewhere."""
    _check_site(site, n_atoms)
    dim = 2 ** n_atoms
    mask = site_mask(site, n_atoms)
    cols = np.flatnonzero(np.arange(dim) & mask)
    rows = cols ^ mask
    return sp.csr_matrix((np.ones(cols.size, complex), (rows, cols)),
                         shape=(dim, dim))


def number_operator(n_atoms):
    """Total excitation number as a diagonal sparse matrix."""
    return sp.diags(excitation_counts(n_atoms).astype(complex), format="csr")


def _hopping(matrix, n_atoms, include_diagonal):
    """sum_{a,b} matrix[a, b] b_a^dag b_b, optionally skipping a == b."""
    dim = 2 ** n_atoms
    x = np.arange(dim)
    rows, cols, vals = [], [], []
    for a in range(n_atoms):
        ma = site_mask(a, n_atoms)
        for b in range(n_atoms):
            if a == b:
                if include_diagonal and matrix[a, a] != 0:
                    sel = x[(x & ma) != 0]
                    rows.append(sel)
                    cols.append(sel)
                    vals.append(np.full(sel.size, matrix[a, a], complex))
                continue
            if matrix[a, b] == 0:
                continue
            mb = site_mask(b, n_atoms)
            sel = x[((x & mb) != 0) & ((x & ma) == 0)]
            rows.append(sel ^ mb ^ ma)
            cols.append(sel)
            vals.append(np.full(sel.size, matrix[a, b], complex))
    if not rows:
        return sp.csr_matrix((dim, dim), dtype=complex)
    return sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(dim, dim))


def build_hamiltonian(params, coupling):
    """Driven chain Hamiltonian (hbar = 1).

    H = sum_a [-delta n_a + omega (b_a^dag + b_a)] + sum_{a != b} V_ab b_a^dag b_b
    """
    n = params.n_atoms
    if coupling.n_atoms != n:
        raise ValidationError("coupling size does not match n_atoms",
                              field="coupling")
    dim = 2 ** n
    x = np.arange(dim)
    diag = sp.diags(-params.delta * excitation_counts(n).astype(complex))
    drive_rows = np.concatenate([x ^ site_mask(a, n) for a in range(n)])
    drive_cols = np.tile(x, n)
    drive = sp.csr_matrix(
        (np.full(drive_rows.size, params.omega, complex),
         (drive_rows, drive_cols)), shape=(dim, dim))
    h = diag + drive + _hopping(coupling.v, n, include_diagonal=False)
    h = sp.csr_matrix(h)
    h.eliminate_zeros()
    return h


def build_decay_operator(coupling):
    """``sum_{a,b} R_ab b_a^dag b_b``; equals ``sum_m gamma_m J_m^dag J_m``."""
    return _hopping(coupling.r, coupling.n_atoms, include_diagonal=True)


def build_jump_operators(modes, n_atoms):
    """List of ``(gamma_m, J_m)`` with ``J_m = sum_a X[a, m] b_a``."""
    lowering = [embed_lowering(a, n_atoms) for a in range(n_atoms)]
    out = []
    for m in range(modes.n_modes):
        j = sp.csr_matrix(lowering[0].shape, dtype=complex)
        for a, op in enumerate(lowering):
            if modes.vectors[a, m] != 0:
                j = j + modes.vectors[a, m] * op
        out.append((float(modes.rates[m]), sp.csr_matrix(j)))
    return out


def effective_hamiltonian(h, jumps):
    """Non-Hermitian generator ``H - (i/2) sum_m gamma_m J_m^dag J_m``."""
    decay = sp.csr_matrix(h.shape, dtype=complex)
    for rate, j in jumps:
        decay = decay + rate * (j.conj().T @ j)
    return sp.csr_matrix(h - 0.5j * decay)


@dataclass(frozen=True)
class ChainModel:
    """Everything needed to simulate one parameter point.

    ``decay`` is ``sum_{a,b} R_ab b_a^dag b_b``, precomputed once and shared
    by the trajectory norm decay and the emission-rate observable.
    """

    params: object
    coupling: object
    modes: object
    hamiltonian: sp.csr_matrix
    decay: sp.csr_matrix

    @property
    def n_atoms(self):
        return self.params.n_atoms

    @property
    def dim(self):
        return 2 ** self.params.n_atoms

    @property
    def h_eff(self):
        return sp.csr_matrix(self.hamiltonian - 0.5j * self.decay)

    def jump_operators(self):
        return build_jump_operators(self.modes, self.n_atoms)


def build_model(params, clamp_tol=1e-10):
    coupling = build_coupling_matrices(params)
    modes = collective_modes(coupling, clamp_tol=clamp_tol)
    return ChainModel(
        params=params,
        coupling=coupling,
        modes=modes,
        hamiltonian=build_hamiltonian(params, coupling),
        decay=build_decay_operator(coupling),
    )
