import numpy as np
import pytest
from hypothesis import given, strategies as st

from collective_decay import (SystemParams, build_coupling_matrices, build_decay_operator,
                              build_hamiltonian, build_jump_operators, build_model,
                              collective_modes, effective_hamiltonian)
from collective_decay.operators import embed_lowering, excitation_counts, number_operator

from conftest import dense_lowering


def kron_hamiltonian(params):
    c = build_coupling_matrices(params)
    n = params.n_atoms
    b = [dense_lowering(a, n) for a in range(n)]
    h = np.zeros((2 ** n, 2 ** n), dtype=complex)
    for a in range(n):
        h += -params.delta * b[a].conj().T @ b[a] + params.omega * (b[a] + b[a].conj().T)
        for k in range(n):
            if k != a:
                h += c.v[a, k] * b[a].conj().T @ b[k]
    return h


def test_single_atom_hamiltonian():
    p = SystemParams(1, omega=0.7, delta=-0.3)
    h = build_hamiltonian(p, build_coupling_matrices(p)).toarray()
    assert np.allclose(h, [[0, 0.7], [0.7, 0.3]])


@given(st.integers(1, 5), st.floats(-3, 3), st.floats(-3, 3), st.floats(0.03, 0.5))
def test_hamiltonian_matches_kronecker_construction(n, om, de, a):
    p = SystemParams(n, omega=om, delta=de, a_over_lambda=a)
    h = build_hamiltonian(p, build_coupling_matrices(p)).toarray()
    assert np.allclose(h, kron_hamiltonian(p), atol=1e-12)
    assert np.allclose(h, h.conj().T)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_embedded_lowering_operators(n):
    for a in range(n):
        assert np.array_equal(embed_lowering(a, n).toarray(), dense_lowering(a, n))
    assert np.array_equal(np.diag(number_operator(n).toarray()).real, excitation_counts(n))


@given(st.integers(1, 7), st.floats(0.02, 0.6))
def test_jump_operators_resolve_decay_operator(n, a):
    p = SystemParams(n, a_over_lambda=a)
    c = build_coupling_matrices(p)
    modes = collective_modes(c)
    jumps = build_jump_operators(modes, n)
    total = sum(g * (j.conj().T @ j) for g, j in jumps).toarray()
    assert np.allclose(total, build_decay_operator(c).toarray(), atol=1e-9)
    assert sum(g for g, _ in jumps) == pytest.approx(n, abs=1e-9)


def test_effective_hamiltonian_and_model():
    p = SystemParams(3, omega=1.2, delta=0.4)
    m = build_model(p)
    h_eff = effective_hamiltonian(m.hamiltonian, m.jump_operators()).toarray()
    assert np.allclose(h_eff, m.h_eff.toarray(), atol=1e-12)
    # anti-Hermitian part is -M/2 with M positive semidefinite
    anti = (h_eff - h_eff.conj().T) / 2j
    assert np.linalg.eigvalsh(anti).max() <= 1e-12
