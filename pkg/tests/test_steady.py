import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from collective_decay import (CapacityError, NonUniqueSteadyState, SystemParams,
                              build_coupling_matrices, build_liouvillian, build_model,
                              excitation_density, solve_model, solve_steady_state,
                              trace_distance, validate_density_matrix)
from collective_decay.lattice import CouplingMatrices
from collective_decay.steady import (ground_state_density, lindblad_rhs,
                                     maximally_mixed, pauli_liouvillian, unvec, vec)

from conftest import dense_lowering, random_density
from test_lattice import r_oracle, v_oracle


def single_atom_density(om, de):
    return om ** 2 / (0.25 + de ** 2 + 2 * om ** 2)


class DenseMasterEquation:
    """Independent right-hand side built from explicit Kronecker products."""

    def __init__(self, n, om, de, a):
        b = [dense_lowering(k, n) for k in range(n)]
        bd = [x.conj().T for x in b]
        dim = 2 ** n
        h = np.zeros((dim, dim), dtype=complex)
        r = np.eye(n)
        v = np.zeros((n, n))
        for i in range(n):
            for j in range(n):
                if i != j:
                    kap = 2 * np.pi * abs(i - j) * a
                    r[i, j], v[i, j] = r_oracle(kap), v_oracle(kap)
        for i in range(n):
            h += -de * bd[i] @ b[i] + om * (b[i] + bd[i])
            for j in range(n):
                h += v[i, j] * bd[i] @ b[j]
        self.h, self.b, self.bd, self.r, self.n = h, b, bd, r, n

    def __call__(self, rho):
        out = -1j * (self.h @ rho - rho @ self.h)
        for i in range(self.n):
            for j in range(self.n):
                bb = self.bd[j] @ self.b[i]
                out += self.r[i, j] * (self.b[i] @ rho @ self.bd[j]
                                       - 0.5 * (bb @ rho + rho @ bb))
        return out

    def relax(self, t_final=200.0, dt=0.01):
        """Classical RK4 from the ground state.  The equation is linear, so
        the step map is assembled once from the right-hand side and raised
        to the number of steps."""
        dim = self.h.shape[0]
        cols = []
        for k in range(dim * dim):
            e = np.zeros(dim * dim, dtype=complex)
            e[k] = 1.0
            cols.append(self(e.reshape(dim, dim)).ravel())
        a = dt * np.array(cols).T
        eye = np.eye(dim * dim)
        step = eye + a @ (eye + (a / 2) @ (eye + (a / 3) @ (eye + a / 4)))
        rho = np.zeros(dim * dim, dtype=complex)
        rho[0] = 1.0
        n_steps = int(round(t_final / dt))
        return (np.linalg.matrix_power(step, n_steps) @ rho).reshape(dim, dim)


@pytest.mark.parametrize("n,a,om,de", [(2, 0.3, 1.0, 0.0), (3, 0.25, 1.0, 0.0),
                                       (3, 0.08, 2.0, 0.0), (4, 0.3, 1.0, 0.5),
                                       (4, 0.08, 3.0, 0.0)])
def test_steady_state_matches_long_time_rk4_evolution(n, a, om, de):
    model = build_model(SystemParams(n, omega=om, delta=de, a_over_lambda=a))
    rho, info = solve_model(model, return_info=True)
    assert info.gap * 200 > 25       # relaxation is complete by t = 200
    rho_t = DenseMasterEquation(n, om, de, a).relax()
    assert trace_distance(rho, rho_t) < 1e-6


@given(st.floats(0.0, 5.0), st.floats(-3.0, 3.0))
@settings(max_examples=15)
def test_single_atom_steady_density(om, de):
    model = build_model(SystemParams(1, omega=om, delta=de))
    rho = solve_model(model)
    assert excitation_density(rho) == pytest.approx(single_atom_density(om, de), abs=1e-10)


@given(st.integers(1, 4), st.floats(0, 3), st.floats(-2, 2), st.integers(0, 2 ** 32 - 1))
@settings(max_examples=15)
def test_liouvillian_action_equals_direct_evaluation(n, om, de, seed):
    p = SystemParams(n, omega=om, delta=de)
    model = build_model(p)
    l = build_liouvillian(model.hamiltonian, model.coupling, params=p)
    rho = random_density(np.random.default_rng(seed), 2 ** n)
    direct = lindblad_rhs(rho, model.hamiltonian, model.coupling)
    assert np.allclose(l.apply(rho), direct, atol=1e-12)
    # Liouvillian is trace preserving and maps Hermitian to Hermitian
    assert abs(np.trace(direct)) < 1e-12
    assert np.allclose(direct, direct.conj().T, atol=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_term_wise_pauli_form_equals_basis_change(n):
    p = SystemParams(n, omega=0.8, delta=0.3)
    model = build_model(p)
    plain = build_liouvillian(model.hamiltonian, model.coupling)
    fast = pauli_liouvillian(p, model.coupling)
    assert np.allclose(plain.pauli_matrix().toarray(), fast.toarray(), atol=1e-12)


def test_vec_roundtrip_is_column_stacking():
    a = np.arange(9.0).reshape(3, 3)
    assert np.array_equal(vec(a), a.T.ravel())
    assert np.array_equal(unvec(vec(a), 3), a)


@pytest.mark.parametrize("n,om,de", [(1, 1.0, 0.0), (2, 0.4, -1.0), (5, 1.5, 0.7),
                                     (6, 1.0, 0.0)])
def test_density_matrix_invariants(n, om, de):
    rho, info = solve_model(build_model(SystemParams(n, omega=om, delta=de)),
                            return_info=True)
    rep = validate_density_matrix(rho)
    assert rep.passed, rep
    assert info.residual < 1e-10


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_undriven_chain_relaxes_to_ground_state(n):
    rho = solve_model(build_model(SystemParams(n, omega=0.0)))
    assert trace_distance(rho, ground_state_density(n)) < 1e-10


@pytest.mark.parametrize("n", [2, 4, 6])
def test_undriven_relaxation_gap_is_slowest_single_excitation_decay(n):
    # V and R do not commute on an open chain, so the slowest decay comes
    # from the single-excitation block V - iR/2, not from the darkest mode of R
    model = build_model(SystemParams(n, omega=0.0))
    rho, info = solve_model(model, return_info=True)
    assert trace_distance(rho, ground_state_density(n)) < 1e-10
    c = model.coupling
    slowest = (-2 * np.linalg.eigvals(c.v - 0.5j * c.r).imag).min()
    assert info.gap == pytest.approx(slowest, rel=1e-6)


def test_exactly_dark_state_is_reported_as_non_unique():
    # perfectly correlated decay of two atoms: the singlet never decays
    p = SystemParams(2, omega=0.0)
    coupling = CouplingMatrices(v=np.zeros((2, 2)), r=np.ones((2, 2)))
    model = build_model(p)
    l = build_liouvillian(model.hamiltonian, coupling)
    with pytest.raises(NonUniqueSteadyState):
        solve_steady_state(l)


def test_strong_drive_approaches_maximally_mixed_state():
    dists = [trace_distance(solve_model(build_model(SystemParams(3, omega=om))),
                            maximally_mixed(3)) for om in (5.0, 10.0, 20.0)]
    assert dists[0] > dists[1] > dists[2]


def test_capacity_limit():
    model = build_model(SystemParams(8))
    with pytest.raises(CapacityError):
        build_liouvillian(model.hamiltonian, model.coupling)


def test_unique_steady_state_does_not_depend_on_starting_vector():
    model = build_model(SystemParams(3, omega=1.1, delta=0.2))
    l = build_liouvillian(model.hamiltonian, model.coupling, params=model.params)
    rho = solve_steady_state(l)
    assert np.linalg.norm(l.apply(rho)) < 1e-12
