import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.special import spherical_jn, spherical_yn

from collective_decay import (SystemParams, ValidationError, build_coupling_matrices,
                              coherent_coupling, collective_modes, dissipative_coupling,
                              get_preset, kappa)
from collective_decay.errors import NumericalError
from collective_decay.lattice import CouplingMatrices


def r_oracle(k):
    # dipole decay kernel for dipoles perpendicular to the chain, via spherical Bessels
    return 1.5 * (spherical_jn(0, k) - spherical_jn(1, k) / k)


def v_oracle(k):
    return 0.75 * (spherical_yn(0, k) - spherical_yn(1, k) / k)


def test_nearest_neighbour_values_at_a_over_lambda_008():
    k1 = kappa(1, SystemParams(2))
    assert k1 == pytest.approx(0.5026548, abs=1e-7)
    assert coherent_coupling(k1) == pytest.approx(5.29748698, abs=1e-7)
    assert dissipative_coupling(k1) == pytest.approx(0.95014735, abs=1e-7)


@given(st.floats(min_value=1e-2, max_value=60.0))
def test_couplings_match_spherical_bessel_form(k):
    assert dissipative_coupling(k) == pytest.approx(r_oracle(k), rel=1e-9, abs=1e-12)
    assert coherent_coupling(k) == pytest.approx(v_oracle(k), rel=1e-9, abs=1e-12)


def test_dissipative_coupling_is_continuous_at_series_switch():
    below = dissipative_coupling(np.nextafter(0.5, 0))
    above = dissipative_coupling(0.5)
    assert abs(below - above) < 1e-14
    assert dissipative_coupling(0.0) == 1.0


@given(st.floats(min_value=1e-6, max_value=3.0))
def test_small_kappa_series_agrees_with_closed_form_in_extended_precision(k):
    import mpmath as mp
    mp.mp.dps = 50
    kk = mp.mpf(k)
    exact = 1.5 * (mp.sin(kk) / kk + mp.cos(kk) / kk**2 - mp.sin(kk) / kk**3)
    assert dissipative_coupling(k) == pytest.approx(float(exact), abs=2e-15)


def test_invalid_inputs():
    with pytest.raises(ValidationError, match="n_atoms"):
        SystemParams(-2)
    with pytest.raises(ValidationError, match="a_over_lambda"):
        SystemParams(2, a_over_lambda=0.0)
    with pytest.raises(ValidationError):
        SystemParams(2, omega=np.nan)
    with pytest.raises(ValidationError):
        coherent_coupling(0.0)
    with pytest.raises(ValidationError):
        dissipative_coupling(-1.0)
    with pytest.raises(ValidationError):
        kappa(0, SystemParams(2))


def test_coupling_matrices_are_symmetric_toeplitz():
    c = build_coupling_matrices(SystemParams(5))
    assert np.array_equal(c.r, c.r.T) and np.array_equal(c.v, c.v.T)
    assert np.all(np.diag(c.r) == 1.0) and np.all(np.diag(c.v) == 0.0)
    for d in range(1, 5):
        assert np.allclose(np.diagonal(c.r, d), c.r_at(d))
    with pytest.raises(ValueError):
        c.r[0, 1] = 0.0


def test_two_atom_modes_are_super_and_subradiant():
    c = build_coupling_matrices(SystemParams(2))
    modes = collective_modes(c)
    r12 = r_oracle(2 * np.pi * 0.08)
    assert r12 == pytest.approx(0.950, abs=5e-4)
    assert np.allclose(modes.rates, [1 + r12, 1 - r12], atol=1e-10, rtol=0)
    s = 1 / np.sqrt(2)
    assert np.allclose(modes.vectors, [[s, s], [s, -s]], atol=1e-12)


@given(st.integers(1, 9), st.floats(0.02, 0.6))
def test_modes_reconstruct_r_and_rates_sum_to_n(n, a):
    c = build_coupling_matrices(SystemParams(n, a_over_lambda=a))
    modes = collective_modes(c)
    assert np.all(modes.rates >= 0)
    assert np.all(np.diff(modes.rates) <= 1e-12)
    assert modes.rates.sum() == pytest.approx(n, abs=1e-9)
    x = modes.vectors
    assert np.allclose(x @ np.diag(modes.rates) @ x.T, c.r, atol=1e-9)
    assert np.allclose(x.T @ x, np.eye(n), atol=1e-12)


def test_dense_chain_clamps_roundoff_but_rejects_indefinite_r():
    c = build_coupling_matrices(SystemParams(12))
    modes = collective_modes(c)
    assert modes.rates.min() >= 0.0
    bad = CouplingMatrices(v=np.zeros((2, 2)), r=np.array([[1.0, 1.5], [1.5, 1.0]]))
    with pytest.raises(NumericalError, match="positive semidefinite"):
        collective_modes(bad)


def test_sr88_preset():
    p = get_preset("sr88")
    assert p.a_over_lambda == pytest.approx(0.0794, abs=1e-4)
    assert p.rounded_a_over_lambda == 0.08
    assert "0.08" in p.note
    with pytest.raises(ValidationError, match="preset"):
        get_preset("cs133")
