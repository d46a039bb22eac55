"""Chain geometry, dipole couplings and collective decay modes.

All rates are measured in units of the single-atom decay rate and all
times in units of its inverse; ``gamma`` on :class:`SystemParams` only
carries the physical value for converting outputs.

Atoms sit at ``r_alpha = alpha * a`` on an open chain. The driving laser
propagates perpendicular to the chain, so the drive carries no
site-dependent phase.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import NumericalError, ValidationError

__all__ = [
    "SystemParams", "PhysicalPreset", "PRESETS", "get_preset",
    "CouplingMatrices", "CollectiveModes",
    "kappa", "coherent_coupling", "dissipative_coupling",
    "build_coupling_matrices", "collective_modes",
]

# below this, dissipative_coupling switches to its Taylor series; the closed
# form loses about eps / kappa^3 to cancellation
_SMALL_KAPPA = 0.5
# Taylor coefficients of R in powers of kappa^2 (truncation error < 1e-16 at 0.5)
_R_SERIES = (1.0, -1 / 5, 3 / 280, -1 / 3780, 1 / 266112, -1 / 28828800,
             1 / 4447872000, -1 / 926269344000)


@dataclass(frozen=True)
class SystemParams:
    """Dimensionless model definition.

    ``omega`` and ``delta`` are the Rabi frequency and the detuning in units
    of the single-atom decay rate; ``gamma`` is that rate in s^-1 and is
    only used for unit conversion of reported rates.
    """

    n_atoms: int
    omega: float = 1.0
    delta: float = 0.0
    a_over_lambda: float = 0.08
    gamma: float = 1.0

    def __post_init__(self):
        if isinstance(self.n_atoms, bool) or int(self.n_atoms) != self.n_atoms:
            raise ValidationError("must be an integer", field="n_atoms")
        if self.n_atoms < 1:
            raise ValidationError("must be >= 1", field="n_atoms")
        if not np.isfinite(self.a_over_lambda) or self.a_over_lambda <= 0:
            raise ValidationError("must be > 0", field="a_over_lambda")
        if not np.isfinite(self.gamma) or self.gamma <= 0:
            raise ValidationError("must be > 0", field="gamma")
        for name in ("omega", "delta"):
            if not np.isfinite(getattr(self, name)):
                raise ValidationError("must be finite", field=name)
        object.__setattr__(self, "n_atoms", int(self.n_atoms))

    @property
    def dim(self):
        return 2 ** self.n_atoms


@dataclass(frozen=True)
class PhysicalPreset:
    name: str
    wavelength: float       # m
    dipole: float           # Debye
    gamma_si: float         # s^-1
    lattice_const: float    # m
    rounded_a_over_lambda: float | None = None
    note: str = ""

    @property
    def a_over_lambda(self):
        return self.lattice_const / self.wavelength


PRESETS = {
    "sr88": PhysicalPreset(
        name="sr88",
        wavelength=2.6e-6,
        dipole=4.03,
        gamma_si=290e3,
        lattice_const=206.4e-9,
        rounded_a_over_lambda=0.08,
        note="3P0 -> 3D1 transition of bosonic strontium in a 412.8 nm "
             "magic-wavelength lattice; a/lambda = 0.0794, commonly "
             "rounded to 0.08",
    ),
}


def get_preset(name):
    try:
        return PRESETS[name]
    except KeyError:
        raise ValidationError(
            f"unknown preset '{name}' (known: {', '.join(sorted(PRESETS))})",
            field="preset") from None


def kappa(d, params):
    """Dimensionless phase ``2 pi d a / lambda`` for sites ``d`` apart."""
    d = np.asarray(d)
    if np.any(d < 1) or np.any(d != np.round(d)):
        raise ValidationError("site separation must be an integer >= 1",
                              field="d")
    return 2.0 * np.pi * d * params.a_over_lambda


def coherent_coupling(k):
    """Dipole-dipole exchange rate V(kappa), in units of the decay rate."""
    k = np.asarray(k, dtype=float)
    if np.any(~(k > 0)):
        raise ValidationError("kappa must be > 0", field="kappa")
    c, s = np.cos(k), np.sin(k)
    out = 0.75 * (-c / k + s / k**2 + c / k**3)
    return out[()] if out.ndim == 0 else out


def dissipative_coupling(k):
    """Collective decay rate R(kappa); equals 1 at kappa = 0.

    Uses a Taylor series near zero where the closed form cancels
    catastrophically.
    """
    k = np.asarray(k, dtype=float)
    if np.any(np.isnan(k)):
        raise ValidationError("kappa is NaN", field="kappa")
    if np.any(k < 0):
        raise ValidationError("kappa must be >= 0", field="kappa")
    small = k < _SMALL_KAPPA
    kk = np.where(small, 1.0, k)
    c, s = np.cos(kk), np.sin(kk)
    closed = 1.5 * (s / kk + c / kk**2 - s / kk**3)
    series = np.polynomial.polynomial.polyval(k * k, _R_SERIES)
    out = np.where(small, series, closed)
    return out[()] if out.ndim == 0 else out


@dataclass(frozen=True)
class CouplingMatrices:
    """Toeplitz coupling matrices of an open chain.

    ``v`` has a zero diagonal (never used); ``r`` has unit diagonal.
    """

    v: np.ndarray
    r: np.ndarray

    @property
    def n_atoms(self):
        return self.r.shape[0]

    def r_at(self, d):
        """R between sites ``d`` apart."""
        return self.r[0, d]


def build_coupling_matrices(params):
    n = params.n_atoms
    idx = np.arange(n)
    sep = np.abs(idx[:, None] - idx[None, :])
    v = np.zeros((n, n))
    r = np.eye(n)
    if n > 1:
        ks = kappa(np.arange(1, n), params)
        v_d = np.concatenate([[0.0], coherent_coupling(ks)])
        r_d = np.concatenate([[1.0], dissipative_coupling(ks)])
        v = v_d[sep]
        r = r_d[sep]
    v.setflags(write=False)
    r.setflags(write=False)
    return CouplingMatrices(v=v, r=r)


@dataclass(frozen=True)
class CollectiveModes:
    """Eigen-decomposition of the dissipative coupling matrix.

    Column ``m`` of ``vectors`` holds the coefficients ``X[alpha, m]`` of the
    collective lowering operator ``J_m = sum_alpha X[alpha, m] b_alpha``,
    which decays at ``rates[m]``.  Rates are sorted in descending order.
    """

    rates: np.ndarray
    vectors: np.ndarray
    raw_rates: np.ndarray = field(repr=False)

    @property
    def n_modes(self):
        return self.rates.shape[0]


def collective_modes(coupling, clamp_tol=1e-10):
    """Diagonalise ``R``; clamp roundoff negatives in ``[-clamp_tol, 0)``."""
    r = np.asarray(coupling.r)
    if not np.allclose(r, r.T, rtol=0, atol=1e-14):
        raise ValidationError("R must be symmetric", field="r")
    w, x = np.linalg.eigh(r)
    order = np.argsort(w)[::-1]
    w, x = w[order], x[:, order]
    if w.size and w[-1] < -clamp_tol:
        raise NumericalError(
            f"R not positive semidefinite: eigenvalue {w[-1]:.3e}")
    rates = np.where(w < 0, 0.0, w)
    # deterministic sign: first non-negligible component positive
    pivot = np.argmax(np.abs(x) > 1e-8, axis=0)
    x = x * np.sign(x[pivot, np.arange(x.shape[1])])
    for a in (rates, x, w):
        a.setflags(write=False)
    return CollectiveModes(rates=rates, vectors=x, raw_rates=w)
