"""Homogeneous mean-field theory of the driven chain.

Factorising ``<b_a^dag b_b> -> |s|^2`` and ``<n_a b_b> -> n s`` (a != b) for a
translation-invariant state gives, with ``w = 2n - 1``::

    ds/dt = (i delta - 1/2) s + i omega w + w (i V~ + R~/2) s
    dn/dt = -2 omega Im(s) - n - R~ |s|^2

where ``V~`` and ``R~`` are the summed couplings of one atom to all others.
Eliminating ``s`` leaves a cubic in ``w``; with ``A = (1 - w R~)/2`` and
``B = delta + w V~`` the stationary condition reads
``n (A^2 + B^2) + omega^2 w (2A + R~ w) = 0``.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

__all__ = [
    "MeanFieldSums", "MeanFieldState", "mean_field_sums", "mf_rhs",
    "mf_jacobian", "mf_jacobian_fd", "mf_stationary_roots", "Stability",
    "mf_stability", "BistabilityScan", "bistable_region_scan",
    "stable_branches", "large_drive_asymptote",
]

# Larger drives leave the n ~ 1/2 root below float resolution of w
_ROOT_IMAG_TOL = 1e-7


@dataclass(frozen=True)
class MeanFieldSums:
    v_tilde: float
    r_tilde: float

    def __post_init__(self):
        if not (np.isfinite(self.v_tilde) and np.isfinite(self.r_tilde)):
            raise ValidationError("sums must be finite", field="sums")
        if self.r_tilde < -1.0:
            raise ValidationError("r_tilde < -1 gives negative decay",
                                  field="r_tilde")


INDEPENDENT = MeanFieldSums(0.0, 0.0)


def mean_field_sums(coupling):
    """Site-averaged row sums of V and R without the self term.

    Rows of an open chain differ; their mean is used as the homogeneous
    surrogate.
    """
    v = np.array(coupling.v, dtype=float)
    r = np.array(coupling.r, dtype=float)
    np.fill_diagonal(v, 0.0)
    np.fill_diagonal(r, 0.0)
    return MeanFieldSums(float(v.sum(axis=1).mean()),
                         float(r.sum(axis=1).mean()))


@dataclass(frozen=True)
class MeanFieldState:
    s: complex
    n: float

    @property
    def bloch_excess(self):
        """``|s|^2 - n(1 - n)``; physical states have it <= 0."""
        return abs(self.s) ** 2 - self.n * (1.0 - self.n)

    def as_real(self):
        return np.array([self.s.real, self.s.imag, self.n])


def mf_rhs(state, params, sums):
    s, n = complex(state.s), float(state.n)
    w = 2.0 * n - 1.0
    ds = ((1j * params.delta - 0.5) * s + 1j * params.omega * w
          + w * (1j * sums.v_tilde + 0.5 * sums.r_tilde) * s)
    dn = -2.0 * params.omega * s.imag - n - sums.r_tilde * abs(s) ** 2
    return ds, dn


def _rhs_real(y, params, sums):
    ds, dn = mf_rhs(MeanFieldState(complex(y[0], y[1]), y[2]), params, sums)
    return np.array([ds.real, ds.imag, dn])


def mf_jacobian(state, params, sums):
    """Analytic Jacobian in coordinates (Re s, Im s, n)."""
    x, p, n = state.s.real, state.s.imag, state.n
    w = 2.0 * n - 1.0
    rt, vt, om = sums.r_tilde, sums.v_tilde, params.omega
    a = 0.5 - 0.5 * w * rt
    b = params.delta + w * vt
    return np.array([
        [-a, -b, rt * x - 2.0 * vt * p],
        [b, -a, rt * p + 2.0 * vt * x + 2.0 * om],
        [-2.0 * rt * x, -2.0 * om - 2.0 * rt * p, -1.0],
    ])


def mf_jacobian_fd(state, params, sums, step=1e-6):
    y0 = state.as_real()
    jac = np.empty((3, 3))
    for k in range(3):
        e = np.zeros(3)
        e[k] = step
        jac[:, k] = (_rhs_real(y0 + e, params, sums)
                     - _rhs_real(y0 - e, params, sums)) / (2 * step)
    return jac


def _cubic(params, sums):
    """Coefficients (highest first) of the stationary condition in w."""
    rt, vt = sums.r_tilde, sums.v_tilde
    a = np.poly1d([-0.5 * rt, 0.5])
    b = np.poly1d([vt, params.delta])
    n = np.poly1d([0.5, 0.5])
    w = np.poly1d([1.0, 0.0])
    poly = n * (a * a + b * b) + params.omega ** 2 * w * (2 * a + rt * w)
    return poly


def _state_from_w(w, params, sums):
    a = 0.5 - 0.5 * w * sums.r_tilde
    b = params.delta + w * sums.v_tilde
    s = 1j * params.omega * w / (a - 1j * b)
    return MeanFieldState(complex(s), 0.5 * (1.0 + w))


def _polish(state, params, sums, tol=1e-13, max_iter=50):
    y = state.as_real()
    f = _rhs_real(y, params, sums)
    for _ in range(max_iter):
        if np.abs(f).max() < tol:
            break
        jac = mf_jacobian(MeanFieldState(complex(y[0], y[1]), y[2]), params, sums)
        try:
            step = np.linalg.solve(jac, -f)
        except np.linalg.LinAlgError:
            break
        lam = 1.0
        while lam > 1e-4:
            trial = y + lam * step
            ft = _rhs_real(trial, params, sums)
            if np.abs(ft).max() < np.abs(f).max():
                y, f = trial, ft
                break
            lam *= 0.5
        else:
            break
    return MeanFieldState(complex(y[0], y[1]), float(y[2]))


def mf_stationary_roots(params, sums):
    """Physical fixed points, sorted by increasing excitation density."""
    poly = _cubic(params, sums)
    scale = np.abs(poly.coeffs).max()
    roots = []
    for w in np.roots(poly.coeffs / scale):
        if abs(w.imag) > _ROOT_IMAG_TOL * max(1.0, abs(w)):
            continue
        w = float(w.real)
        if not -1.0 - 1e-9 <= w <= 1e-12:
            continue
        state = _polish(_state_from_w(min(max(w, -1.0), 0.0), params, sums),
                        params, sums)
        if not -1e-12 <= state.n <= 0.5 + 1e-12:
            continue
        if state.bloch_excess > 1e-10:
            continue
        if any(abs(state.n - r.n) < 1e-9 and abs(state.s - r.s) < 1e-9
               for r in roots):
            continue
        roots.append(state)
    return sorted(roots, key=lambda r: r.n)


@dataclass
class Stability:
    label: str            # "stable", "unstable" or "marginal"
    eigenvalues: np.ndarray

    @property
    def stable(self):
        return self.label == "stable"


def mf_stability(state, params, sums, marginal_tol=1e-8):
    ds, dn = mf_rhs(state, params, sums)
    if max(abs(ds), abs(dn)) > 1e-10:
        raise ValidationError("not a fixed point (|rhs| > 1e-10)", field="state")
    ev = np.linalg.eigvals(mf_jacobian(state, params, sums))
    top = ev.real.max()
    if abs(top) <= marginal_tol:
        label = "marginal"
    elif top < 0:
        label = "stable"
    else:
        label = "unstable"
    return Stability(label, ev)


def stable_branches(params, sums):
    """(stable roots, unstable roots) at one parameter point."""
    stable, unstable = [], []
    for root in mf_stationary_roots(params, sums):
        (stable if mf_stability(root, params, sums).stable else unstable).append(root)
    return stable, unstable


@dataclass
class BistabilityScan:
    omegas: np.ndarray
    deltas: np.ndarray
    n_stable: np.ndarray   # shape (len(omegas), len(deltas))
    n_low: np.ndarray      # NaN where absent
    n_high: np.ndarray

    @property
    def bistable(self):
        return self.n_stable >= 2

    def boundary_cells(self):
        """Cells whose stable-root count differs from a grid neighbour."""
        c = self.n_stable
        edge = np.zeros_like(c, dtype=bool)
        edge[1:, :] |= c[1:, :] != c[:-1, :]
        edge[:-1, :] |= c[1:, :] != c[:-1, :]
        edge[:, 1:] |= c[:, 1:] != c[:, :-1]
        edge[:, :-1] |= c[:, 1:] != c[:, :-1]
        return np.argwhere(edge & self.bistable)

    def boundary_polyline(self):
        """Lobe outline as (omega, delta) points: for every detuning column
        the smallest and largest bistable drive, traced around the lobe."""
        lower, upper = [], []
        for j, delta in enumerate(self.deltas):
            rows = np.flatnonzero(self.bistable[:, j])
            if rows.size:
                lower.append((self.omegas[rows[0]], delta))
                upper.append((self.omegas[rows[-1]], delta))
        return np.array(lower + upper[::-1]) if lower else np.empty((0, 2))

    def rows(self):
        out = []
        for i, om in enumerate(self.omegas):
            for j, de in enumerate(self.deltas):
                out.append((float(om), float(de), int(self.n_stable[i, j]),
                            self.n_low[i, j], self.n_high[i, j]))
        return out


def bistable_region_scan(omegas, deltas, sums):
    omegas = np.asarray(omegas, dtype=float)
    deltas = np.asarray(deltas, dtype=float)
    count = np.zeros((omegas.size, deltas.size), dtype=int)
    low = np.full(count.shape, np.nan)
    high = np.full(count.shape, np.nan)
    for i, om in enumerate(omegas):
        for j, de in enumerate(deltas):
            point = _Point(om, de)
            stable, _ = stable_branches(point, sums)
            count[i, j] = len(stable)
            if stable:
                low[i, j] = stable[0].n
                if len(stable) > 1:
                    high[i, j] = stable[-1].n
    return BistabilityScan(omegas, deltas, count, low, high)


@dataclass(frozen=True)
class _Point:
    omega: float
    delta: float


def large_drive_asymptote(sums, delta=0.0, omegas=None):
    """Fit ``1/2 - n`` on the upper branch against ``omega``.

    Returns ``(slope, coefficient)`` where the log-log slope should be -2 and
    ``1/2 - n ~ coefficient * (1 + 4 delta^2) / omega^2``.
    """
    if omegas is None:
        omegas = np.geomspace(10.0, 100.0, 25)
    dev = []
    for om in omegas:
        roots = mf_stationary_roots(_Point(om, delta), sums)
        dev.append(0.5 - roots[-1].n)
    dev = np.asarray(dev)
    slope, intercept = np.polyfit(np.log(omegas), np.log(dev), 1)
    coefficient = float(np.median(dev * omegas ** 2 / (1.0 + 4.0 * delta ** 2)))
    return float(slope), coefficient
