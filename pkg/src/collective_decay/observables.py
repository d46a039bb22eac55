"""Static and dynamic observables of chain steady states and trajectories."""

from dataclasses import dataclass

import numpy as np
from scipy.signal import find_peaks

from .errors import ValidationError
from .operators import build_jump_operators, excitation_counts, site_mask

__all__ = [
    "excitation_density", "coherence_matrix", "emission_rate",
    "spatial_coherence", "coherence_identity_residual",
    "nn_coherence_estimate", "ObservableSummary", "summarize",
    "Histogram", "build_histogram", "trace_distance",
]


def _n_atoms(rho):
    dim = np.asarray(rho).shape[0]
    n = int(round(np.log2(dim)))
    if 2 ** n != dim or np.asarray(rho).shape != (dim, dim):
        raise ValidationError(f"shape {np.shape(rho)} is not 2^N x 2^N",
                              field="rho")
    return n


def excitation_density(rho):
    """Mean fraction of excited atoms, ``sum_a Tr(n_a rho) / N``."""
    n = _n_atoms(rho)
    tr = np.trace(rho)
    if abs(tr - 1.0) > 1e-8:
        raise ValidationError(f"trace defect {abs(tr - 1):.2e}", field="rho")
    return float(np.real(np.diagonal(rho) @ excitation_counts(n))) / n


def coherence_matrix(rho):
    """``G[a, b] = Tr(b_a^dag b_b rho)``."""
    n = _n_atoms(rho)
    rho = np.asarray(rho)
    x = np.arange(2 ** n)
    g = np.zeros((n, n), dtype=complex)
    for a in range(n):
        ma = site_mask(a, n)
        for b in range(n):
            mb = site_mask(b, n)
            if a == b:
                sel = x[(x & ma) != 0]
                g[a, a] = rho[sel, sel].sum()
                continue
            # <y| b_a^dag b_b |x> = 1 for x with b excited, a ground
            sel = x[((x & mb) != 0) & ((x & ma) == 0)]
            g[a, b] = rho[sel, sel ^ ma ^ mb].sum()
    return g


def emission_rate(rho, modes):
    """Total photon emission rate ``sum_m gamma_m <J_m^dag J_m>``."""
    n = _n_atoms(rho)
    rho = np.asarray(rho)
    total = 0.0
    for rate, j in build_jump_operators(modes, n):
        jr = j @ rho
        total += rate * np.real(np.trace((j @ jr.conj().T).conj().T))
    return float(total)


def spatial_coherence(rho, d, g=None):
    """Average ``Re <b_a^dag b_{a+d}>`` over the ``N - d`` pairs."""
    n = _n_atoms(rho)
    if not 1 <= d <= n - 1:
        raise ValidationError(f"d={d} outside 1..{n - 1}", field="d")
    if g is None:
        g = coherence_matrix(rho)
    vals = np.diagonal(g, offset=d)
    sym = 0.5 * (vals + np.conj(np.diagonal(g, offset=-d)))
    return float(np.mean(sym.real))


def coherence_identity_residual(n_s, k_s, c_d, coupling):
    """|k_s - N n_s - 2 sum_d R(d) (N - d) C_d| for one state."""
    n = coupling.n_atoms
    c_d = np.asarray(c_d, dtype=float)
    d = np.arange(1, n)
    rhs = 2.0 * np.sum(coupling.r[0, 1:] * (n - d) * c_d)
    return float(abs(k_s - n * n_s - rhs))


def nn_coherence_estimate(n_s, k_s, coupling):
    """Nearest-neighbour coherence inferred from global observables.

    Exact only when coherences beyond nearest neighbours vanish (always
    for two atoms).
    """
    n = coupling.n_atoms
    if n < 2:
        raise ValidationError("needs at least two atoms", field="n_atoms")
    r12 = coupling.r[0, 1]
    if r12 == 0:
        raise ValidationError("R_12 = 0, estimator undefined", field="r")
    return float((k_s - n * n_s) / (2.0 * (n - 1) * r12))


@dataclass
class ObservableSummary:
    n_s: float
    k_s: float
    c_d: np.ndarray
    identity_residual: float
    n_atoms: int

    @property
    def k_s_over_n(self):
        return self.k_s / self.n_atoms

    @property
    def excess(self):
        """``k_s / N - n_s`` (zero for independent emitters)."""
        return self.k_s / self.n_atoms - self.n_s


def summarize(rho, model):
    g = coherence_matrix(rho)
    n = model.n_atoms
    n_s = excitation_density(rho)
    k_s = emission_rate(rho, model.modes)
    c_d = np.array([spatial_coherence(rho, d, g) for d in range(1, n)])
    res = coherence_identity_residual(n_s, k_s, c_d, model.coupling)
    return ObservableSummary(n_s=n_s, k_s=k_s, c_d=c_d,
                             identity_residual=res, n_atoms=n)


@dataclass
class Histogram:
    edges: np.ndarray
    counts: np.ndarray
    total: float
    normalized: bool = False

    @property
    def centers(self):
        return 0.5 * (self.edges[1:] + self.edges[:-1])

    def density(self):
        return self.counts / (self.total * np.diff(self.edges))

    def smoothed(self, window=3):
        kernel = np.ones(window) / window
        return np.convolve(self.counts, kernel, mode="same")

    def mode_count(self, window=3, prominence=0.05):
        """Number of local maxima of the smoothed histogram.

        Peaks must rise by ``prominence`` times the tallest bin above their
        surroundings; edge bins count as peaks.
        """
        sm = np.concatenate([[0.0], self.smoothed(window), [0.0]])
        peaks, _ = find_peaks(sm, prominence=prominence * sm.max())
        return len(peaks)

    def peak_locations(self, window=3, prominence=0.05):
        """Bin centres of the modes, each moved to the tallest raw bin under
        its smoothing window."""
        sm = np.concatenate([[0.0], self.smoothed(window), [0.0]])
        peaks, _ = find_peaks(sm, prominence=prominence * sm.max())
        half = window // 2
        out = []
        for p in peaks - 1:
            lo = max(p - half, 0)
            out.append(self.centers[lo + np.argmax(self.counts[lo:p + half + 1])])
        return np.array(out)

    def rows(self):
        return [(float(lo), float(hi), float(c))
                for lo, hi, c in zip(self.edges[:-1], self.edges[1:], self.counts)]


def build_histogram(samples, n_bins=None, bin_width=None, value_range=None,
                    weights=None):
    """Uniform-bin histogram; give exactly one of ``n_bins``/``bin_width``.

    With ``bin_width`` and no range the bins are centred on multiples of the
    width, which suits discrete samples such as binned jump counts.
    """
    samples = np.asarray(samples, dtype=float).ravel()
    if samples.size == 0:
        raise ValidationError("no samples", field="samples")
    if (n_bins is None) == (bin_width is None):
        raise ValidationError("give exactly one of n_bins, bin_width",
                              field="n_bins")
    if bin_width is not None:
        if value_range is None:
            lo = (np.floor(samples.min() / bin_width) - 0.5) * bin_width
            hi = (np.ceil(samples.max() / bin_width) + 0.5) * bin_width
        else:
            lo, hi = value_range
        n_bins = max(1, int(np.ceil((hi - lo) / bin_width - 1e-9)))
        edges = lo + bin_width * np.arange(n_bins + 1)
    else:
        if value_range is None:
            lo, hi = samples.min(), samples.max()
            if hi == lo:
                lo, hi = lo - 0.5, hi + 0.5
        else:
            lo, hi = value_range
        edges = np.linspace(lo, hi, n_bins + 1)
    counts, _ = np.histogram(samples, bins=edges, weights=weights)
    counts = counts.astype(float)
    return Histogram(edges=edges, counts=counts, total=float(counts.sum()))


def trace_distance(rho, sigma):
    rho, sigma = np.asarray(rho), np.asarray(sigma)
    if rho.shape != sigma.shape:
        raise ValidationError(f"shapes {rho.shape} and {sigma.shape} differ",
                              field="sigma")
    diff = rho - sigma
    w = np.linalg.eigvalsh(0.5 * (diff + diff.conj().T))
    return float(0.5 * np.abs(w).sum())
