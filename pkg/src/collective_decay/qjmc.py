"""Quantum-jump Monte Carlo for the driven chain.

Each trajectory starts in the all-ground state and evolves under the
non-Hermitian generator ``H_eff = H - (i/2) sum_m gamma_m J_m^dag J_m`` until
its squared norm falls to a uniform random threshold; then a collective
jump ``J_m`` is applied with probability proportional to
``gamma_m ||J_m psi||^2`` and a new threshold is drawn.

Trajectories are propagated in fixed batches ("chunks") on a uniform time
grid with the exact step propagator ``expm(-i H_eff dt)``.  Columns whose
norm crosses their threshold inside a step are re-propagated from the
start of the step with a Krylov (Arnoldi) approximation of the same
exponential, in which the jump time is bisected to ``norm_tol``.

Randomness comes from one counter-based Philox stream per trajectory keyed
by ``(master_seed, trajectory index)``.  Chunks are cut by trajectory
index from ``chunk_size`` alone, so results are bit-identical whatever the
number of worker processes.
"""

import gzip
import io
import multiprocessing
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp
from threadpoolctl import threadpool_limits

from .errors import NumericalError, ValidationError
from .operators import excitation_counts, site_mask

__all__ = [
    "QjmcConfig", "TrajectoryRecord", "Propagator", "EnsembleResult",
    "evolve_trajectory", "run_ensemble", "WindowSamples",
    "stationary_window_samples", "write_record", "read_record",
    "trajectory_rngs",
]

MAX_QJMC_ATOMS = 12

# below this dimension H_eff is applied as a dense matrix in the Arnoldi loop
_DENSE_KRYLOV_DIM = 512
# up to this dimension jump times are located in the eigenbasis of H_eff
_SPECTRAL_DIM = 256


@dataclass(frozen=True)
class QjmcConfig:
    """Sampling and integration settings (times in units of 1/Gamma).

    ``max_step`` bounds the propagation grid; the grid step is the largest
    divisor of ``sample_dt`` not exceeding it.  ``norm_tol`` bounds
    ``| ||psi||^2 - r |`` at every located jump.
    """

    n_trajectories: int = 2000
    t_final: float = 50.0
    t_stationary: float = 25.0
    sample_dt: float = 0.1
    master_seed: int = 0
    max_step: float = 0.1
    norm_tol: float = 1e-6
    krylov_dim: int = 12
    krylov_tol: float = 1e-10
    chunk_size: int = 250
    bin_width: float = 1.0
    projective: bool = False
    record_coherences: bool = False

    def __post_init__(self):
        if int(self.n_trajectories) != self.n_trajectories or self.n_trajectories < 1:
            raise ValidationError("must be a positive integer", field="n_trajectories")
        if not 0 <= self.t_stationary < self.t_final:
            raise ValidationError("need 0 <= t_stationary < t_final",
                                  field="t_stationary")
        for name in ("sample_dt", "max_step", "norm_tol", "bin_width", "krylov_tol"):
            if not getattr(self, name) > 0:
                raise ValidationError("must be > 0", field=name)
        ratio = self.t_final / self.sample_dt
        if abs(ratio - round(ratio)) > 1e-9 * max(1.0, ratio):
            raise ValidationError("t_final must be a multiple of sample_dt",
                                  field="t_final")
        if self.krylov_dim < 2:
            raise ValidationError("must be >= 2", field="krylov_dim")
        if self.chunk_size < 1:
            raise ValidationError("must be >= 1", field="chunk_size")
        if not 0 <= self.master_seed < 2 ** 64:
            raise ValidationError("must fit in 64 bits", field="master_seed")

    @property
    def substeps(self):
        return max(1, int(np.ceil(self.sample_dt / self.max_step - 1e-9)))

    @property
    def dt(self):
        return self.sample_dt / self.substeps

    @property
    def n_samples(self):
        return int(round(self.t_final / self.sample_dt)) + 1

    @property
    def window(self):
        return self.t_final - self.t_stationary


@dataclass
class TrajectoryRecord:
    index: int
    seed: tuple
    jump_times: np.ndarray
    jump_channels: np.ndarray
    sample_times: np.ndarray
    density: np.ndarray
    coherences: np.ndarray | None = None     # (n_samples, N-1): C_d per sample
    jump_norm_errors: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def n_jumps(self):
        return self.jump_times.size


def trajectory_rngs(master_seed, index):
    """(jump stream, measurement stream) for one trajectory."""
    jump_ss, meas_ss = np.random.SeedSequence([master_seed, index]).spawn(2)
    return (np.random.Generator(np.random.Philox(jump_ss)),
            np.random.Generator(np.random.Philox(meas_ss)))


class Propagator:
    """Per-model data shared read-only by every chunk."""

    def __init__(self, model, config):
        n = model.n_atoms
        if n > MAX_QJMC_ATOMS:
            raise ValidationError(
                f"N={n} exceeds the dense-propagator limit N={MAX_QJMC_ATOMS}",
                field="n_atoms")
        self.n_atoms = n
        self.dim = 2 ** n
        self.config = config
        h_eff = model.h_eff
        dense = h_eff.toarray()
        if self.dim <= _DENSE_KRYLOV_DIM:
            self.generator = -1j * dense
        else:
            self.generator = sp.csr_matrix(-1j * h_eff)
        self.step = la.expm(-1j * config.dt * dense)
        self.spectral = None
        if self.dim <= _SPECTRAL_DIM:
            lam, w = np.linalg.eig(-1j * dense)
            if np.linalg.cond(w) < 1e8:
                self.spectral = (lam, w, np.linalg.inv(w), w.conj().T @ w)
        del dense
        self.counts = excitation_counts(n).astype(float)
        self.rates = np.asarray(model.modes.rates, dtype=float)
        self.vectors = np.asarray(model.modes.vectors, dtype=float)
        x = np.arange(self.dim)
        self.lower_src = []
        self.lower_dst = []
        for a in range(n):
            m = site_mask(a, n)
            src = x[(x & m) != 0]
            self.lower_src.append(src)
            self.lower_dst.append(src ^ m)

    def lowered(self, psi):
        """``b_a psi`` for all sites: shape (N, dim, cols)."""
        out = np.zeros((self.n_atoms,) + psi.shape, dtype=complex)
        for a in range(self.n_atoms):
            out[a, self.lower_dst[a]] = psi[self.lower_src[a]]
        return out

    def density(self, psi):
        p = np.abs(psi) ** 2
        return (self.counts @ p) / (self.n_atoms * p.sum(axis=0))

    def coherences(self, psi):
        """Per-column C_d = mean_a Re <b_a^dag b_{a+d}>, shape (cols, N-1)."""
        lowered = self.lowered(psi)
        norm = (np.abs(psi) ** 2).sum(axis=0)
        g = np.einsum("adc,bdc->cab", lowered.conj(), lowered) / norm[:, None, None]
        n = self.n_atoms
        return np.stack([np.diagonal(g, offset=d, axis1=1, axis2=2).real.mean(axis=1)
                         for d in range(1, n)], axis=1) if n > 1 else np.zeros((psi.shape[1], 0))

    # -- jump-time machinery ----------------------------------------------
    def local_space(self, psi):
        """Cheap representation of ``tau -> exp(-i H_eff tau) psi``."""
        if self.spectral is not None:
            return _SpectralSpace(self.spectral, psi)
        return self.arnoldi(psi)

    def arnoldi(self, psi):
        """Batched Arnoldi of ``-i H_eff`` started on the columns of psi."""
        m = min(self.config.krylov_dim, self.dim)
        cols = psi.shape[1]
        beta = np.linalg.norm(psi, axis=0)
        # batch-major: basis[c, k] is the k-th Krylov vector of column c
        basis = np.zeros((cols, m + 1, self.dim), dtype=complex)
        conj = np.zeros_like(basis)
        hess = np.zeros((cols, m + 1, m), dtype=complex)
        basis[:, 0] = (psi / beta).T
        conj[:, 0] = basis[:, 0].conj()
        for j in range(m):
            w = np.ascontiguousarray((self.generator @ basis[:, j].T).T)
            for _ in range(2):
                h = np.matmul(conj[:, :j + 1], w[:, :, None])[:, :, 0]
                w -= np.matmul(h[:, None, :], basis[:, :j + 1])[:, 0]
                hess[:, :j + 1, j] += h
            hn = np.linalg.norm(w, axis=1)
            ok = hn > 1e-12 * np.maximum(1.0, np.abs(hess[:, :j + 1, j]).max(axis=1))
            basis[:, j + 1] = np.where(ok[:, None], w / np.where(ok, hn, 1.0)[:, None], 0.0)
            conj[:, j + 1] = basis[:, j + 1].conj()
            hess[:, j + 1, j] = np.where(ok, hn, 0.0)
        return _KrylovSpace(basis, hess, beta)


class _SpectralSpace:
    """exp(t G) psi from the eigendecomposition ``G = W diag(lam) W^-1``."""

    def __init__(self, spectral, psi):
        self.lam, self.w, winv, self.gram = spectral
        self.c = (winv @ psi).T

    def _y(self, tau, sel):
        return np.exp(self.lam[None, :] * np.asarray(tau)[:, None]) * self.c[sel]

    def norm2(self, tau, sel):
        y = self._y(tau, sel)
        return ((y.conj() @ self.gram) * y).sum(axis=1).real

    def error(self, tau, sel):
        return np.zeros(len(sel))

    def vectors(self, tau, sel):
        return self.w @ self._y(tau, sel).T


class _KrylovSpace:
    """exp(t G) psi restricted to a Krylov space, for many columns."""

    def __init__(self, basis, hess, beta):
        self.basis = basis
        self.m = hess.shape[2]
        self.small = hess[:, :self.m, :]
        self.tail = hess[:, self.m, self.m - 1].real
        self.beta = beta
        lam, q = np.linalg.eig(self.small)
        cond = np.linalg.cond(q)
        self.good = np.isfinite(cond) & (cond < 1e8)
        self.lam = lam
        self.q = q
        e1 = np.zeros(self.small.shape[:2], dtype=complex)
        e1[:, 0] = beta
        c = np.zeros_like(e1)
        if self.good.any():
            c[self.good] = np.linalg.solve(q[self.good], e1[self.good][..., None])[..., 0]
        self.c = c
        self.e1 = e1

    def coeffs(self, tau, sel=None):
        """Krylov-space coefficients at times ``tau`` (one per column)."""
        if sel is None:
            sel = np.arange(self.small.shape[0])
        tau = np.asarray(tau, dtype=float)
        out = np.empty((sel.size, self.m), dtype=complex)
        good = self.good[sel]
        if good.any():
            g = sel[good]
            phase = np.exp(self.lam[g] * tau[good][:, None])
            out[good] = np.einsum("cij,cj->ci", self.q[g], phase * self.c[g])
        if (~good).any():
            b = sel[~good]
            ex = la.expm(self.small[b] * tau[~good][:, None, None])
            out[~good] = np.einsum("cij,cj->ci", ex, self.e1[b])
        return out

    def norm2(self, tau, sel=None):
        return (np.abs(self.coeffs(tau, sel)) ** 2).sum(axis=1)

    def error(self, tau, sel=None):
        if sel is None:
            sel = np.arange(self.small.shape[0])
        y = self.coeffs(tau, sel)
        return self.tail[sel] * np.abs(y[:, -1])

    def vectors(self, tau, sel):
        y = self.coeffs(tau, sel)
        return np.matmul(y[:, None, :], self.basis[sel, :self.m])[:, 0].T


@dataclass
class _ChunkState:
    psi: np.ndarray
    thresholds: np.ndarray
    jump_rngs: list
    meas_rngs: list
    jumps: list            # per column list of (t, m)
    norm_errors: list


def _advance_crossing(prop, st, cols, t0, duration):
    """Re-propagate columns ``cols`` over [t0, t0 + duration] with jumps."""
    cfg = prop.config
    psi = st.psi[:, cols].copy()
    tau_left = np.full(cols.size, duration)
    t_now = np.full(cols.size, t0)
    active = np.arange(cols.size)
    while active.size:
        ks = prop.local_space(psi[:, active])
        local = np.arange(active.size)
        horizon = tau_left[active].copy()
        for _ in range(60):
            bad = ks.error(horizon, local) > cfg.krylov_tol
            if not bad.any():
                break
            horizon[bad] *= 0.5
        else:
            raise NumericalError("Krylov step underflow")
        thr = st.thresholds[cols[active]]
        p_end = ks.norm2(horizon, local)
        crossing = p_end <= thr

        # columns without a jump in this sub-interval
        calm = local[~crossing]
        if calm.size:
            psi[:, active[calm]] = ks.vectors(horizon[calm], calm)
            tau_left[active[calm]] -= horizon[calm]
            t_now[active[calm]] += horizon[calm]

        hit = local[crossing]
        if hit.size:
            lo = np.zeros(hit.size)
            hi = horizon[hit].copy()
            target = thr[crossing]
            p_hi = p_end[crossing]
            for _ in range(200):
                if np.all(np.abs(p_hi - target) < 0.1 * cfg.norm_tol):
                    break
                if np.any((hi - lo) <= 4 * np.finfo(float).eps * np.maximum(hi, 1e-300)):
                    if np.any(np.abs(p_hi - target) >= cfg.norm_tol):
                        raise NumericalError(
                            "step-size underflow while locating a jump time")
                    break
                mid = 0.5 * (lo + hi)
                p_mid = ks.norm2(mid, hit)
                above = p_mid > target
                lo = np.where(above, mid, lo)
                hi = np.where(above, hi, mid)
                p_hi = np.where(above, p_hi, p_mid)
            tau = hi
            p_jump = ks.norm2(tau, hit)
            states = ks.vectors(tau, hit)
            lowered = prop.lowered(states)                        # (N, dim, c)
            modes = np.einsum("am,adc->mdc", prop.vectors, lowered)
            weights = prop.rates[:, None] * (np.abs(modes) ** 2).sum(axis=1)
            for k, h in enumerate(hit):
                col = cols[active[h]]
                total = weights[:, k].sum()
                if not total > 1e-14 * p_jump[k]:
                    raise NumericalError(
                        f"jump channel weights vanish ({total:.2e}) at a "
                        f"detected jump")
                rng = st.jump_rngs[col]
                u = rng.random() * total
                m = int(np.searchsorted(np.cumsum(weights[:, k]), u, side="right"))
                m = min(m, weights.shape[0] - 1)
                new = modes[m, :, k]
                psi[:, active[h]] = new / np.linalg.norm(new)
                t_jump = t_now[active[h]] + tau[k]
                st.jumps[col].append((t_jump, m))
                st.norm_errors[col].append(abs(p_jump[k] - target[k]))
                st.thresholds[col] = rng.random()
            tau_left[active[hit]] -= tau
            t_now[active[hit]] += tau
        active = active[tau_left[active] > 1e-13 * duration]
    st.psi[:, cols] = psi


def _sample(prop, st, cfg):
    if cfg.projective:
        p = np.abs(st.psi) ** 2
        p /= p.sum(axis=0)
        out = np.empty(p.shape[1])
        for c in range(p.shape[1]):
            x = st.meas_rngs[c].choice(p.shape[0], p=p[:, c])
            out[c] = prop.counts[x] / prop.n_atoms
        return out
    return prop.density(st.psi)


def _run_chunk(prop, indices, initial_state=None):
    cfg = prop.config
    indices = np.asarray(indices)
    cols = indices.size
    rngs = [trajectory_rngs(cfg.master_seed, int(i)) for i in indices]
    if initial_state is None:
        psi = np.zeros((prop.dim, cols), dtype=complex)
        psi[0] = 1.0
    else:
        v = np.asarray(initial_state, dtype=complex)
        psi = np.repeat((v / np.linalg.norm(v))[:, None], cols, axis=1)
    st = _ChunkState(
        psi=psi,
        thresholds=np.array([r[0].random() for r in rngs]),
        jump_rngs=[r[0] for r in rngs],
        meas_rngs=[r[1] for r in rngs],
        jumps=[[] for _ in range(cols)],
        norm_errors=[[] for _ in range(cols)],
    )
    n_samples = cfg.n_samples
    density = np.empty((n_samples, cols))
    coh = np.empty((n_samples, cols, prop.n_atoms - 1)) if cfg.record_coherences else None
    sub = cfg.substeps
    dt = cfg.dt
    for k in range(n_samples):
        density[k] = _sample(prop, st, cfg)
        if coh is not None:
            coh[k] = prop.coherences(st.psi)
        if k == n_samples - 1:
            break
        for j in range(sub):
            t0 = (k * sub + j) * dt
            nxt = prop.step @ st.psi
            p = (np.abs(nxt) ** 2).sum(axis=0)
            crossed = p <= st.thresholds
            st.psi = np.where(crossed[None, :], st.psi, nxt)
            if crossed.any():
                _advance_crossing(prop, st, np.flatnonzero(crossed), t0, dt)
    times = np.arange(n_samples) * cfg.sample_dt
    records = []
    for c, idx in enumerate(indices):
        jumps = st.jumps[c]
        records.append(TrajectoryRecord(
            index=int(idx),
            seed=(cfg.master_seed, int(idx)),
            jump_times=np.array([j[0] for j in jumps], dtype=float),
            jump_channels=np.array([j[1] for j in jumps], dtype=int),
            sample_times=times,
            density=density[:, c].copy(),
            coherences=None if coh is None else coh[:, c].copy(),
            jump_norm_errors=np.array(st.norm_errors[c], dtype=float),
        ))
    return records


def _run_chunk_limited(prop, indices, initial_state=None):
    with threadpool_limits(limits=1):
        return _run_chunk(prop, indices, initial_state)


def evolve_trajectory(model, config, trajectory_index, initial_state=None,
                      propagator=None):
    """One trajectory, reproducible from ``(master_seed, trajectory_index)``.

    Floating-point rounding in batched products depends on the batch, so the
    whole chunk containing the index is run; the result is bit-identical to
    the same trajectory inside :func:`run_ensemble`.
    """
    if not 0 <= trajectory_index < config.n_trajectories:
        raise ValidationError("index outside the ensemble", field="trajectory_index")
    prop = propagator or Propagator(model, config)
    start = trajectory_index - trajectory_index % config.chunk_size
    stop = min(start + config.chunk_size, config.n_trajectories)
    chunk = _run_chunk_limited(prop, np.arange(start, stop), initial_state)
    return chunk[trajectory_index - start]


@dataclass
class EnsembleResult:
    records: list
    config: QjmcConfig
    n_atoms: int
    n_mean: float
    n_sem: float
    k_mean: float
    k_sem: float
    jumps_per_trajectory: np.ndarray
    channel_tallies: np.ndarray
    coherence_mean: np.ndarray | None = None
    coherence_sem: np.ndarray | None = None

    def summary(self):
        out = {
            "n_trajectories": len(self.records),
            "n_mean": self.n_mean, "n_sem": self.n_sem,
            "k_mean": self.k_mean, "k_sem": self.k_sem,
            "mean_jumps": float(self.jumps_per_trajectory.mean()),
            "channel_tallies": self.channel_tallies.tolist(),
        }
        if self.coherence_mean is not None:
            out["coherence_mean"] = self.coherence_mean.tolist()
        return out


_FORK_PROP = None


def _fork_worker(args):
    indices, initial_state = args
    return _run_chunk_limited(_FORK_PROP, indices, initial_state)


def run_ensemble(model, config, workers=1, initial_state=None, propagator=None):
    """Run ``config.n_trajectories`` trajectories and summarise them.

    Summary statistics use the stationary window ``[t_stationary, t_final]``;
    standard errors treat trajectories as independent batches.
    """
    global _FORK_PROP
    prop = propagator or Propagator(model, config)
    idx = np.arange(config.n_trajectories)
    chunks = [idx[i:i + config.chunk_size]
              for i in range(0, idx.size, config.chunk_size)]
    records = []
    if workers <= 1 or len(chunks) == 1:
        for ch in chunks:
            records.extend(_chunk_or_raise(prop, ch, initial_state))
    else:
        _FORK_PROP = prop
        try:
            ctx = multiprocessing.get_context("fork")
            with ProcessPoolExecutor(max_workers=workers, mp_context=ctx) as pool:
                futures = [pool.submit(_fork_worker, (ch, initial_state))
                           for ch in chunks]
                for ch, fut in zip(chunks, futures):
                    try:
                        records.extend(fut.result())
                    except NumericalError as exc:
                        raise NumericalError(
                            f"trajectories {ch[0]}..{ch[-1]}: {exc}") from exc
        finally:
            _FORK_PROP = None
    return summarize_records(records, config, model.n_atoms)


def _chunk_or_raise(prop, ch, initial_state):
    try:
        return _run_chunk_limited(prop, ch, initial_state)
    except NumericalError as exc:
        raise NumericalError(f"trajectories {ch[0]}..{ch[-1]}: {exc}") from exc


def summarize_records(records, config, n_atoms):
    records = sorted(records, key=lambda r: r.index)
    t = records[0].sample_times
    in_win = (t >= config.t_stationary - 1e-12) & (t <= config.t_final + 1e-12)
    if not in_win.any():
        raise ValidationError("empty stationary window", field="t_stationary")
    per_n = np.array([r.density[in_win].mean() for r in records])
    per_k = np.array([np.count_nonzero(r.jump_times >= config.t_stationary)
                      for r in records]) / config.window
    tallies = np.zeros(n_atoms, dtype=int)
    for r in records:
        tallies += np.bincount(r.jump_channels, minlength=n_atoms)
    coh_mean = coh_sem = None
    if records[0].coherences is not None:
        per_c = np.array([r.coherences[in_win].mean(axis=0) for r in records])
        coh_mean = per_c.mean(axis=0)
        coh_sem = _sem(per_c)
    return EnsembleResult(
        records=records, config=config, n_atoms=n_atoms,
        n_mean=float(per_n.mean()), n_sem=float(_sem(per_n)),
        k_mean=float(per_k.mean()), k_sem=float(_sem(per_k)),
        jumps_per_trajectory=np.array([r.n_jumps for r in records]),
        channel_tallies=tallies,
        coherence_mean=coh_mean, coherence_sem=coh_sem,
    )


def _sem(x):
    x = np.asarray(x)
    if x.shape[0] < 2:
        return np.full(x.shape[1:], np.nan) if x.ndim > 1 else np.nan
    return x.std(axis=0, ddof=1) / np.sqrt(x.shape[0])


@dataclass
class WindowSamples:
    density: np.ndarray
    rate: np.ndarray


def stationary_window_samples(records, config):
    """Flat density and binned emission-rate samples from the window.

    Density samples weigh every (trajectory, sample time) pair equally;
    rates are jump counts in consecutive ``bin_width`` bins divided by the
    width.
    """
    t = records[0].sample_times
    in_win = t >= config.t_stationary - 1e-12
    n_bins = int(np.floor(config.window / config.bin_width + 1e-9))
    if not in_win.any() or n_bins < 1:
        raise ValidationError("empty stationary window", field="t_stationary")
    edges = config.t_stationary + config.bin_width * np.arange(n_bins + 1)
    dens = np.concatenate([r.density[in_win] for r in records])
    rate = np.concatenate([np.histogram(r.jump_times, bins=edges)[0]
                           for r in records]) / config.bin_width
    return WindowSamples(density=dens, rate=rate.astype(float))


def write_record(record, path_or_file):
    """Line-oriented text: ``# jumps``, ``t_jump,channel`` lines, then
    ``# samples`` and ``t,n_density`` lines.  ``.gz`` paths are compressed."""
    buf = io.StringIO()
    buf.write(f"# trajectory {record.index} seed {record.seed[0]} {record.seed[1]}\n")
    buf.write("# jumps\n")
    for t, m in zip(record.jump_times, record.jump_channels):
        buf.write(f"{float(t)!r},{int(m)}\n")
    buf.write("# samples\n")
    for t, n in zip(record.sample_times, record.density):
        buf.write(f"{float(t)!r},{float(n)!r}\n")
    text = buf.getvalue()
    if hasattr(path_or_file, "write"):
        path_or_file.write(text)
        return
    path = str(path_or_file)
    if path.endswith(".gz"):
        # zero mtime keeps the compressed bytes reproducible
        with open(path, "wb") as raw, gzip.GzipFile(
                filename="", mode="wb", fileobj=raw, mtime=0) as gz:
            gz.write(text.encode())
    else:
        with open(path, "w") as fh:
            fh.write(text)


def read_record(path_or_file):
    if hasattr(path_or_file, "read"):
        text = path_or_file.read()
    else:
        path = str(path_or_file)
        opener = gzip.open if path.endswith(".gz") else open
        with opener(path, "rt") as fh:
            text = fh.read()
    lines = text.splitlines()
    head = lines[0].split()
    index, seed = int(head[2]), (int(head[4]), int(head[5]))
    section = None
    jumps, samples = [], []
    for line in lines[1:]:
        if line.startswith("#"):
            section = line[2:].strip()
            continue
        a, b = line.split(",")
        if section == "jumps":
            jumps.append((float(a), int(b)))
        else:
            samples.append((float(a), float(b)))
    jt = np.array([j[0] for j in jumps], dtype=float)
    jc = np.array([j[1] for j in jumps], dtype=int)
    st = np.array([s[0] for s in samples], dtype=float)
    sd = np.array([s[1] for s in samples], dtype=float)
    return TrajectoryRecord(index=index, seed=seed, jump_times=jt,
                            jump_channels=jc, sample_times=st, density=sd)


def with_overrides(config, **kw):
    return replace(config, **kw)
