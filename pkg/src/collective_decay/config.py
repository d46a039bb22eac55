"""Run configuration: a flat ``key = value`` file plus command-line overrides.

Example file::

    # N=6 density map over drive and detuning
    mode = steady
    n_atoms = 6
    a_over_lambda = 0.08
    omega_min = 0.1
    omega_max = 5
    omega_steps = 20
    delta_min = -3
    delta_max = 3
    delta_steps = 20

Blank lines and ``#`` comments are ignored.  Unknown keys are rejected.
"""

import os
from dataclasses import asdict, dataclass, fields

import numpy as np

from .errors import CapacityError, ValidationError
from .lattice import SystemParams, get_preset
from .qjmc import MAX_QJMC_ATOMS, QjmcConfig
from .steady import MAX_EXACT_ATOMS

__all__ = ["RunConfig", "parse_config", "parse_config_text", "OUT_ENV",
           "MODES", "SOLVERS"]

OUT_ENV = "COLLECTIVE_DECAY_OUT"
MODES = ("steady", "qjmc", "meanfield", "sweep")
SOLVERS = ("steady", "qjmc", "meanfield")


@dataclass(frozen=True)
class RunConfig:
    mode: str = "steady"
    solver: str = "steady"          # what a ``sweep`` runs at every point
    n_atoms: int | None = None
    omega: float = 1.0
    delta: float = 0.0
    a_over_lambda: float = 0.08
    preset: str | None = None
    seed: int = 0
    trajectories: int = 2000
    t_final: float = 50.0
    t_stationary: float = 25.0
    sample_dt: float = 0.1
    max_step: float = 0.1
    norm_tol: float = 1e-6
    chunk_size: int = 250
    bin_width: float = 1.0
    density_bins: int = 50
    projective: bool = False
    record_coherences: bool = False
    write_trajectories: bool = False
    omega_min: float | None = None
    omega_max: float | None = None
    omega_steps: int = 1
    delta_min: float | None = None
    delta_max: float | None = None
    delta_steps: int = 1
    out: str = "out"
    threads: int = 1

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValidationError(f"'{self.mode}' not one of {', '.join(MODES)}",
                                  field="mode")
        if self.solver not in SOLVERS:
            raise ValidationError(f"'{self.solver}' not one of {', '.join(SOLVERS)}",
                                  field="solver")
        if self.n_atoms is None:
            raise ValidationError("required", field="n_atoms")
        for name in ("omega_steps", "delta_steps"):
            if getattr(self, name) < 1:
                raise ValidationError("must be >= 1", field=name)
        for axis in ("omega", "delta"):
            lo, hi = getattr(self, f"{axis}_min"), getattr(self, f"{axis}_max")
            if (lo is None) != (hi is None):
                raise ValidationError(f"give both {axis}_min and {axis}_max",
                                      field=f"{axis}_min" if lo is None else f"{axis}_max")
            if getattr(self, f"{axis}_steps") > 1 and lo is None:
                raise ValidationError(f"steps > 1 needs {axis}_min and {axis}_max",
                                      field=f"{axis}_steps")
        if self.threads < 1:
            raise ValidationError("must be >= 1", field="threads")
        if self.density_bins < 1:
            raise ValidationError("must be >= 1", field="density_bins")
        if self.preset is not None:
            get_preset(self.preset)
        # delegate the remaining checks to the solver-level types
        self.system_params()
        limit = {"steady": MAX_EXACT_ATOMS, "qjmc": MAX_QJMC_ATOMS}.get(
            self.effective_solver)
        if limit is not None and self.n_atoms > limit:
            raise CapacityError(
                f"N={self.n_atoms} exceeds the {self.effective_solver} solver "
                f"limit N={limit}", field="n_atoms")
        if self.effective_solver == "qjmc":
            self.qjmc_config()

    @property
    def effective_solver(self):
        return self.solver if self.mode == "sweep" else self.mode

    def system_params(self, omega=None, delta=None):
        return SystemParams(
            n_atoms=self.n_atoms,
            omega=self.omega if omega is None else omega,
            delta=self.delta if delta is None else delta,
            a_over_lambda=self.a_over_lambda,
            gamma=get_preset(self.preset).gamma_si if self.preset else 1.0,
        )

    def qjmc_config(self):
        return QjmcConfig(
            n_trajectories=self.trajectories, t_final=self.t_final,
            t_stationary=self.t_stationary, sample_dt=self.sample_dt,
            master_seed=self.seed, max_step=self.max_step,
            norm_tol=self.norm_tol, chunk_size=self.chunk_size,
            bin_width=self.bin_width, projective=self.projective,
            record_coherences=self.record_coherences,
        )

    def axis(self, name):
        lo, hi = getattr(self, f"{name}_min"), getattr(self, f"{name}_max")
        if lo is None:
            return np.array([getattr(self, name)], dtype=float)
        return np.linspace(lo, hi, getattr(self, f"{name}_steps"))

    def grid(self):
        """(omega, delta) points, omega-major."""
        return [(float(o), float(d)) for o in self.axis("omega")
                for d in self.axis("delta")]

    def echo(self):
        return asdict(self)


_FIELDS = {f.name: f for f in fields(RunConfig)}
_BOOL = {"true": True, "yes": True, "1": True, "on": True,
         "false": False, "no": False, "0": False, "off": False}


def _convert(key, raw, line=None):
    kind = _FIELDS[key].type
    text = str(raw).strip()
    try:
        if kind in (int, int | None):
            if isinstance(raw, (int, np.integer)) and not isinstance(raw, bool):
                return int(raw)
            value = float(text)
            if value != int(value):
                raise ValueError
            return int(value)
        if kind in (float, float | None):
            return float(text)
        if kind is bool:
            if isinstance(raw, bool):
                return raw
            return _BOOL[text.lower()]
        return text
    except (ValueError, KeyError):
        name = getattr(kind, "__name__", None) or str(kind).split(" ")[0]
        raise ValidationError(f"cannot read '{text}' as {name}",
                              field=key, line=line) from None


def parse_config_text(text):
    """Parse ``key = value`` lines; returns ({key: value}, {key: line})."""
    values, lines = {}, {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ValidationError("expected 'key = value'", line=lineno)
        key, value = (s.strip() for s in body.split("=", 1))
        key = key.replace("-", "_")
        if key not in _FIELDS:
            raise ValidationError("unknown key", field=key, line=lineno)
        if key in values:
            raise ValidationError(f"duplicate key (first on line {lines[key]})",
                                  field=key, line=lineno)
        values[key] = _convert(key, value, lineno)
        lines[key] = lineno
    return values, lines


def parse_config(path=None, overrides=None, environ=None):
    """Build a validated :class:`RunConfig`.

    Precedence, lowest first: defaults, preset, config file, the output
    directory environment variable (``out`` only), explicit overrides.
    """
    values, lines = {}, {}
    if path is not None:
        try:
            with open(path) as fh:
                text = fh.read()
        except OSError as exc:
            raise ValidationError(f"cannot read config: {exc.strerror}",
                                  field="config") from None
        values, lines = parse_config_text(text)
    overrides = {k.replace("-", "_"): v for k, v in (overrides or {}).items()
                 if v is not None}
    for key in overrides:
        if key not in _FIELDS:
            raise ValidationError("unknown key", field=key)
    merged = dict(values)
    environ = os.environ if environ is None else environ
    if environ.get(OUT_ENV):
        merged["out"] = environ[OUT_ENV]
    merged.update({k: _convert(k, v) for k, v in overrides.items()})
    preset = merged.get("preset")
    if preset is not None and "a_over_lambda" not in merged:
        merged["a_over_lambda"] = get_preset(preset).a_over_lambda
    try:
        return RunConfig(**merged)
    except ValidationError as exc:
        if exc.line is None and exc.field in lines and exc.field not in overrides:
            raise ValidationError(str(exc).split(": ", 1)[-1], field=exc.field,
                                  line=lines[exc.field]) from None
        raise
