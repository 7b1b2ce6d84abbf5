"""Run configuration: one flat ``section.key = value`` document per run.

The format is deliberately minimal: one assignment per line, ``#`` comments,
blank lines ignored.  Unknown keys, duplicate keys, malformed values and
invalid physical parameters are all reported with the offending line.
``config_to_text``/``parse_config`` round-trip exactly (floats are emitted
with ``repr``, which is shortest-exact).
"""

from dataclasses import dataclass, field

from .model import PhysicalParams

SOLVERS = ("suliciu", "hll", "roe")
SCHEMES = ("well_balanced", "centered_fv", "finite_difference")
COUPLINGS = ("hyperbolic_first", "parabolic_first")
PHI_SOURCES = ("explicit", "average")
SAMPLINGS = ("center", "gauss3")
INITS = ("sine", "sine_offset", "constant", "lateral_bump", "centered_bump",
         "interface_shift", "plateau")
REFERENCES = ("none", "lateral", "centered")


class ConfigError(ValueError):
    """Malformed or inconsistent run configuration."""


@dataclass(frozen=True)
class RunConfig:
    """Everything needed to reproduce a run (physics, grid, scheme, output)."""

    params: PhysicalParams = field(default_factory=PhysicalParams)
    n_cells: int = 100
    solver: str = "suliciu"
    scheme: str = "well_balanced"
    coupling: str = "hyperbolic_first"
    phi_source: str = "explicit"
    friction_dx_factor: float = 1.0
    sampling: str = "center"
    cfl_factor: float = 0.9
    t_final: float = 1.0
    dt_max: float = 0.1
    residue_tol: float = 1e-13
    steady_window: int = 10
    output_interval: float = 0.5
    init: str = "sine"
    init_xi: float = 1.0
    init_mass: float | None = None
    init_delta: float = 0.1
    init_window: tuple = (0.6, 0.8)
    reference: str = "none"

    def __post_init__(self):
        _choice("scheme.solver", self.solver, SOLVERS)
        _choice("scheme.type", self.scheme, SCHEMES)
        _choice("scheme.coupling", self.coupling, COUPLINGS)
        _choice("scheme.phi_source", self.phi_source, PHI_SOURCES)
        _choice("scheme.sampling", self.sampling, SAMPLINGS)
        _choice("run.init", self.init, INITS)
        _choice("run.reference", self.reference, REFERENCES)
        if self.n_cells < 1:
            raise ConfigError(f"grid.n must be >= 1, got {self.n_cells}")
        for name, val in (("scheme.friction_dx_factor", self.friction_dx_factor),
                          ("run.cfl_factor", self.cfl_factor),
                          ("run.dt_max", self.dt_max),
                          ("run.residue_tol", self.residue_tol),
                          ("run.output_interval", self.output_interval)):
            if val <= 0:
                raise ConfigError(f"{name} must be positive, got {val}")
        if self.t_final < 0:
            raise ConfigError(f"run.t_final must be >= 0, got {self.t_final}")
        if self.steady_window < 1:
            raise ConfigError(f"run.steady_window must be >= 1, got {self.steady_window}")
        if self.init_mass is not None and self.init_mass <= 0:
            raise ConfigError(f"run.init_mass must be positive, got {self.init_mass}")
        w = self.init_window
        if len(w) != 2 or not (0.0 < w[0] < w[1] < 1.0):
            raise ConfigError(
                f"run.init_window must be two fractions 0 < w1 < w2 < 1, got {w}")

    @property
    def dx(self):
        return self.params.L / self.n_cells


def _choice(key, value, allowed):
    if value not in allowed:
        raise ConfigError(f"{key} must be one of {', '.join(allowed)}; got {value!r}")


def _to_float(s):
    return float(s)


def _to_int(s):
    val = float(s)
    if val != int(val):
        raise ValueError(f"expected an integer, got {s}")
    return int(val)


def _to_window(s):
    parts = [p.strip() for p in s.split(",")]
    if len(parts) != 2:
        raise ValueError(f"expected two comma-separated numbers, got {s!r}")
    return (float(parts[0]), float(parts[1]))


def _to_str(s):
    return s


# key -> (target field or marker, converter)
_MODEL_KEYS = {
    "model.epsilon": "epsilon", "model.gamma": "gamma", "model.alpha": "alpha",
    "model.chi": "chi", "model.D": "D", "model.a": "a", "model.b": "b",
    "model.L": "L",
}
_CONFIG_KEYS = {
    "scheme.solver": ("solver", _to_str),
    "scheme.type": ("scheme", _to_str),
    "scheme.coupling": ("coupling", _to_str),
    "scheme.phi_source": ("phi_source", _to_str),
    "scheme.friction_dx_factor": ("friction_dx_factor", _to_float),
    "scheme.sampling": ("sampling", _to_str),
    "run.t_final": ("t_final", _to_float),
    "run.cfl_factor": ("cfl_factor", _to_float),
    "run.dt_max": ("dt_max", _to_float),
    "run.residue_tol": ("residue_tol", _to_float),
    "run.steady_window": ("steady_window", _to_int),
    "run.init": ("init", _to_str),
    "run.init_xi": ("init_xi", _to_float),
    "run.init_mass": ("init_mass", _to_float),
    "run.init_delta": ("init_delta", _to_float),
    "run.init_window": ("init_window", _to_window),
    "run.reference": ("reference", _to_str),
    "output.interval": ("output_interval", _to_float),
}
KNOWN_KEYS = tuple(_MODEL_KEYS) + ("grid.n", "grid.dx") + tuple(_CONFIG_KEYS)


def _tokenize(text):
    """Yield (label, key, value) triples; reject malformed/duplicate lines."""
    pairs = []
    seen = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        label = f"line {lineno}"
        if key in seen:
            raise ConfigError(
                f"{label}: duplicate key {key!r} (first set on {seen[key]})")
        if not value:
            raise ConfigError(f"{label}: empty value for {key!r}")
        seen[key] = label
        pairs.append((label, key, value))
    return pairs


def _build(pairs):
    model_vals = {}
    cfg_vals = {}
    grid_n = grid_dx = None
    labels = {}
    for label, key, value in pairs:
        labels[key] = label
        if key in _MODEL_KEYS:
            try:
                model_vals[_MODEL_KEYS[key]] = float(value)
            except ValueError:
                raise ConfigError(f"{label}: {key} expects a number, got {value!r}") from None
        elif key == "grid.n":
            try:
                grid_n = _to_int(value)
            except ValueError as exc:
                raise ConfigError(f"{label}: grid.n: {exc}") from None
        elif key == "grid.dx":
            try:
                grid_dx = float(value)
            except ValueError:
                raise ConfigError(f"{label}: grid.dx expects a number, got {value!r}") from None
        elif key in _CONFIG_KEYS:
            attr, conv = _CONFIG_KEYS[key]
            try:
                cfg_vals[attr] = conv(value)
            except ValueError as exc:
                raise ConfigError(f"{label}: {key}: {exc}") from None
        else:
            raise ConfigError(f"{label}: unknown key {key!r}")

    try:
        params = PhysicalParams(**model_vals)
    except ValueError as exc:
        # point at the model.* line that broke the constraint when possible
        blame = next((labels[k] for k, f in _MODEL_KEYS.items()
                      if f in model_vals and str(exc).startswith(f + " ")), None)
        prefix = f"{blame}: " if blame else ""
        raise ConfigError(f"{prefix}{exc}") from None

    if grid_n is not None and grid_dx is not None:
        raise ConfigError(
            f"{labels['grid.dx']}: set exactly one of grid.n and grid.dx, not both")
    if grid_dx is not None:
        if grid_dx <= 0:
            raise ConfigError(f"{labels['grid.dx']}: grid.dx must be positive")
        ratio = params.L / grid_dx
        n = round(ratio)
        if n < 1 or abs(ratio - n) > 1e-9 * max(1, n):
            raise ConfigError(
                f"{labels['grid.dx']}: grid.dx = {grid_dx} does not divide "
                f"model.L = {params.L}")
        cfg_vals["n_cells"] = n
    elif grid_n is not None:
        cfg_vals["n_cells"] = grid_n

    try:
        return RunConfig(params=params, **cfg_vals)
    except ConfigError as exc:
        # map the validation message back to the offending line when we can
        blame = next((lab for key, lab in labels.items() if str(exc).startswith(key)),
                     None)
        prefix = f"{blame}: " if blame else ""
        raise ConfigError(f"{prefix}{exc}") from None


def parse_config(text):
    """Parse a config document into a RunConfig (defaults fill missing keys)."""
    return _build(_tokenize(text))


def apply_overrides(config, overrides):
    """Apply ``key=value`` strings on top of an existing RunConfig."""
    base = {key: value for _, key, value in _tokenize(config_to_text(config))}
    for i, item in enumerate(overrides, start=1):
        if "=" not in item:
            raise ConfigError(f"override {item!r}: expected key=value")
        key, value = (part.strip() for part in item.split("=", 1))
        if key not in KNOWN_KEYS:
            raise ConfigError(f"override {item!r}: unknown key {key!r}")
        if not value:
            raise ConfigError(f"override {item!r}: empty value")
        base[key] = value
    if "grid.n" in base and "grid.dx" in base:
        # an override switching to dx replaces the serialized n
        for item in overrides:
            if item.strip().startswith("grid.dx"):
                del base["grid.n"]
                break
        else:
            del base["grid.dx"]
    pairs = [(f"key {key!r}", key, value) for key, value in base.items()]
    return _build(pairs)


def config_to_text(config):
    """Serialize a RunConfig to the flat-text format (exact round trip)."""
    p = config.params
    lines = [
        f"model.epsilon = {p.epsilon!r}",
        f"model.gamma = {p.gamma!r}",
        f"model.alpha = {p.alpha!r}",
        f"model.chi = {p.chi!r}",
        f"model.D = {p.D!r}",
        f"model.a = {p.a!r}",
        f"model.b = {p.b!r}",
        f"model.L = {p.L!r}",
        f"grid.n = {config.n_cells}",
        f"scheme.solver = {config.solver}",
        f"scheme.type = {config.scheme}",
        f"scheme.coupling = {config.coupling}",
        f"scheme.phi_source = {config.phi_source}",
        f"scheme.friction_dx_factor = {config.friction_dx_factor!r}",
        f"scheme.sampling = {config.sampling}",
        f"run.t_final = {config.t_final!r}",
        f"run.cfl_factor = {config.cfl_factor!r}",
        f"run.dt_max = {config.dt_max!r}",
        f"run.residue_tol = {config.residue_tol!r}",
        f"run.steady_window = {config.steady_window}",
        f"run.init = {config.init}",
        f"run.init_xi = {config.init_xi!r}",
    ]
    if config.init_mass is not None:
        lines.append(f"run.init_mass = {config.init_mass!r}")
    lines += [
        f"run.init_delta = {config.init_delta!r}",
        f"run.init_window = {config.init_window[0]!r},{config.init_window[1]!r}",
        f"run.reference = {config.reference}",
        f"output.interval = {config.output_interval!r}",
    ]
    return "\n".join(lines) + "\n"
