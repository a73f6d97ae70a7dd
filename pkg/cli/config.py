"""
Experiment configuration: a versioned JSON document parsed into frozen
dataclasses, plus the in-repo presets.
"""

import dataclasses
import json
import re
from dataclasses import dataclass, field
from pathlib import Path

from fem.timestepping import TimeGrid
from ml.model import ModelConfig
from utils.exceptions import ConfigError

SCHEMA_VERSION = 1
PRESET_DIR = Path(__file__).resolve().parent / "presets"
MODES = ("future", "parametric")


@dataclass(frozen=True)
class MeshConfig:
    nx: int = 80
    ny: int = 80


@dataclass(frozen=True)
class TimeConfig:
    T: float = 2.5
    K: int = 200
    k_off: int = 50


@dataclass(frozen=True)
class PhysicsConfig:
    mu_true: float = 15.0
    mu_bk: float = 15.0
    mu_test: float = 17.0
    sigma: float = 5.67e-8
    epsilon: float = 3e-3
    u_r: float = 303.15
    u_0: float = 293.15
    inner_diffusivity: float = 1.0


@dataclass(frozen=True)
class SensorConfig:
    side_count: int = 11
    halfwidth: float = 0.05
    margin: float = 0.2


@dataclass(frozen=True)
class ReductionConfig:
    N: int = 4
    snapshot_stride: int = 2


@dataclass(frozen=True)
class MLSettings:
    lb: int = 1
    hidden: int = 32
    widths: tuple = (32, 32)
    lr: float = 1e-2
    epochs: int = 2000
    seed: int = 2024


@dataclass(frozen=True)
class ExperimentConfig:
    """
    Complete description of one SVDA experiment.

    Attributes:
        name: Run name (used for the default output directory)
        mode: "future" (forecast past k_off) or "parametric" (train at
            mu_true over the whole horizon, assimilate at mu_test)
        output_dir: Run directory; None means <run root>/<name>
    """

    version: int = SCHEMA_VERSION
    name: str = "custom"
    mode: str = "future"
    mesh: MeshConfig = field(default_factory=MeshConfig)
    time: TimeConfig = field(default_factory=TimeConfig)
    physics: PhysicsConfig = field(default_factory=PhysicsConfig)
    sensors: SensorConfig = field(default_factory=SensorConfig)
    reduction: ReductionConfig = field(default_factory=ReductionConfig)
    ml: MLSettings = field(default_factory=MLSettings)
    output_dir: str = None

    @property
    def time_grid(self):
        return TimeGrid(self.time.T, self.time.K, self.time.k_off)

    @property
    def model_config(self):
        return ModelConfig(
            lookback=self.ml.lb,
            hidden_size=self.ml.hidden,
            dense_widths=self.ml.widths,
            learning_rate=self.ml.lr,
            epochs=self.ml.epochs,
            seed=self.ml.seed,
        )

    @property
    def parametric(self):
        return self.mode == "parametric"

    @property
    def training_rows(self):
        """Observation rows the network is trained on."""
        return self.time.K + 1 if self.parametric else self.time.k_off

    @property
    def assimilation_start(self):
        """First time index that receives predicted observations."""
        return self.ml.lb if self.parametric else self.time.k_off

    def with_seed(self, seed):
        return dataclasses.replace(self, ml=dataclasses.replace(self.ml, seed=int(seed)))

    def with_output_dir(self, output_dir):
        return dataclasses.replace(self, output_dir=str(output_dir))

    def to_dict(self):
        data = dataclasses.asdict(self)
        data["ml"]["widths"] = list(self.ml.widths)
        return data

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2) + "\n"


_SECTIONS = {
    "mesh": MeshConfig,
    "time": TimeConfig,
    "physics": PhysicsConfig,
    "sensors": SensorConfig,
    "reduction": ReductionConfig,
    "ml": MLSettings,
}


def _line_of(text, key):
    """Line (1-based) of the first occurrence of a JSON key, if found."""
    match = re.search(r'"%s"\s*:' % re.escape(key), text)
    return text.count("\n", 0, match.start()) + 1 if match else None


def _coerce(value, expected, key, text):
    line = _line_of(text, key.rsplit(".", 1)[-1])
    if expected is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{key} must be an integer, got {value!r}", line)
        return value
    if expected is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{key} must be a number, got {value!r}", line)
        return float(value)
    if expected is str:
        if value is not None and not isinstance(value, str):
            raise ConfigError(f"{key} must be a string, got {value!r}", line)
        return value
    if expected is tuple:
        if not isinstance(value, list) or not all(
                isinstance(v, int) and not isinstance(v, bool) for v in value):
            raise ConfigError(f"{key} must be a list of integers, got {value!r}", line)
        return tuple(value)
    raise ConfigError(f"unsupported field type for {key}", line)


def _build(cls, data, text, prefix=""):
    if not isinstance(data, dict):
        raise ConfigError(f"{prefix or 'config'} must be an object", _line_of(text, prefix.rstrip(".")) if prefix else 1)
    known = {f.name: f for f in dataclasses.fields(cls)}
    unknown = sorted(set(data) - set(known))
    if unknown:
        raise ConfigError(f"unknown key {prefix + unknown[0]!r}", _line_of(text, unknown[0]))
    kwargs = {}
    for name, value in data.items():
        if name in _SECTIONS and cls is ExperimentConfig:
            kwargs[name] = _build(_SECTIONS[name], value, text, prefix=f"{name}.")
        else:
            kwargs[name] = _coerce(value, known[name].type, prefix + name, text)
    return cls(**kwargs)


def validate(config, text=""):
    """Re-check every sub-module precondition; raises ConfigError."""
    def fail(message, key):
        raise ConfigError(message, _line_of(text, key) if text else None)

    if config.version != SCHEMA_VERSION:
        fail(f"unsupported config version {config.version}", "version")
    if config.mode not in MODES:
        fail(f"mode must be one of {MODES}, got {config.mode!r}", "mode")
    if config.mesh.nx < 1 or config.mesh.ny < 1:
        fail("mesh needs at least one cell per axis", "nx")
    t = config.time
    if t.T <= 0:
        fail("final time T must be positive", "T")
    if t.K < 1:
        fail("K must be at least 1", "K")
    if not 1 <= t.k_off <= t.K:
        fail(f"k_off must lie in [1, {t.K}]", "k_off")
    p = config.physics
    for key in ("mu_true", "mu_bk", "mu_test", "sigma", "epsilon", "u_r", "u_0", "inner_diffusivity"):
        if getattr(p, key) <= 0:
            fail(f"{key} must be positive", key)
    s = config.sensors
    if s.side_count < 1:
        fail("side_count must be positive", "side_count")
    if s.halfwidth <= 0:
        fail("halfwidth must be positive", "halfwidth")
    if s.side_count > 1 and not s.halfwidth <= s.margin < 2.0:
        fail("patches must fit inside the plate (halfwidth <= margin < 2)", "margin")
    if s.side_count == 1 and s.halfwidth > 2.0:
        fail("patch larger than the plate", "halfwidth")
    r = config.reduction
    if r.snapshot_stride < 1:
        fail("snapshot_stride must be positive", "snapshot_stride")
    snapshots = t.K // r.snapshot_stride + 1
    if not 1 <= r.N <= min(s.side_count ** 2, snapshots):
        fail(f"N must lie in [1, min(M={s.side_count ** 2}, snapshots={snapshots})]", "N")
    m = config.ml
    if m.lb < 1 or m.lb > config.training_rows - 1:
        fail(f"lookback lb={m.lb} must satisfy 1 <= lb <= {config.training_rows - 1}", "lb")
    if m.hidden < 1 or any(w < 1 for w in m.widths):
        fail("network widths must be positive", "hidden")
    if m.lr <= 0:
        fail("learning rate must be positive", "lr")
    if m.epochs < 0:
        fail("epochs must be non-negative", "epochs")
    if not 0 <= m.seed < 2 ** 64:
        fail("seed must be an unsigned 64-bit integer", "seed")
    return config


def parse_config(text):
    """Parse and validate a JSON config document."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON: {exc.msg}", exc.lineno) from exc
    return validate(_build(ExperimentConfig, data, text), text)


def load_config(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text)


def available_presets():
    return sorted(p.stem for p in PRESET_DIR.glob("*.json"))


def load_preset(name):
    path = PRESET_DIR / f"{name}.json"
    if not path.exists():
        raise ConfigError(f"unknown preset {name!r}; choose from {available_presets()}")
    return load_config(path)
