"""Flat ``key = value`` configuration files for runs and pulsatile cases."""
import logging
from dataclasses import dataclass, fields

log = logging.getLogger(__name__)


class ConfigError(ValueError):
    pass


MODELS = ("nse", "voigt", "radm")


def parse_pairs(text):
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def _parse_forcing(value):
    if isinstance(value, (tuple, list)):
        return tuple(float(v) for v in value)
    value = str(value).strip().lower()
    if value in ("", "none", "off"):
        return ()
    return tuple(float(v) for v in value.split(","))


def _parse_bands(value):
    if isinstance(value, (tuple, list)):
        return tuple((int(a), int(b)) for a, b in value)
    bands = []
    for item in str(value).split(","):
        item = item.strip()
        if not item:
            continue
        lo, hi = item.split(":")
        bands.append((int(lo), int(hi)))
    return tuple(bands)


def _parse_bool(value):
    if isinstance(value, bool):
        return value
    v = str(value).strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {value!r}")


@dataclass
class RunConfig:
    model: str = "radm"
    n: int = 32
    alpha: float = 1.0 / 16.0
    nu: float = 0.005
    N: int = 2
    dt: float = 0.005
    steps: int = 100
    forcing: tuple = (0.05, 0.05)
    seed: int = 1
    output: str = "radm_out"
    checkpoint_interval: int = 0
    spectrum_interval: int = 0
    log_interval: int = 1
    init_energy: float = 0.1
    k0: float = 3.0
    cfl: float = 0.5
    cfl_action: str = "warn"
    average_start: float = 0.5
    bands: tuple = ((4, 8), (16, 21))

    _parsers = {
        "forcing": _parse_forcing,
        "bands": _parse_bands,
    }

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.model not in MODELS:
            raise ConfigError(f"model must be one of {MODELS}, got {self.model!r}")
        if self.model == "nse" and (self.alpha != 0 or self.N != 0):
            log.info("model=nse: forcing alpha=0, N=0")
            self.alpha, self.N = 0.0, 0
        if self.model == "voigt" and self.N != 0:
            log.info("model=voigt: forcing N=0")
            self.N = 0
        checks = [
            (self.n >= 4 and self.n % 2 == 0, f"n must be an even integer >= 4, got {self.n}"),
            (self.alpha >= 0, f"alpha must be >= 0, got {self.alpha}"),
            (self.nu >= 0, f"nu must be >= 0, got {self.nu}"),
            (self.N >= 0, f"N must be >= 0, got {self.N}"),
            (self.dt > 0, f"dt must be positive, got {self.dt}"),
            (self.steps >= 0, f"steps must be >= 0, got {self.steps}"),
            (all(e > 0 for e in self.forcing), "forcing targets must be positive"),
            (not self.forcing or self.nu > 0, "forcing requires a viscous run (nu > 0)"),
            (self.checkpoint_interval >= 0, "checkpoint_interval must be >= 0"),
            (self.spectrum_interval >= 0, "spectrum_interval must be >= 0"),
            (self.log_interval >= 1, "log_interval must be >= 1"),
            (self.init_energy > 0, "init_energy must be positive"),
            (self.cfl > 0, "cfl must be positive"),
            (self.cfl_action in ("warn", "abort", "ignore"), "cfl_action must be warn, abort or ignore"),
            (0 <= self.average_start < 1, "average_start must lie in [0, 1)"),
        ]
        for ok, msg in checks:
            if not ok:
                raise ConfigError(msg)

    @classmethod
    def from_dict(cls, pairs):
        known = {f.name: f for f in fields(cls)}
        kwargs = {}
        for key, value in pairs.items():
            if key not in known:
                raise ConfigError(f"unknown config key {key!r}")
            default = known[key].default
            try:
                if key in cls._parsers:
                    kwargs[key] = cls._parsers[key](value)
                elif isinstance(default, bool):
                    kwargs[key] = _parse_bool(value)
                elif isinstance(default, int):
                    kwargs[key] = int(value)
                elif isinstance(default, float):
                    kwargs[key] = float(value)
                else:
                    kwargs[key] = str(value)
            except ValueError as exc:
                raise ConfigError(f"bad value for {key!r}: {value!r} ({exc})") from None
        return cls(**kwargs)

    @classmethod
    def from_text(cls, text):
        return cls.from_dict(parse_pairs(text))

    @classmethod
    def from_file(cls, path):
        try:
            with open(path) as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        return cls.from_text(text)

    def to_text(self):
        lines = []
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name == "forcing":
                text = ",".join(repr(float(e)) for e in value) or "none"
            elif f.name == "bands":
                text = ",".join(f"{a}:{b}" for a, b in value)
            elif isinstance(value, float):
                text = repr(value)
            else:
                text = str(value)
            lines.append(f"{f.name} = {text}")
        return "\n".join(lines) + "\n"


@dataclass
class PulsatileConfig:
    geometry: str = "channel"
    R: float = 1.0
    omega: float = 144.0
    nu: float = 1.0
    alpha: float = 0.0
    t: float = 0.0
    npoints: int = 201

    @classmethod
    def from_text(cls, text):
        pairs = parse_pairs(text)
        known = {f.name: f for f in fields(cls)}
        kwargs = {}
        for key, value in pairs.items():
            if key not in known:
                raise ConfigError(f"unknown pulsatile key {key!r}")
            default = known[key].default
            try:
                kwargs[key] = type(default)(value) if not isinstance(default, str) else value
            except ValueError:
                raise ConfigError(f"bad value for {key!r}: {value!r}") from None
        cfg = cls(**kwargs)
        if cfg.geometry not in ("channel", "pipe"):
            raise ConfigError(f"geometry must be channel or pipe, got {cfg.geometry!r}")
        if cfg.npoints < 2:
            raise ConfigError("npoints must be >= 2")
        return cfg

    @classmethod
    def from_file(cls, path):
        try:
            with open(path) as fh:
                return cls.from_text(fh.read())
        except OSError as exc:
            raise ConfigError(f"cannot read case config {path}: {exc}") from None
