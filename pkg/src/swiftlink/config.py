"""Experiment configuration: a flat INI file with units in the key names.

Example::

    [experiment]
    n_antennas = 32
    measurements = 124
    bandwidth_hz = 100e6
    carrier_hz = 28e9
    snr_db = -10, 0, 10
    cfo_ppm = 1
    methods = swiftlink-t1, swiftlink-t2, iid-cs, iid-cs-zero-cfo, exhaustive
"""

import configparser
from dataclasses import asdict, dataclass, field, fields, replace

from .estimator import cfo_range

METHODS = ("swiftlink-t1", "swiftlink-t2", "iid-cs", "iid-cs-zero-cfo", "exhaustive")
CHANNELS = ("clustered", "sparse-on", "sparse-off")
SECTION = "experiment"


class ConfigError(ValueError):
    """Invalid experiment configuration."""


def _floats(text):
    return tuple(float(v) for v in text.replace(";", ",").split(",") if v.strip())


def _ints(text):
    return tuple(int(float(v)) for v in text.replace(";", ",").split(",") if v.strip())


def _words(text):
    return tuple(v.strip() for v in text.replace(";", ",").split(",") if v.strip())


def _bool(text):
    return configparser.ConfigParser.BOOLEAN_STATES[text.strip().lower()]


@dataclass(frozen=True)
class ExperimentConfig:
    n_antennas: int = 32
    measurements: int = 124
    measurements_list: tuple = ()
    k_max: int = 16
    taps: int = 13
    pilot_length: int = 13
    bandwidth_hz: float = 100e6
    carrier_hz: float = 28e9
    snr_db: tuple = (0.0,)
    cfo_hz: tuple = ()
    cfo_ppm: tuple = (1.0,)
    trajectory_dist: str = "binomial"
    phase_bits: int = 3
    zc_root: int = 11
    n_subcarriers: int = 64
    oversample: int = 64
    refine_iters: int = 2
    polish: bool = True
    channel: str = "clustered"
    sparsity: int = 3
    methods: tuple = METHODS
    trials: int = 20
    seed: int = 0
    override_range: bool = False
    # ripcheck
    rip_sizes: tuple = (16, 32)
    rip_trials: int = 20000
    rip_grid: int = 64
    extra: dict = field(default_factory=dict, compare=False)

    @property
    def cfo_points_hz(self):
        """Operating CFOs in Hz; explicit ``cfo_hz`` wins over ``cfo_ppm``."""
        if self.cfo_hz:
            return tuple(self.cfo_hz)
        return tuple(p * 1e-6 * self.carrier_hz for p in self.cfo_ppm)

    @property
    def m_points(self):
        return tuple(self.measurements_list) or (self.measurements,)

    def validate(self):
        N = self.n_antennas
        if N < 2:
            raise ConfigError("n_antennas must be >= 2")
        if self.pilot_length != 13:
            raise ConfigError("only the length-13 Barker pilot is supported")
        if self.taps < 1:
            raise ConfigError("taps must be >= 1")
        if not self.snr_db or not self.cfo_points_hz or not self.m_points:
            raise ConfigError("empty SNR, CFO or measurement grid")
        if not self.methods:
            raise ConfigError("no methods selected")
        bad = set(self.methods) - set(METHODS)
        if bad:
            raise ConfigError(f"unknown methods {sorted(bad)}")
        if self.channel not in CHANNELS:
            raise ConfigError(f"channel must be one of {CHANNELS}")
        if self.k_max < 1:
            raise ConfigError("k_max must be >= 1")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.trajectory_dist not in ("uniform", "binomial"):
            raise ConfigError("trajectory_dist must be uniform or binomial")
        for M in self.m_points:
            if M < 2 or M % 2 or M > 2 * (2 * N - 1):
                raise ConfigError(f"measurements={M} must be even and at most 2(2N-1)={2 * (2 * N - 1)}")
        if not self.override_range:
            for m, kind in (("swiftlink-t1", "typeI"), ("swiftlink-t2", "typeII")):
                if m not in self.methods:
                    continue
                f_max = cfo_range(kind, self.bandwidth_hz, self.pilot_length, self.taps)
                for f in self.cfo_points_hz:
                    if abs(f) >= f_max:
                        raise ConfigError(
                            f"CFO {f:g} Hz outside the {kind} range {f_max:g} Hz "
                            "(use --override-range to run anyway)")
        for N_r in self.rip_sizes:
            if N_r < 2:
                raise ConfigError("rip_sizes must be >= 2")
        return self

    def to_dict(self):
        d = asdict(self)
        d.pop("extra")
        return d


_PARSERS = {
    "snr_db": _floats, "cfo_hz": _floats, "cfo_ppm": _floats,
    "measurements_list": _ints, "rip_sizes": _ints, "methods": _words,
}


def _coerce(name, text, default):
    if name in _PARSERS:
        return _PARSERS[name](text)
    if isinstance(default, bool):
        return _bool(text)
    if isinstance(default, int):
        return int(float(text))
    if isinstance(default, float):
        return float(text)
    return text.strip()


def from_mapping(mapping, base=None):
    """Config from string key/value pairs, e.g. an INI section."""
    base = ExperimentConfig() if base is None else base
    known = {f.name: getattr(base, f.name) for f in fields(base) if f.name != "extra"}
    updates = {}
    for key, text in mapping.items():
        if key not in known:
            raise ConfigError(f"unknown config key {key!r}")
        try:
            updates[key] = _coerce(key, text, known[key])
        except (ValueError, KeyError) as exc:
            raise ConfigError(f"bad value for {key}: {text!r}") from exc
    return replace(base, **updates)


def load(path=None, **overrides):
    """Read ``path`` (if any), apply keyword overrides, validate."""
    cfg = ExperimentConfig()
    if path is not None:
        parser = configparser.ConfigParser()
        try:
            with open(path) as fh:
                parser.read_file(fh)
        except (OSError, configparser.Error) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not parser.has_section(SECTION):
            raise ConfigError(f"config needs an [{SECTION}] section")
        cfg = from_mapping(dict(parser[SECTION]), cfg)
    overrides = {k: v for k, v in overrides.items() if v is not None}
    cfg = replace(cfg, **overrides)
    return cfg.validate()
