"""Run configuration: a small TOML schema with validation and rendering.

Every key is optional; the defaults reproduce the half-ball experiment
(40 x 40 x 20 grid on [-1, 1]^2 x [-1, 0], 20 collocation points on the
axis segment x3 in [0.8, 1.0], evaluation along x3 in [0.1, 1.0])::

    distance_delta = 0.05

    [domain]
    shape = "half-ball"          # or "box" with lower/upper corners
    radius = 1.0

    [grid]
    bounding_box = [[-1.0, -1.0, -1.0], [1.0, 1.0, 0.0]]
    resolution = [40, 40, 20]

    [source]
    preset = "paper-sec4"        # "constant" (uses value) or "file" (uses path)
    amplitude = 1.0

    [gamma]                      # measurement segment
    from = [0.0, 0.0, 0.8]
    to = [0.0, 0.0, 1.0]
    count = 20

    [gamma1]                     # evaluation range, endpoints included
    from = [0.0, 0.0, 0.1]
    to = [0.0, 0.0, 1.0]
    count = 91

    [noise]
    level = 0.0
    seed = 0

    [alpha]
    method = "tikhonov"          # or "least-norm"
    c = 1.0
    floor = 1e-12
    # value = 1e-6               # explicit alpha overrides c and floor

    [probe]                      # target segment must be disjoint from gamma
    from = [0.0, 0.0, 0.1]
    to = [0.0, 0.0, 0.3]
    count = 200
    M = 1.5
    samples = 200
    seed = 42

    [output]
    prefix = "doseline"
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace

import tomli

from .errors import ConfigError, DegenerateSegmentError
from .geometry import Segment, segments_disjoint

__all__ = [
    "DomainSpec",
    "GridSpec",
    "SourceSpec",
    "SegmentSpec",
    "NoiseSpec",
    "AlphaSpec",
    "ProbeSpec",
    "RunConfig",
    "parse_config",
    "load_config",
    "render_config",
]

SHAPES = ("half-ball", "box")
PRESETS = ("paper-sec4", "constant", "file")
METHODS = ("tikhonov", "least-norm")


@dataclass(frozen=True)
class DomainSpec:
    shape: str = "half-ball"
    radius: float = 1.0
    lower: tuple | None = None
    upper: tuple | None = None


@dataclass(frozen=True)
class GridSpec:
    bounding_box: tuple = ((-1.0, -1.0, -1.0), (1.0, 1.0, 0.0))
    resolution: tuple = (40, 40, 20)


@dataclass(frozen=True)
class SourceSpec:
    preset: str = "paper-sec4"
    amplitude: float = 1.0
    value: float = 1.0
    path: str | None = None


@dataclass(frozen=True)
class SegmentSpec:
    start: tuple
    end: tuple
    count: int

    def segment(self):
        return Segment(self.start, self.end)


@dataclass(frozen=True)
class NoiseSpec:
    level: float = 0.0
    seed: int = 0


@dataclass(frozen=True)
class AlphaSpec:
    method: str = "tikhonov"
    c: float = 1.0
    floor: float = 1e-12
    value: float | None = None


@dataclass(frozen=True)
class ProbeSpec:
    start: tuple = (0.0, 0.0, 0.1)
    end: tuple = (0.0, 0.0, 0.3)
    count: int = 200
    M: float = 1.5
    samples: int = 200
    seed: int = 42

    def segment(self):
        return Segment(self.start, self.end)


@dataclass(frozen=True)
class RunConfig:
    domain: DomainSpec = field(default_factory=DomainSpec)
    grid: GridSpec = field(default_factory=GridSpec)
    source: SourceSpec = field(default_factory=SourceSpec)
    gamma: SegmentSpec = field(default_factory=lambda: SegmentSpec((0.0, 0.0, 0.8), (0.0, 0.0, 1.0), 20))
    gamma1: SegmentSpec = field(default_factory=lambda: SegmentSpec((0.0, 0.0, 0.1), (0.0, 0.0, 1.0), 91))
    noise: NoiseSpec = field(default_factory=NoiseSpec)
    alpha: AlphaSpec = field(default_factory=AlphaSpec)
    probe: ProbeSpec = field(default_factory=ProbeSpec)
    output_prefix: str = "doseline"
    distance_delta: float = 0.05

    def with_seed(self, seed):
        """Copy with both the noise and the probe seed replaced."""
        return replace(
            self, noise=replace(self.noise, seed=seed), probe=replace(self.probe, seed=seed)
        )


# --- parsing -----------------------------------------------------------------

# section -> {toml key: (attribute, kind)}
_SCHEMA = {
    "domain": {
        "shape": ("shape", "choice:" + ",".join(SHAPES)),
        "radius": ("radius", "float"),
        "lower": ("lower", "vec3"),
        "upper": ("upper", "vec3"),
    },
    "grid": {"bounding_box": ("bounding_box", "box"), "resolution": ("resolution", "int3")},
    "source": {
        "preset": ("preset", "choice:" + ",".join(PRESETS)),
        "amplitude": ("amplitude", "float"),
        "value": ("value", "float"),
        "path": ("path", "str"),
    },
    "gamma": {"from": ("start", "vec3"), "to": ("end", "vec3"), "count": ("count", "int")},
    "gamma1": {"from": ("start", "vec3"), "to": ("end", "vec3"), "count": ("count", "int")},
    "noise": {"level": ("level", "float"), "seed": ("seed", "int")},
    "alpha": {
        "method": ("method", "choice:" + ",".join(METHODS)),
        "c": ("c", "float"),
        "floor": ("floor", "float"),
        "value": ("value", "float"),
    },
    "probe": {
        "from": ("start", "vec3"),
        "to": ("end", "vec3"),
        "count": ("count", "int"),
        "M": ("M", "float"),
        "samples": ("samples", "int"),
        "seed": ("seed", "int"),
    },
    "output": {"prefix": ("prefix", "str")},
}
_TOP = {"distance_delta": "float"}


def _line_of(text, key):
    """1-based line on which dotted ``key`` is defined, or None."""
    parts = key.split(".")
    lines = text.splitlines()
    section = None
    for n, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        header = re.fullmatch(r"\[\s*([^\]]+?)\s*\]", line)
        if header:
            section = header.group(1)
            if len(parts) == 1 and section == parts[0]:
                return n
            continue
        m = re.match(r'"?([A-Za-z0-9_\-.]+)"?\s*=', line)
        if not m:
            continue
        full = f"{section}.{m.group(1)}" if section else m.group(1)
        if full == key or (len(parts) == 1 and section is None and m.group(1) == key):
            return n
        if full.startswith(key + "."):
            return n
    return None


def _coerce(value, kind, key, text):
    def fail(what):
        raise ConfigError(f"{key} must be {what}, got {value!r}", key, _line_of(text, key))

    def num(x):
        if isinstance(x, bool) or not isinstance(x, (int, float)):
            fail("a number")
        return float(x)

    if kind == "float":
        return num(value)
    if kind == "int":
        if isinstance(value, bool) or not isinstance(value, int):
            fail("an integer")
        return value
    if kind == "str":
        if not isinstance(value, str):
            fail("a string")
        return value
    if kind.startswith("choice:"):
        choices = kind.split(":", 1)[1].split(",")
        if value not in choices:
            fail("one of " + ", ".join(repr(c) for c in choices))
        return value
    if kind == "vec3":
        if not isinstance(value, list) or len(value) != 3:
            fail("a list of three numbers")
        return tuple(num(x) for x in value)
    if kind == "int3":
        if not isinstance(value, list) or len(value) != 3:
            fail("a list of three integers")
        if any(isinstance(x, bool) or not isinstance(x, int) for x in value):
            fail("a list of three integers")
        return tuple(value)
    if kind == "box":
        if not isinstance(value, list) or len(value) != 2:
            fail("two corner 3-vectors")
        return tuple(_coerce(c, "vec3", key, text) for c in value)
    raise AssertionError(kind)


def parse_config(text: str) -> RunConfig:
    """Parse and validate a TOML run configuration.

    Raises
    ------
    ConfigError
        On malformed TOML, unknown keys, type mismatches or violated
        invariants; the message names the key path and, when it can be
        located, the line.
    """
    try:
        doc = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        line = getattr(exc, "lineno", None)
        if line is None:
            m = re.search(r"line (\d+)", str(exc))
            line = int(m.group(1)) if m else None
        raise ConfigError(f"malformed config: {exc}", None, line) from None

    cfg = RunConfig()
    updates = {}
    for key, value in doc.items():
        if key in _TOP:
            updates[key] = _coerce(value, _TOP[key], key, text)
            continue
        if key not in _SCHEMA:
            raise ConfigError(f"unknown key '{key}'", key, _line_of(text, key))
        if not isinstance(value, dict):
            raise ConfigError(f"'{key}' must be a table", key, _line_of(text, key))
        section = {}
        for sub, subval in value.items():
            path = f"{key}.{sub}"
            if sub not in _SCHEMA[key]:
                raise ConfigError(f"unknown key '{path}'", path, _line_of(text, path))
            attr, kind = _SCHEMA[key][sub]
            section[attr] = _coerce(subval, kind, path, text)
        if key == "output":
            updates["output_prefix"] = section.get("prefix", cfg.output_prefix)
        else:
            updates[key] = replace(getattr(cfg, key), **section)

    cfg = replace(cfg, **updates)
    _validate(cfg, text)
    return cfg


def load_config(path) -> RunConfig:
    """Read and parse a config file."""
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def _validate(cfg, text=""):
    def fail(msg, key):
        raise ConfigError(msg, key, _line_of(text, key) if text else None)

    d = cfg.domain
    if d.shape == "half-ball" and not d.radius > 0:
        fail("radius must be positive", "domain.radius")
    if d.shape == "box":
        if d.lower is None or d.upper is None:
            fail("box domain needs both lower and upper corners", "domain")
        if not all(a < b for a, b in zip(d.lower, d.upper)):
            fail("box domain is empty", "domain.lower")
    lo, hi = cfg.grid.bounding_box
    if not all(a < b for a, b in zip(lo, hi)):
        fail("degenerate bounding box", "grid.bounding_box")
    if min(cfg.grid.resolution) < 1:
        fail("resolution components must be >= 1", "grid.resolution")
    if cfg.source.preset == "file" and not cfg.source.path:
        fail("file preset needs source.path", "source.path")

    for name, spec in (("gamma", cfg.gamma), ("gamma1", cfg.gamma1), ("probe", cfg.probe)):
        try:
            spec.segment()
        except DegenerateSegmentError:
            fail("degenerate segment: 'from' equals 'to'", f"{name}.from")
        if spec.count < 1:
            fail("count must be >= 1", f"{name}.count")
    if cfg.probe.samples < 1:
        fail("samples must be >= 1", "probe.samples")
    if not cfg.probe.M > 0:
        fail("M must be positive", "probe.M")
    if not segments_disjoint(cfg.gamma.segment(), cfg.probe.segment()):
        fail("probe segment must be disjoint from gamma", "probe.from")

    if not cfg.noise.level >= 0:
        fail("noise level must be >= 0", "noise.level")
    if not cfg.alpha.c > 0:
        fail("alpha.c must be positive", "alpha.c")
    if not cfg.alpha.floor > 0:
        fail("alpha.floor must be positive", "alpha.floor")
    if cfg.alpha.value is not None and not cfg.alpha.value > 0:
        fail("explicit alpha must be positive", "alpha.value")
    if not cfg.distance_delta > 0:
        fail("distance_delta must be positive", "distance_delta")
    if not cfg.output_prefix:
        fail("output prefix must be non-empty", "output.prefix")


# --- rendering ---------------------------------------------------------------


def _fmt(value):
    if isinstance(value, str):
        return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(value) if value == value and abs(value) != float("inf") else str(value)
    if isinstance(value, tuple):
        return "[" + ", ".join(_fmt(v) for v in value) + "]"
    raise TypeError(value)


def render_config(cfg: RunConfig) -> str:
    """Serialize ``cfg`` so that ``parse_config(render_config(cfg)) == cfg``."""
    out = [f"distance_delta = {_fmt(cfg.distance_delta)}"]
    for section, keys in _SCHEMA.items():
        out.append("")
        out.append(f"[{section}]")
        if section == "output":
            out.append(f"prefix = {_fmt(cfg.output_prefix)}")
            continue
        spec = getattr(cfg, section)
        for key, (attr, _) in keys.items():
            value = getattr(spec, attr)
            if value is not None:
                out.append(f"{key} = {_fmt(value)}")
    return "\n".join(out) + "\n"

