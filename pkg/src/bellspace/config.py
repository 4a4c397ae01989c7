"""Experiment configuration: a flat ``key = value`` document with sections.

Example::

    [source]
    kind = singlet
    angles = 0, pi/2, pi/4, 3*pi/4

    [settings]
    mode = explicit
    table = 0.4, 0.1; 0.1, 0.4

    [run]
    trials = 1000000
    seed = 42

Keys are addressed as ``section.key``.  Rows of a table and the
strategies of a mixture are separated by ``;``, entries by ``,``.  Angles
accept arithmetic on numbers and ``pi``; ``angles = optimal`` selects the
singlet optimum.
"""

import ast
import configparser
import math
import operator
import os
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional

from .errors import ConfigError, DomainError, InvalidDistributionError, NormalizationError, UnknownModelError
from .models import BellSphereModel, DeterministicStrategy, MixtureModel, SingletSampler, as_weight
from .probability_space import MASK64, SettingDistribution, uniform_settings

SEED_ENV = "BELLSPACE_SEED"
SOURCE_KINDS = ("strategy", "mixture", "sphere", "singlet")
ANGLE_NAMES = ("a1", "a2", "b1", "b2")
OPTIMAL_ANGLES = (0.0, math.pi / 2, math.pi / 4, 3 * math.pi / 4)

KNOWN_KEYS = {
    "source": ("kind", "signs", "weights", "angles", "vectors"),
    "settings": ("mode", "table"),
    "run": ("trials", "seed", "workers", "guard_k"),
    "out": ("report", "trials", "csv"),
    "sweep": ("angle", "start", "stop", "steps"),
}

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv}


def parse_angle(text: str) -> float:
    """Evaluate an angle such as ``3*pi/4`` or ``-0.25``."""

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        raise ValueError(f"unsupported angle expression {text!r}")

    return ev(ast.parse(text.strip(), mode="eval"))


def _rows(text):
    return [[v.strip() for v in row.split(",")] for row in text.split(";") if row.strip()]


def _flat(text):
    return [v.strip() for v in text.split(",") if v.strip()]


def _fmt(x: float) -> str:
    return repr(float(x))


@dataclass(frozen=True)
class SourceSpec:
    kind: str
    signs: tuple = ()
    weights: tuple = ()
    angles: tuple = ()
    vectors: tuple = ()

    def build(self):
        if self.kind == "strategy":
            return DeterministicStrategy(*self.signs[0])
        if self.kind == "mixture":
            return MixtureModel(tuple(zip(self.signs, (Fraction(w) for w in self.weights))))
        if self.kind == "sphere":
            if self.vectors:
                return BellSphereModel(*self.vectors)
            return BellSphereModel.planar(*self.angles)
        if self.kind == "singlet":
            return SingletSampler(*self.angles)
        raise UnknownModelError("source.kind", f"unknown model kind {self.kind!r}")

    def with_angle(self, name: str, value: float) -> "SourceSpec":
        if not self.angles:
            return self
        angles = list(self.angles)
        angles[ANGLE_NAMES.index(name)] = float(value)
        return replace(self, angles=tuple(angles))


@dataclass(frozen=True)
class SweepSpec:
    angle: str
    start: float
    stop: float
    steps: int

    def grid(self):
        if self.steps == 1:
            return [self.start]
        return [self.start + (self.stop - self.start) * k / (self.steps - 1) for k in range(self.steps)]


@dataclass(frozen=True)
class ExperimentConfig:
    source: SourceSpec
    settings: SettingDistribution = field(default_factory=uniform_settings)
    settings_mode: str = "uniform"
    trials: int = 1_000_000
    seed: int = 0
    workers: int = 1
    guard_k: float = 5.0
    out_report: Optional[str] = None
    out_trials: Optional[str] = None
    out_csv: Optional[str] = None
    sweep: Optional[SweepSpec] = None


def _source_spec(values) -> SourceSpec:
    kind = values.get("source.kind")
    if kind is None:
        raise ConfigError("source.kind", "missing")
    kind = kind.strip().lower()
    if kind not in SOURCE_KINDS:
        raise UnknownModelError("source.kind", f"unknown model kind {kind!r}; expected one of {SOURCE_KINDS}")

    def need(key):
        if key not in values:
            raise ConfigError(key, f"required for source kind {kind!r}")
        return values[key]

    def signs_row(row, key):
        try:
            signs = tuple(int(float(v)) for v in row)
        except ValueError:
            raise ConfigError(key, f"signs must be +1 or -1, got {row}") from None
        if len(signs) != 4 or any(v not in (-1, 1) for v in signs):
            raise DomainError(key, f"each strategy needs four signs of +1/-1, got {row}")
        return signs

    if kind == "strategy":
        rows = _rows(need("source.signs"))
        if len(rows) != 1:
            raise ConfigError("source.signs", "a strategy takes exactly one row of four signs")
        return SourceSpec(kind, signs=(signs_row(rows[0], "source.signs"),))

    if kind == "mixture":
        signs = tuple(signs_row(r, "source.signs") for r in _rows(need("source.signs")))
        try:
            weights = tuple(as_weight(w) for w in _flat(need("source.weights")))
        except (ValueError, ZeroDivisionError):
            raise ConfigError("source.weights", "weights must be numbers or fractions like 1/3") from None
        if len(weights) != len(signs):
            raise ConfigError("source.weights", f"{len(weights)} weights for {len(signs)} strategies")
        if any(w < 0 for w in weights):
            raise DomainError("source.weights", "weights must be >= 0")
        if not weights:
            raise ConfigError("source.signs", "a mixture needs at least one strategy")
        if abs(float(sum(weights)) - 1.0) > 1e-12:
            raise NormalizationError("source.weights", f"weights sum to {float(sum(weights))!r}, not 1")
        return SourceSpec(kind, signs=signs, weights=tuple(str(w) for w in weights))

    if kind == "sphere" and "source.vectors" in values:
        try:
            vecs = tuple(tuple(float(v) for v in r) for r in _rows(values["source.vectors"]))
        except ValueError:
            raise ConfigError("source.vectors", "vectors must be numbers") from None
        if len(vecs) != 4 or any(len(v) != 3 for v in vecs):
            raise ConfigError("source.vectors", "need four 3-vectors a1; a2; b1; b2")
        for v in vecs:
            if abs(math.sqrt(sum(c * c for c in v)) - 1.0) > 1e-12:
                raise DomainError("source.vectors", f"{v} is not a unit vector")
        return SourceSpec(kind, vectors=vecs)

    raw = need("source.angles").strip()
    if raw.lower() == "optimal":
        angles = OPTIMAL_ANGLES
    else:
        try:
            angles = tuple(parse_angle(a) for a in _flat(raw))
        except (ValueError, SyntaxError, ZeroDivisionError):
            raise ConfigError("source.angles", f"cannot parse angles {raw!r}") from None
    if len(angles) != 4 or not all(math.isfinite(a) for a in angles):
        raise ConfigError("source.angles", "need four finite angles a1, a2, b1, b2")
    return SourceSpec(kind, angles=tuple(float(a) for a in angles))


def _settings(values):
    mode = values.get("settings.mode", "uniform").strip().lower()
    if mode == "uniform":
        if "settings.table" in values:
            raise ConfigError("settings.table", "only allowed with settings.mode = explicit")
        return mode, uniform_settings()
    if mode != "explicit":
        raise ConfigError("settings.mode", f"expected uniform or explicit, got {mode!r}")
    if "settings.table" not in values:
        raise ConfigError("settings.table", "required for settings.mode = explicit")
    try:
        table = [[float(v) for v in row] for row in _rows(values["settings.table"])]
    except ValueError:
        raise ConfigError("settings.table", "entries must be numbers") from None
    if len(table) != 2 or any(len(r) != 2 for r in table):
        raise ConfigError("settings.table", "need a 2x2 table 'p11, p12; p21, p22'")
    if any(v < 0 for r in table for v in r):
        raise DomainError("settings.table", "probabilities must be >= 0")
    try:
        return mode, SettingDistribution(tuple(tuple(r) for r in table))
    except InvalidDistributionError as exc:
        raise NormalizationError("settings.table", str(exc)) from None


def _int(values, key, default, lo, hi=None):
    if key not in values:
        return default
    try:
        v = int(values[key])
    except ValueError:
        raise ConfigError(key, f"expected an integer, got {values[key]!r}") from None
    if v < lo or (hi is not None and v > hi):
        raise DomainError(key, f"{v} out of range")
    return v


def _float(values, key, default):
    if key not in values:
        return default
    try:
        return float(values[key])
    except ValueError:
        raise ConfigError(key, f"expected a number, got {values[key]!r}") from None


def _sweep(values):
    present = [k for k in values if k.startswith("sweep.")]
    if not present:
        return None
    angle = values.get("sweep.angle", "").strip()
    if angle not in ANGLE_NAMES:
        raise ConfigError("sweep.angle", f"expected one of {ANGLE_NAMES}, got {angle!r}")
    try:
        start = parse_angle(values.get("sweep.start", "0"))
        stop = parse_angle(values.get("sweep.stop", "pi"))
    except (ValueError, SyntaxError, ZeroDivisionError):
        raise ConfigError("sweep.start", "cannot parse sweep range") from None
    steps = _int(values, "sweep.steps", 0, 0)
    if steps == 0:
        raise DomainError("sweep.steps", "sweep grid is empty")
    return SweepSpec(angle, start, stop, steps)


def parse_mapping(values) -> ExperimentConfig:
    """Validate a flat ``{"section.key": "text"}`` mapping."""
    for key in values:
        section, _, name = key.partition(".")
        if name not in KNOWN_KEYS.get(section, ()):
            raise ConfigError(key, "unknown key")
    source = _source_spec(values)
    mode, dist = _settings(values)
    trials = _int(values, "run.trials", 1_000_000, 0)
    if trials == 0:
        raise DomainError("run.trials", "must be at least 1")
    env_seed = os.environ.get(SEED_ENV)
    default_seed = 0
    if env_seed is not None and env_seed.strip():
        try:
            default_seed = int(env_seed)
        except ValueError:
            raise ConfigError(SEED_ENV, f"expected an integer, got {env_seed!r}") from None
    seed = _int(values, "run.seed", default_seed, 0, MASK64)
    if not 0 <= seed <= MASK64:
        raise DomainError("run.seed", f"{seed} out of the 64-bit unsigned range")
    workers = _int(values, "run.workers", 1, 1)
    guard_k = _float(values, "run.guard_k", 5.0)
    if not guard_k > 0:
        raise DomainError("run.guard_k", "must be positive")
    return ExperimentConfig(
        source=source,
        settings=dist,
        settings_mode=mode,
        trials=trials,
        seed=seed,
        workers=workers,
        guard_k=guard_k,
        out_report=values.get("out.report"),
        out_trials=values.get("out.trials"),
        out_csv=values.get("out.csv"),
        sweep=_sweep(values),
    )


def parse_config(text: str) -> ExperimentConfig:
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError("document", str(exc).splitlines()[0]) from None
    values = {f"{sec}.{k}": v for sec in parser.sections() for k, v in parser.items(sec)}
    return parse_mapping(values)


def load_config(path) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def to_mapping(cfg: ExperimentConfig, execution=True) -> dict:
    """Canonical flat mapping; ``execution=False`` drops keys that cannot change results."""
    src = cfg.source
    m = {"source.kind": src.kind}
    if src.kind == "strategy":
        m["source.signs"] = ", ".join(f"{v:+d}" for v in src.signs[0])
    elif src.kind == "mixture":
        m["source.signs"] = "; ".join(", ".join(f"{v:+d}" for v in row) for row in src.signs)
        m["source.weights"] = ", ".join(src.weights)
    elif src.vectors:
        m["source.vectors"] = "; ".join(", ".join(_fmt(c) for c in v) for v in src.vectors)
    else:
        m["source.angles"] = ", ".join(_fmt(a) for a in src.angles)
    m["settings.mode"] = cfg.settings_mode
    if cfg.settings_mode == "explicit":
        m["settings.table"] = "; ".join(", ".join(_fmt(v) for v in row) for row in cfg.settings.p)
    m["run.trials"] = str(cfg.trials)
    m["run.seed"] = str(cfg.seed)
    if execution:
        m["run.workers"] = str(cfg.workers)
    m["run.guard_k"] = _fmt(cfg.guard_k)
    if cfg.sweep is not None:
        m["sweep.angle"] = cfg.sweep.angle
        m["sweep.start"] = _fmt(cfg.sweep.start)
        m["sweep.stop"] = _fmt(cfg.sweep.stop)
        m["sweep.steps"] = str(cfg.sweep.steps)
    if execution:
        for key, v in (("out.report", cfg.out_report), ("out.trials", cfg.out_trials), ("out.csv", cfg.out_csv)):
            if v is not None:
                m[key] = v
    return m


def serialize(cfg: ExperimentConfig) -> str:
    lines = []
    current = None
    for key, value in to_mapping(cfg).items():
        section, _, name = key.partition(".")
        if section != current:
            if current is not None:
                lines.append("")
            lines.append(f"[{section}]")
            current = section
        lines.append(f"{name} = {value}")
    return "\n".join(lines) + "\n"


def parse_model_spec(text: str) -> SourceSpec:
    """Inline source description used by ``bellspace oracle``.

    ``strategy:+1,-1,+1,+1``, ``mixture:1/2@+1,+1,+1,+1;1/2@-1,-1,-1,-1``,
    ``singlet:optimal``, ``singlet:0,pi/2,pi/4,3*pi/4`` or ``sphere:<angles>``.
    """
    kind, sep, params = text.partition(":")
    kind = kind.strip().lower()
    if not sep:
        raise ConfigError("model-spec", f"expected 'kind:parameters', got {text!r}")
    if kind == "strategy":
        return _source_spec({"source.kind": kind, "source.signs": params})
    if kind == "mixture":
        weights, rows = [], []
        for part in params.split(";"):
            w, at, signs = part.partition("@")
            if not at:
                raise ConfigError("model-spec", f"mixture components look like 'weight@s1,s2,s3,s4', got {part!r}")
            weights.append(w.strip())
            rows.append(signs)
        return _source_spec({"source.kind": kind, "source.signs": ";".join(rows), "source.weights": ",".join(weights)})
    return _source_spec({"source.kind": kind, "source.angles": params})
