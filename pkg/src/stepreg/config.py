"""Experiment configuration: strict JSON parsing with line-anchored errors."""

from __future__ import annotations

import json
import re
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .noise import KINDS, NoiseSpec
from .worked_example import LENGTHS_IN_T, LEVELS, N as EXAMPLE_N, OFFSETS_IN_T

METHODS = ("xcorr", "threshold", "dp")


class ConfigError(ValueError):
    """Invalid configuration; ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None, path: str | None = None):
        self.line = line
        self.path = path
        where = ""
        if path:
            where = f"{path}:{line}: " if line else f"{path}: "
        elif line:
            where = f"line {line}: "
        super().__init__(where + message)


@dataclass(frozen=True)
class FunctionConfig:
    levels: tuple = tuple(float(g) for g in LEVELS)
    lengths_in_T: tuple = tuple(float(r) for r in LENGTHS_IN_T)
    T: float = 1.0


@dataclass(frozen=True)
class GridConfig:
    offsets_in_T: tuple = tuple(float(o) for o in OFFSETS_IN_T)
    N: int = EXAMPLE_N


@dataclass(frozen=True)
class NoiseConfig:
    kind: str = "symmetric_binary"
    param: float = 0.0
    patterns: tuple = ()

    def specs(self) -> tuple[NoiseSpec, NoiseSpec]:
        if self.kind == "fixed":
            return NoiseSpec.fixed(self.patterns[0]), NoiseSpec.fixed(self.patterns[1])
        spec = NoiseSpec(self.kind, self.param)
        return spec, spec


@dataclass(frozen=True)
class OutputConfig:
    json: str | None = None
    csv_dir: str | None = None
    dot: str | None = None


@dataclass(frozen=True)
class ExperimentConfig:
    function: FunctionConfig = field(default_factory=FunctionConfig)
    grids: GridConfig = field(default_factory=GridConfig)
    noise: NoiseConfig = field(default_factory=NoiseConfig)
    seed: int = 0
    methods: tuple = METHODS
    v: float = 1.0
    weight: str = "w1"
    max_paths: int = 64
    tol: float = 1e-9
    l: tuple | None = None
    trials: int = 100
    output: OutputConfig = field(default_factory=OutputConfig)

    def to_dict(self) -> dict:
        return asdict(self)


_SECTIONS = {
    "function": FunctionConfig,
    "grids": GridConfig,
    "noise": NoiseConfig,
    "output": OutputConfig,
}
_TOP = {f for f in ExperimentConfig.__dataclass_fields__}


def _line_of(text: str, key: str) -> int | None:
    m = re.search(r'"' + re.escape(key) + r'"\s*:', text)
    return text.count("\n", 0, m.start()) + 1 if m else None


def _reject_unknown(data: dict, allowed, text: str, prefix: str, path):
    for key in data:
        if key not in allowed:
            raise ConfigError(f"unknown key {prefix + key!r}", _line_of(text, key), path)


def _number_list(value, name, text, path, integer=False):
    if not isinstance(value, list) or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in value):
        raise ConfigError(f"{name} must be a list of numbers", _line_of(text, name.split(".")[-1]), path)
    if integer and not all(isinstance(x, int) for x in value):
        raise ConfigError(f"{name} must be a list of integers", _line_of(text, name.split(".")[-1]), path)
    return tuple(value)


def parse_config(text: str, path: str | None = None) -> ExperimentConfig:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc.msg} (column {exc.colno})", exc.lineno, path) from None
    if not isinstance(data, dict):
        raise ConfigError("top level must be an object", 1, path)
    _reject_unknown(data, _TOP, text, "", path)

    def bad(msg, key):
        return ConfigError(msg, _line_of(text, key), path)

    kwargs = {}
    for name, cls in _SECTIONS.items():
        if name not in data:
            continue
        sub = data[name]
        if not isinstance(sub, dict):
            raise bad(f"{name} must be an object", name)
        _reject_unknown(sub, cls.__dataclass_fields__, text, f"{name}.", path)
        kwargs[name] = sub

    fn = FunctionConfig()
    if "function" in kwargs:
        s = kwargs["function"]
        fn = FunctionConfig(
            _number_list(s.get("levels", list(fn.levels)), "function.levels", text, path),
            _number_list(s.get("lengths_in_T", list(fn.lengths_in_T)), "function.lengths_in_T", text, path),
            s.get("T", fn.T),
        )
        if len(fn.levels) != len(fn.lengths_in_T) or not fn.levels:
            raise bad("function.levels and function.lengths_in_T need equal, non-zero length", "function")
        if not isinstance(fn.T, (int, float)) or not fn.T > 0:
            raise bad("function.T must be a positive number", "T")

    grids = GridConfig()
    if "grids" in kwargs:
        s = kwargs["grids"]
        grids = GridConfig(
            _number_list(s.get("offsets_in_T", list(grids.offsets_in_T)), "grids.offsets_in_T", text, path),
            s.get("N", grids.N),
        )
        if len(grids.offsets_in_T) != 2:
            raise bad("grids.offsets_in_T needs exactly two offsets", "offsets_in_T")
        if not isinstance(grids.N, int) or isinstance(grids.N, bool) or grids.N < 2:
            raise bad("grids.N must be an integer >= 2", "N")

    noise = NoiseConfig()
    if "noise" in kwargs:
        s = kwargs["noise"]
        kind = s.get("kind", noise.kind)
        if kind not in KINDS:
            raise bad(f"noise.kind must be one of {', '.join(KINDS)}", "kind")
        param = s.get("param", 0.0)
        if not isinstance(param, (int, float)) or isinstance(param, bool):
            raise bad("noise.param must be a number", "param")
        patterns = ()
        if kind == "fixed":
            raw = s.get("patterns")
            if not isinstance(raw, list) or len(raw) != 2:
                raise bad("fixed noise needs two patterns", "patterns" if "patterns" in s else "kind")
            patterns = tuple(_number_list(p, "noise.patterns", text, path) for p in raw)
            for p in patterns:
                if len(p) != grids.N:
                    raise bad(f"noise pattern has length {len(p)}, grids.N is {grids.N}", "patterns")
        elif s.get("patterns"):
            raise bad("noise.patterns is only used with kind 'fixed'", "patterns")
        noise = NoiseConfig(kind, float(param), patterns)
        try:
            noise.specs()
        except ValueError as exc:
            raise bad(f"noise: {exc}", "noise") from None

    out = OutputConfig(**kwargs["output"]) if "output" in kwargs else OutputConfig()

    cfg = {}
    if "seed" in data:
        if not isinstance(data["seed"], int) or isinstance(data["seed"], bool) or not 0 <= data["seed"] < 2**64:
            raise bad("seed must be an unsigned 64-bit integer", "seed")
        cfg["seed"] = data["seed"]
    if "methods" in data:
        raw = data["methods"]
        raw = [raw] if isinstance(raw, str) else raw
        if not isinstance(raw, list) or not raw or any(m not in METHODS for m in raw):
            raise bad(f"methods must name some of {', '.join(METHODS)}", "methods")
        cfg["methods"] = tuple(raw)
    for key in ("v", "tol"):
        if key in data:
            val = data[key]
            if not isinstance(val, (int, float)) or isinstance(val, bool) or not val > 0:
                raise bad(f"{key} must be a positive number", key)
            cfg[key] = float(val)
    if "weight" in data:
        if str(data["weight"]).lower() not in ("w1", "w2", "w3"):
            raise bad("weight must be w1, w2 or w3", "weight")
        cfg["weight"] = str(data["weight"]).lower()
    for key in ("max_paths", "trials"):
        if key in data:
            val = data[key]
            if not isinstance(val, int) or isinstance(val, bool) or val < 1:
                raise bad(f"{key} must be a positive integer", key)
            cfg[key] = val
    if "l" in data and data["l"] is not None:
        ls = _number_list(data["l"], "l", text, path, integer=True)
        m = len(fn.levels)
        if not ls or any(not 0 <= k <= m for k in ls):
            raise bad(f"l entries must lie in 0..{m}", "l")
        cfg["l"] = ls
    return ExperimentConfig(function=fn, grids=grids, noise=noise, output=out, **cfg)


def load_config(path) -> ExperimentConfig:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", None, str(p)) from None
    return parse_config(text, str(p))
