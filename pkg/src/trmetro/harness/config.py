"""Scenario configuration: a JSON document validated against a published schema."""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema
import numpy as np

PROTOCOLS = (
    "echo", "paramp", "su11", "wva", "naive", "hindsight", "agnostic", "positronium",
    "agnostic-dephasing", "ico-seq-vs-switch", "ico-noise-robust",
)

OUT_ENV = "TRMETRO_OUT"

_RANGE = {
    "oneOf": [
        {
            "type": "object",
            "properties": {"values": {"type": "array", "items": {"type": "number"}, "minItems": 1}},
            "required": ["values"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {
                "start": {"type": "number"},
                "stop": {"type": "number"},
                "num": {"type": "integer", "minimum": 1},
            },
            "required": ["start", "stop", "num"],
            "additionalProperties": False,
        },
    ]
}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "trmetro scenario",
    "type": "object",
    "properties": {
        "protocol": {"enum": list(PROTOCOLS)},
        "grid": {"type": "object", "minProperties": 1, "additionalProperties": _RANGE},
        "params": {"type": "object"},
        "seed": {"type": "integer", "minimum": 0},
        "shots": {"oneOf": [{"const": "exact"}, {"type": "integer", "minimum": 1}]},
        "output": {"type": "string"},
    },
    "required": ["protocol", "grid"],
    "additionalProperties": False,
}

# grid axis -> (low, high, closed-low, closed-high); params -> defaults
PROTOCOL_AXES = {
    "echo": {"alpha": (-math.inf, math.inf, True, True)},
    "paramp": {"r": (0, math.inf, True, True), "kick": (-math.inf, math.inf, True, True)},
    "su11": {"r": (0, math.inf, True, True), "alpha": (-math.inf, math.inf, True, True)},
    "wva": {"alpha": (0, math.inf, True, True)},
    "naive": {"alpha": (0, math.pi, False, False)},
    "hindsight": {"alpha": (-math.inf, math.inf, True, True), "theta": (0, math.pi, True, True),
                  "phi": (-math.inf, math.inf, True, True)},
    "agnostic": {"alpha": (-math.inf, math.inf, True, True), "theta": (0, math.pi, True, True),
                 "phi": (-math.inf, math.inf, True, True)},
    "positronium": {"alpha": (-math.inf, math.inf, True, True), "theta": (0, math.pi, True, True),
                    "phi": (-math.inf, math.inf, True, True)},
    "agnostic-dephasing": {"strength": (0, 1, True, True), "theta": (0, math.pi, True, True),
                           "phi": (-math.inf, math.inf, True, True)},
    "ico-seq-vs-switch": {"r": (0, 1, True, True), "alpha": (-math.inf, math.inf, True, True)},
    "ico-noise-robust": {"alpha": (-math.inf, math.inf, True, True), "noise": (0, 1, True, True)},
}

PROTOCOL_DEFAULTS = {
    "echo": {"preset": "hadamard", "qubits": 1},
    "paramp": {"fock_dim": 60, "kick": 0.1},
    "su11": {"fock_dim": 25, "r": 0.5},
    "wva": {"postselect_coeff": -0.9, "delta_phi": None, "grid_points": 4096},
    "naive": {"direction": [1.0, 0.0, 0.0]},
    "hindsight": {"direction": [1.0, 0.0, 0.0]},
    "agnostic": {"direction": [1.0, 0.0, 0.0]},
    "positronium": {"direction": [1.0, 0.0, 0.0]},
    "agnostic-dephasing": {"direction": [0.0, 0.0, 1.0]},
    "ico-seq-vs-switch": {"family": "depolarizing"},
    "ico-noise-robust": {"noise": 1.0, "system": "plus", "control": "plus"},
}


class ConfigError(ValueError):
    def __init__(self, message: str, path: str = ""):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


@dataclass(frozen=True)
class ScenarioConfig:
    protocol: str
    grid: dict
    params: dict = field(default_factory=dict)
    seed: int = 0
    shots: int | None = None
    output: str | None = None

    def axes(self) -> dict[str, list[float]]:
        return {name: expand_range(spec) for name, spec in self.grid.items()}

    def points(self) -> list[dict[str, float]]:
        """Cartesian product of the grid axes in declaration order (last axis fastest)."""
        axes = self.axes()
        names = list(axes)
        return [dict(zip(names, combo)) for combo in itertools.product(*axes.values())]

    def merged_params(self) -> dict:
        out = dict(PROTOCOL_DEFAULTS.get(self.protocol, {}))
        out.update(self.params)
        return out

    def as_dict(self) -> dict:
        d = {"protocol": self.protocol, "grid": self.grid, "params": self.params, "seed": self.seed,
             "shots": "exact" if self.shots is None else self.shots}
        if self.output is not None:
            d["output"] = self.output
        return d


def expand_range(spec: dict) -> list[float]:
    if "values" in spec:
        return [float(v) for v in spec["values"]]
    return [float(v) for v in np.linspace(spec["start"], spec["stop"], spec["num"])]


def _path(err) -> str:
    return ".".join(str(p) for p in err.absolute_path) or "<root>"


def validate(doc: dict) -> ScenarioConfig:
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(map(str, e.absolute_path)))
    if errors:
        err = errors[0]
        raise ConfigError(err.message, _path(err))
    protocol = doc["protocol"]
    allowed = PROTOCOL_AXES[protocol]
    for name, spec in doc["grid"].items():
        if name not in allowed:
            raise ConfigError(f"unknown axis for {protocol}; expected one of {sorted(allowed)}", f"grid.{name}")
        lo, hi, lo_closed, hi_closed = allowed[name]
        for v in expand_range(spec):
            ok_lo = v >= lo if lo_closed else v > lo
            ok_hi = v <= hi if hi_closed else v < hi
            if not (ok_lo and ok_hi):
                raise ConfigError(f"value {v} outside the protocol's allowed range", f"grid.{name}")
    shots = doc.get("shots", "exact")
    return ScenarioConfig(
        protocol=protocol,
        grid=doc["grid"],
        params=doc.get("params", {}),
        seed=int(doc.get("seed", 0)),
        shots=None if shots == "exact" else int(shots),
        output=doc.get("output"),
    )


def load(path) -> ScenarioConfig:
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}") from exc
    return validate(doc)


DEFAULT_GRIDS = {
    "echo": {"alpha": {"start": 0.5, "stop": 3.0, "num": 6}},
    "paramp": {"r": {"values": [0.0, 0.25, 0.5, 1.0]}},
    "su11": {"alpha": {"values": [0.001, 0.01, 0.1]}},
    "wva": {"alpha": {"values": [0.01]}},
    "naive": {"alpha": {"values": [0.5, 1.0, 1.5]}},
    "hindsight": {"alpha": {"start": 0.1, "stop": 1.5, "num": 15}},
    "agnostic": {"alpha": {"start": 0.1, "stop": 1.5, "num": 15}},
    "positronium": {"alpha": {"start": 0.1, "stop": 1.5, "num": 15}},
    "agnostic-dephasing": {"strength": {"values": [0.1, 0.25, 0.5, 0.75, 0.9]}},
    "ico-seq-vs-switch": {"r": {"values": [0.05, 0.1, 0.2, 0.5, 0.9, 1.0]}},
    "ico-noise-robust": {"alpha": {"values": [0.3, 0.7, 1.0]}},
}


def default_config(protocol: str) -> ScenarioConfig:
    return validate({"protocol": protocol, "grid": DEFAULT_GRIDS[protocol]})
