"""Run configuration: JSON schema, parsing and conversion to library objects.

All frequencies and couplings in a configuration are GHz (angular frequency
over 2 pi); the root key "units" must say so explicitly.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import jsonschema
import numpy as np

from .circuits import CapacitiveCoupling, CircuitSpec, CommensurabilityError, DriveSpec, SquidCoupler, Tone, resolve_tone_key

UNITS = "GHz_over_2pi"
TASKS = ("spectrum", "effective", "sweep", "probability", "honeycomb-compile", "honeycomb-validate", "catalog")

_NUM = {"type": "number"}
_TONE = {
    "type": "object",
    "properties": {"amplitude": _NUM, "frequency": {"type": "number", "exclusiveMinimum": 0}, "phase": _NUM},
    "required": ["amplitude", "frequency"],
    "additionalProperties": False,
}
_PAIR = {"type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 2, "maxItems": 2}
_COUPLING = {
    "oneOf": [
        {
            "type": "object",
            "properties": {"pair": _PAIR, "type": {"const": "capacitive"}, "g_c": _NUM},
            "required": ["pair", "type", "g_c"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {
                "pair": _PAIR,
                "type": {"const": "squid"},
                "g_x": _NUM,
                "g_z": _NUM,
                "g_1": _NUM,
                "g_2": _NUM,
                "phi_dc": _NUM,
                "tones": {"type": "array", "items": _TONE},
                "include_capacitive_yy": {"type": "boolean"},
                "g_c": _NUM,
            },
            "required": ["pair", "type", "g_x"],
            "additionalProperties": False,
        },
    ]
}
_DRIVE = {
    "type": "object",
    "properties": {
        "qubit": {"type": "integer", "minimum": 0},
        "axis": {"enum": ["x", "y", "z"]},
        "tones": {"type": "array", "items": _TONE},
    },
    "required": ["qubit", "axis", "tones"],
    "additionalProperties": False,
}
_CIRCUIT = {
    "type": "object",
    "properties": {
        "qubits": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}, "minItems": 1},
        "couplings": {"type": "array", "items": _COUPLING},
        "drives": {"type": "array", "items": _DRIVE},
    },
    "required": ["qubits"],
    "additionalProperties": False,
}
_GRID = {
    "oneOf": [
        {"type": "array", "items": _NUM, "minItems": 1},
        {
            "type": "object",
            "properties": {"start": _NUM, "stop": _NUM, "num": {"type": "integer", "minimum": 1}},
            "required": ["start", "stop", "num"],
            "additionalProperties": False,
        },
    ]
}
_LATTICE = {
    "oneOf": [
        {"enum": ["module", "plaquette"]},
        {
            "type": "object",
            "properties": {"brick_wall": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 2, "maxItems": 2}},
            "required": ["brick_wall"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {
                "vertices": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "properties": {"id": {"type": "integer"}, "class": {"type": "string"}},
                        "required": ["id", "class"],
                        "additionalProperties": False,
                    },
                },
                "edges": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "properties": {"left": {"type": "integer"}, "right": {"type": "integer"}, "link": {"enum": ["xx", "yy", "zz"]}},
                        "required": ["left", "right", "link"],
                        "additionalProperties": False,
                    },
                },
            },
            "required": ["vertices", "edges"],
            "additionalProperties": False,
        },
    ]
}
_HONEYCOMB = {
    "type": "object",
    "properties": {
        "lattice": _LATTICE,
        "pattern": {"type": "object", "additionalProperties": {"type": "array", "items": _NUM, "minItems": 1}},
        "frequencies": {"type": "object", "additionalProperties": _NUM},
        "delta_nn": _NUM,
        "delta_nnn": _NUM,
        "targets": {"type": "object", "additionalProperties": _NUM},
        "scheme": {"enum": ["driven_qubit", "driven_coupler"]},
        "constants": {"type": "object", "additionalProperties": _NUM},
        "refine": {"type": "boolean"},
        "center": {"type": "integer"},
        "n_fast": {"type": "integer", "minimum": 1},
        "gap_min": _NUM,
    },
    "required": ["lattice", "targets"],
    "additionalProperties": False,
}
_PARAMS = {
    "type": "object",
    "properties": {
        "order": {"type": "integer", "minimum": 1},
        "method": {"enum": ["series", "exact", "both", "dense", "iterative"]},
        "gap_min": _NUM,
        "window": {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2},
        "mode": {"type": "integer", "minimum": 0},
        "values": _GRID,
        "photons": {"type": "array", "items": {"type": "integer"}},
        "initial": {"type": "string", "pattern": "^[01]+$"},
        "final": {"type": "array", "items": {"type": "string", "pattern": "^[01]+$"}},
        "times": _GRID,
        "coherent": {"type": "boolean"},
        "time_average": {"type": "boolean"},
        "function": {"type": "string"},
        "arguments": {"type": "object"},
        "honeycomb": _HONEYCOMB,
    },
    "additionalProperties": False,
}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "properties": {
        "units": {"const": UNITS},
        "task": {"enum": list(TASKS)},
        "circuit": _CIRCUIT,
        "modes": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}},
        "frame": {"type": "array", "items": _NUM},
        "truncation": {"oneOf": [{"type": "integer", "minimum": 0}, {"type": "array", "items": {"type": "integer", "minimum": 0}}]},
        "params": _PARAMS,
    },
    "required": ["units", "task"],
    "additionalProperties": False,
}

CIRCUIT_TASKS = ("spectrum", "effective", "sweep", "probability")


class ConfigError(ValueError):
    """Malformed or invalid configuration; `errors` lists each violation with its path."""

    def __init__(self, errors: list[str]):
        super().__init__("; ".join(errors))
        self.errors = errors


@dataclass(frozen=True)
class RunConfig:
    """Validated run configuration.

    Attributes:
        task: task name.
        document: the validated JSON document.
        circuit: circuit for circuit tasks, else None.
        modes: drive-mode frequencies.
        frame: rotating-frame frequencies per qubit.
        truncation: Fourier truncation per mode.
        params: task parameters.
        digest: SHA-256 of the canonical document.
    """

    task: str
    document: dict
    circuit: CircuitSpec | None
    modes: tuple
    frame: tuple
    truncation: tuple
    params: dict
    digest: str

    def with_overrides(self, truncation: int | None = None, order: int | None = None) -> "RunConfig":
        """Config with command-line overrides applied (the digest follows the change)."""
        doc = json.loads(json.dumps(self.document))
        if truncation is not None:
            doc["truncation"] = int(truncation)
        if order is not None:
            doc.setdefault("params", {})["order"] = int(order)
        return config_from_dict(doc)


def _path(err: jsonschema.ValidationError) -> str:
    return "/" + "/".join(str(p) for p in err.absolute_path)


def config_hash(document: dict) -> str:
    """SHA-256 of the canonical JSON form."""
    return hashlib.sha256(json.dumps(document, sort_keys=True, separators=(",", ":")).encode()).hexdigest()


def _tones(items) -> tuple:
    return tuple(Tone(float(t["amplitude"]), float(t["frequency"]), float(t.get("phase", 0.0))) for t in items)


def circuit_from_dict(doc: dict) -> CircuitSpec:
    """CircuitSpec from its JSON form."""
    couplings = []
    for c in doc.get("couplings", []):
        pair = tuple(c["pair"])
        if c["type"] == "capacitive":
            couplings.append((pair, CapacitiveCoupling(float(c["g_c"]))))
        else:
            couplings.append(
                (
                    pair,
                    SquidCoupler(
                        float(c["g_x"]),
                        float(c.get("g_z", 0.0)),
                        float(c.get("g_1", 0.0)),
                        float(c.get("g_2", 0.0)),
                        float(c.get("phi_dc", np.pi)),
                        _tones(c.get("tones", [])),
                        bool(c.get("include_capacitive_yy", False)),
                        float(c.get("g_c", 0.0)),
                    ),
                )
            )
    drives = tuple(DriveSpec(int(d["qubit"]), d["axis"], _tones(d["tones"])) for d in doc.get("drives", []))
    return CircuitSpec(tuple(float(q) for q in doc["qubits"]), tuple(couplings), drives)


def circuit_to_dict(spec: CircuitSpec) -> dict:
    """JSON form of a CircuitSpec built from bare frequencies."""
    tone = lambda t: {"amplitude": t.amplitude, "frequency": t.frequency, "phase": t.phase}
    couplings = []
    for (i, j), c in spec.couplings:
        if isinstance(c, CapacitiveCoupling):
            couplings.append({"pair": [i, j], "type": "capacitive", "g_c": c.g_c})
        else:
            couplings.append(
                {
                    "pair": [i, j],
                    "type": "squid",
                    "g_x": c.g_x,
                    "g_z": c.g_z,
                    "g_1": c.g_1,
                    "g_2": c.g_2,
                    "phi_dc": c.phi_dc,
                    "tones": [tone(t) for t in c.tones],
                    "include_capacitive_yy": c.include_capacitive_yy,
                    "g_c": c.g_c,
                }
            )
    drives = [{"qubit": d.qubit, "axis": d.axis, "tones": [tone(t) for t in d.tones]} for d in spec.drives]
    return {"qubits": [float(q.omega) for q in spec.qubits], "couplings": couplings, "drives": drives}


def _semantic_errors(doc: dict) -> list[str]:
    errors = []
    task = doc["task"]
    if task not in CIRCUIT_TASKS:
        if task.startswith("honeycomb") and "honeycomb" not in doc.get("params", {}):
            errors.append("/params/honeycomb: required for honeycomb tasks")
        if task == "catalog" and "function" not in doc.get("params", {}):
            errors.append("/params/function: required for the catalog task")
        return errors
    if "circuit" not in doc:
        return [f"/circuit: required for task {task}"]
    circ = doc["circuit"]
    n = len(circ["qubits"])
    modes = doc.get("modes", [])
    for k, c in enumerate(circ.get("couplings", [])):
        if max(c["pair"]) >= n or c["pair"][0] == c["pair"][1]:
            errors.append(f"/circuit/couplings/{k}/pair: invalid qubit pair {c['pair']}")
    tones = [(f"/circuit/drives/{k}/tones/{m}", t) for k, d in enumerate(circ.get("drives", [])) for m, t in enumerate(d["tones"])]
    tones += [
        (f"/circuit/couplings/{k}/tones/{m}", t) for k, c in enumerate(circ.get("couplings", [])) for m, t in enumerate(c.get("tones", []))
    ]
    for k, d in enumerate(circ.get("drives", [])):
        if d["qubit"] >= n:
            errors.append(f"/circuit/drives/{k}/qubit: no qubit {d['qubit']}")
    for path, t in tones:
        if not modes:
            errors.append(f"{path}: tone at {t['frequency']} GHz but no modes declared")
            continue
        try:
            resolve_tone_key(t["frequency"], modes)
        except CommensurabilityError as exc:
            errors.append(f"{path}: tone at {t['frequency']} GHz does not match the declared modes ({exc})")
    if "frame" in doc and len(doc["frame"]) != n:
        errors.append(f"/frame: {len(doc['frame'])} entries for {n} qubits")
    trunc = doc.get("truncation")
    if isinstance(trunc, list) and len(trunc) != len(modes):
        errors.append(f"/truncation: {len(trunc)} entries for {len(modes)} modes")
    if task == "sweep":
        p = doc.get("params", {})
        if "values" not in p:
            errors.append("/params/values: required for sweep")
        if p.get("mode", 0) >= max(len(modes), 1):
            errors.append(f"/params/mode: no mode {p.get('mode', 0)}")
    if task == "probability":
        p = doc.get("params", {})
        if "initial" not in p:
            errors.append("/params/initial: required for probability")
        labelled = [("initial", p["initial"])] if "initial" in p else []
        labelled += [(f"final/{i}", bits) for i, bits in enumerate(p.get("final", []))]
        for key, bits in labelled:
            if len(bits) != n:
                errors.append(f"/params/{key}: bit string length {len(bits)} for {n} qubits")
    return errors


def config_from_dict(doc: dict) -> RunConfig:
    """Validate a configuration document.

    Raises:
        ConfigError listing every schema or semantic violation with its path.
    """
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errs = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errs:
        messages = []
        for e in errs:
            if e.validator == "required" and "'units'" in e.message:
                messages.append("/units: unit annotation missing (expected \"GHz_over_2pi\")")
            else:
                messages.append(f"{_path(e)}: {e.message}")
        raise ConfigError(messages)
    semantic = _semantic_errors(doc)
    if semantic:
        raise ConfigError(semantic)
    circuit = circuit_from_dict(doc["circuit"]) if "circuit" in doc else None
    modes = tuple(float(w) for w in doc.get("modes", []))
    n = len(circuit.qubits) if circuit is not None else 0
    frame = tuple(float(f) for f in doc.get("frame", [0.0] * n))
    trunc = doc.get("truncation", 8)
    truncation = tuple(int(t) for t in trunc) if isinstance(trunc, list) else (int(trunc),) * len(modes)
    return RunConfig(doc["task"], doc, circuit, modes, frame, truncation, dict(doc.get("params", {})), config_hash(doc))


def parse_config(path) -> RunConfig:
    """Read and validate a JSON configuration file."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except FileNotFoundError:
        raise ConfigError([f"{path}: file not found"]) from None
    except json.JSONDecodeError as exc:
        raise ConfigError([f"{path}: malformed JSON ({exc})"]) from None
    if not isinstance(doc, dict):
        raise ConfigError([f"{path}: top level must be an object"])
    return config_from_dict(doc)


def grid_values(spec) -> np.ndarray:
    """Grid from an explicit list or {start, stop, num}."""
    if isinstance(spec, dict):
        return np.linspace(spec["start"], spec["stop"], spec["num"])
    return np.asarray(spec, dtype=float)
