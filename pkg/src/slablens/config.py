"""Run configuration: defaults, JSON-schema validation, overrides, hashing."""

import copy
import hashlib
import json

import jsonschema
import numpy as np

from .core import ConstantLossyDNG, Custom, DispersiveDNG, SlabGeometry, Vacuum, wavelength
from .errors import ConfigError

DEFAULTS = {
    "f0_hz": 1.0e10,
    "L_over_lambda0": 1.0,
    "d_over_lambda0": 0.5,
    "E0": 1.0,
    "seed": 12345,
    "threads": 1,
    "z_offset_over_lambda0": 0.001,
    "window": {"type": "sine", "Te_s": 1.0e-3},
    "material": {"type": "dispersive_dng", "slope": 4.0, "loss_coeff": 1000.0},
    "omega_grid": {
        "n_points": 100000,
        "exponent": 4.0,
        "band_split_h_over_k00": 2.5,
        "core_halfwidths_rel": [1.0e-3, 1.0e-9],
        "outer_halfwidth_rel": 1.0e-3,
        "max_h_over_k00": 3.5,
        "cluster_poles": True,
    },
    "fig2": {
        "delta_pp": [5.6e-7, 1.0e-10, 4.3e-14],
        "h_over_k00": {"start": 0.01, "stop": 7.0, "num": 700},
    },
    "fig3": {
        "times_s": [1.0e-6, 1.0e-5, 1.0e-4],
        "h_over_k00": {"start": 0.0, "stop": 3.49, "num": 350},
    },
    "fig4": {
        "times_s": [9.0e-6, 9.0e-5, 9.0e-4],
        "sources_x_over_lambda0": [-0.125, 0.125],
        "x_over_lambda0": {"start": -1.0, "stop": 1.0, "num": 201},
        "h_max_over_k00": 3.49,
        "n_prop_panels": 2,
        "n_ev_panels": 8,
    },
    "resolution_table": {
        "delta_pp": [4.3e-14, 1.0e-10, 5.6e-7],
        "times_s": [9.0e-6, 1.0e-5, 9.0e-5, 1.0e-4, 9.0e-4],
        "R_e": [1.0, 2.5, 5.0],
    },
    "field_map": {
        "material": {"type": "constant_lossy_dng", "delta_pp": 0.0},
        "x_over_lambda0": {"start": -1.0, "stop": 1.0, "num": 41},
        "z_over_lambda0": {"start": 0.1, "stop": 3.0, "num": 30},
        "h_max_over_k00": 3.0,
        "rel_tol": 1.0e-8,
        "limit": "lossless",
        "divergence_delta_pp": [],
    },
}

_RANGE = {
    "type": "object",
    "properties": {
        "start": {"type": "number"},
        "stop": {"type": "number"},
        "num": {"type": "integer", "minimum": 2},
    },
    "required": ["start", "stop", "num"],
    "additionalProperties": False,
}

_POS = {"type": "number", "exclusiveMinimum": 0}
_POS_LIST = {"type": "array", "items": _POS, "minItems": 1}
_COMPLEX_LIST = {"type": "array", "items": {"type": "array", "items": {"type": "number"},
                                            "minItems": 2, "maxItems": 2}}

_MATERIAL = {
    "oneOf": [
        {"type": "object", "properties": {"type": {"const": "vacuum"}},
         "required": ["type"], "additionalProperties": False},
        {"type": "object", "properties": {"type": {"const": "constant_lossy_dng"},
                                          "delta_pp": {"type": "number", "minimum": 0}},
         "required": ["type", "delta_pp"], "additionalProperties": False},
        {"type": "object", "properties": {"type": {"const": "dispersive_dng"},
                                          "slope": {"type": "number", "minimum": 4},
                                          "loss_coeff": {"type": "number", "minimum": 0}},
         "required": ["type"], "additionalProperties": False},
        {"type": "object", "properties": {"type": {"const": "custom"},
                                          "omega_rad_s": _POS_LIST,
                                          "eps_r": _COMPLEX_LIST, "mu_r": _COMPLEX_LIST},
         "required": ["type", "omega_rad_s", "eps_r", "mu_r"], "additionalProperties": False},
    ]
}

SCHEMA = {
    "type": "object",
    "properties": {
        "f0_hz": _POS,
        "L_over_lambda0": _POS,
        "d_over_lambda0": _POS,
        "E0": {"type": "number"},
        "seed": {"type": "integer"},
        "threads": {"type": "integer", "minimum": 1},
        "z_offset_over_lambda0": _POS,
        "window": {
            "type": "object",
            "properties": {"type": {"const": "sine"}, "Te_s": _POS,
                           "Te_periods": {"type": "integer", "minimum": 1}},
            "required": ["type"],
            "additionalProperties": False,
        },
        "material": _MATERIAL,
        "omega_grid": {
            "type": "object",
            "properties": {
                "n_points": {"type": "integer", "minimum": 16},
                "exponent": {"type": "number", "minimum": 1},
                "band_split_h_over_k00": _POS,
                "core_halfwidths_rel": {"type": "array", "items": _POS, "minItems": 2, "maxItems": 2},
                "outer_halfwidth_rel": _POS,
                "max_h_over_k00": _POS,
                "cluster_poles": {"type": "boolean"},
            },
            "additionalProperties": False,
        },
        "fig2": {
            "type": "object",
            "properties": {"delta_pp": _POS_LIST, "h_over_k00": _RANGE},
            "additionalProperties": False,
        },
        "fig3": {
            "type": "object",
            "properties": {"times_s": _POS_LIST, "h_over_k00": _RANGE},
            "additionalProperties": False,
        },
        "fig4": {
            "type": "object",
            "properties": {
                "times_s": _POS_LIST,
                "sources_x_over_lambda0": {"type": "array", "items": {"type": "number"}, "minItems": 1},
                "x_over_lambda0": _RANGE,
                "h_max_over_k00": _POS,
                "n_prop_panels": {"type": "integer", "minimum": 1},
                "n_ev_panels": {"type": "integer", "minimum": 1},
            },
            "additionalProperties": False,
        },
        "resolution_table": {
            "type": "object",
            "properties": {"delta_pp": _POS_LIST, "times_s": _POS_LIST,
                           "R_e": {"type": "array", "items": {"type": "number", "minimum": 1}}},
            "additionalProperties": False,
        },
        "field_map": {
            "type": "object",
            "properties": {
                "material": _MATERIAL,
                "x_over_lambda0": _RANGE,
                "z_over_lambda0": _RANGE,
                "h_max_over_k00": {"type": "number", "exclusiveMinimum": 1},
                "rel_tol": {"type": "number", "exclusiveMinimum": 0, "maximum": 0.01},
                "limit": {"enum": ["lossless", "lossy"]},
                "divergence_delta_pp": {"type": "array", "items": {"type": "number",
                                                                   "exclusiveMinimum": 0,
                                                                   "exclusiveMaximum": 1}},
            },
            "additionalProperties": False,
        },
    },
    "additionalProperties": False,
}


def _merge(base, over):
    out = copy.deepcopy(base)
    for key, val in over.items():
        if isinstance(val, dict) and isinstance(out.get(key), dict) and key != "material":
            out[key] = _merge(out[key], val)
        else:
            out[key] = copy.deepcopy(val)
    return out


def _parse_value(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def apply_override(cfg, item):
    """Apply ``dotted.key=value``; the value is parsed as JSON when possible."""
    if "=" not in item:
        raise ConfigError(f"override {item!r} is not of the form key=value")
    key, text = item.split("=", 1)
    parts = [p for p in key.strip().split(".") if p]
    if not parts:
        raise ConfigError(f"override {item!r} has an empty key")
    node = cfg
    for p in parts[:-1]:
        if not isinstance(node.get(p), dict):
            node[p] = {}
        node = node[p]
    node[parts[-1]] = _parse_value(text.strip())
    return cfg


def load_config(path=None, overrides=()):
    """Defaults, then the JSON file at ``path``, then overrides; validated."""
    user = {}
    if path is not None:
        try:
            with open(path) as fh:
                user = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
        if not isinstance(user, dict):
            raise ConfigError("config root must be a JSON object")
    cfg = _merge(DEFAULTS, user)
    for item in overrides:
        apply_override(cfg, item)
    validate(cfg)
    return cfg


def validate(cfg):
    try:
        jsonschema.validate(cfg, SCHEMA)
    except jsonschema.ValidationError as exc:
        where = ".".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"config error at {where}: {exc.message}") from exc
    w = cfg["window"]
    if ("Te_s" in w) == ("Te_periods" in w):
        raise ConfigError("window needs exactly one of Te_s or Te_periods")
    for name in ("fig2", "fig3"):
        r = cfg[name]["h_over_k00"]
        if not 0 <= r["start"] < r["stop"]:
            raise ConfigError(f"{name}.h_over_k00 needs 0 <= start < stop")
    if cfg["fig2"]["h_over_k00"]["start"] <= 0:
        raise ConfigError("fig2.h_over_k00.start must be > 0")
    if any(d >= 1 for d in cfg["fig2"]["delta_pp"]):
        raise ConfigError("fig2.delta_pp entries must be < 1")
    og = cfg["omega_grid"]
    if cfg["fig3"]["h_over_k00"]["stop"] >= og["max_h_over_k00"]:
        raise ConfigError("fig3.h_over_k00.stop must be below omega_grid.max_h_over_k00")
    if cfg["fig4"]["h_max_over_k00"] >= og["max_h_over_k00"] or cfg["fig4"]["h_max_over_k00"] <= 1:
        raise ConfigError("fig4.h_max_over_k00 must lie in (1, omega_grid.max_h_over_k00)")
    if any(t * cfg["f0_hz"] <= np.e for t in cfg["resolution_table"]["times_s"]):
        raise ConfigError("resolution_table.times_s entries need f0*t > e")
    if any(d >= 1 for d in cfg["resolution_table"]["delta_pp"]):
        raise ConfigError("resolution_table.delta_pp entries must be < 1")
    m = cfg["material"]
    if m["type"] == "custom":
        material_from_config(m, 2 * np.pi * cfg["f0_hz"])
    return cfg


def config_hash(cfg):
    """Short SHA-256 of the canonical JSON, ignoring the thread count."""
    body = {k: v for k, v in cfg.items() if k != "threads"}
    text = json.dumps(body, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def linspace(r):
    return np.linspace(r["start"], r["stop"], r["num"])


def material_from_config(m, omega0):
    kind = m["type"]
    try:
        if kind == "vacuum":
            return Vacuum()
        if kind == "constant_lossy_dng":
            return ConstantLossyDNG(float(m["delta_pp"]))
        if kind == "dispersive_dng":
            return DispersiveDNG(omega0, float(m.get("slope", 4.0)), float(m.get("loss_coeff", 1000.0)))
        if kind == "custom":
            eps = np.array([complex(*v) for v in m["eps_r"]])
            mu = np.array([complex(*v) for v in m["mu_r"]])
            return Custom(np.array(m["omega_rad_s"], dtype=float), eps, mu)
    except ValueError as exc:
        raise ConfigError(f"bad material: {exc}") from exc
    raise ConfigError(f"unknown material type {kind!r}")


def geometry(cfg):
    return SlabGeometry.in_wavelengths(cfg["d_over_lambda0"], cfg["L_over_lambda0"], cfg["f0_hz"])


def window_Te(cfg):
    w = cfg["window"]
    if "Te_periods" in w:
        return w["Te_periods"] / cfg["f0_hz"]
    return float(w["Te_s"])


def lambda0(cfg):
    return wavelength(cfg["f0_hz"])
