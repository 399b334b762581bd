"""JSON experiment-config files mirroring ExperimentConfig field names.

Unknown keys are rejected at every nesting level so a typo cannot silently
fall back to a default.
"""

from __future__ import annotations

import json
from pathlib import Path

from .baselines import GridSpec
from .errors import ConfigError
from .geometry import ArrayGeometry
from .harness import ExperimentConfig

_GEOMETRY_KEYS = {"m_y_count", "m_z_count", "spacing", "wavelength"}
_MUSIC_KEYS = {"u_count", "v_count", "r_count", "u_range", "v_range", "r_range", "r_spacing"}
_TOP_KEYS = {
    "geometry",
    "bs_position",
    "user_box_corner_a",
    "user_box_corner_b",
    "snr_grid_db",
    "pilot_length",
    "pilot_length_grid",
    "pilot_kind",
    "pilot_power",
    "trials",
    "rng_seed",
    "synthesis_model",
    "methods",
    "rotation_grid_gy",
    "rotation_grid_gz",
    "fresnel_floor_factor",
    "gain_model",
    "music_grid",
}


def _check_keys(mapping: dict, allowed: set[str], where: str) -> None:
    unknown = set(mapping) - allowed
    if unknown:
        raise ConfigError(f"unknown {where} keys: {sorted(unknown)}")


def _vec3(value, name: str) -> tuple[float, float, float]:
    if not isinstance(value, (list, tuple)) or len(value) != 3:
        raise ConfigError(f"{name} must be a 3-element position in meters")
    return tuple(float(x) for x in value)


def config_from_dict(data: dict) -> ExperimentConfig:
    if not isinstance(data, dict):
        raise ConfigError("config root must be a JSON object")
    _check_keys(data, _TOP_KEYS, "config")
    for required in ("geometry", "bs_position", "user_box_corner_a", "user_box_corner_b", "snr_grid_db"):
        if required not in data:
            raise ConfigError(f"config is missing required key {required!r}")

    geo = data["geometry"]
    if not isinstance(geo, dict):
        raise ConfigError("geometry must be an object")
    _check_keys(geo, _GEOMETRY_KEYS, "geometry")
    try:
        geometry = ArrayGeometry(
            m_y_count=int(geo["m_y_count"]),
            m_z_count=int(geo["m_z_count"]),
            spacing=float(geo["spacing"]),
            wavelength=float(geo["wavelength"]),
        )
    except KeyError as exc:
        raise ConfigError(f"geometry is missing key {exc}") from exc

    kwargs: dict = {
        "geometry": geometry,
        "bs_position": _vec3(data["bs_position"], "bs_position"),
        "user_box_corner_a": _vec3(data["user_box_corner_a"], "user_box_corner_a"),
        "user_box_corner_b": _vec3(data["user_box_corner_b"], "user_box_corner_b"),
        "snr_grid_db": tuple(float(x) for x in data["snr_grid_db"]),
    }
    if "pilot_length" in data:
        kwargs["pilot_length"] = int(data["pilot_length"])
    if data.get("pilot_length_grid") is not None:
        kwargs["pilot_length_grid"] = tuple(int(x) for x in data["pilot_length_grid"])
    for key, cast in (
        ("pilot_kind", str),
        ("pilot_power", float),
        ("trials", int),
        ("rng_seed", int),
        ("synthesis_model", str),
        ("rotation_grid_gy", int),
        ("rotation_grid_gz", int),
        ("fresnel_floor_factor", float),
        ("gain_model", str),
    ):
        if key in data:
            kwargs[key] = cast(data[key])
    if "methods" in data:
        kwargs["methods"] = tuple(str(m) for m in data["methods"])
    if "music_grid" in data:
        mg = data["music_grid"]
        if not isinstance(mg, dict):
            raise ConfigError("music_grid must be an object")
        _check_keys(mg, _MUSIC_KEYS, "music_grid")
        grid_kwargs = dict(mg)
        for rk in ("u_range", "v_range", "r_range"):
            if rk in grid_kwargs:
                grid_kwargs[rk] = tuple(float(x) for x in grid_kwargs[rk])
        try:
            kwargs["music_grid"] = GridSpec(**grid_kwargs)
        except ValueError as exc:
            raise ConfigError(f"bad music_grid: {exc}") from exc
    try:
        return ExperimentConfig(**kwargs)
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc


def load_config(path) -> ExperimentConfig:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    return config_from_dict(data)


def config_to_dict(config: ExperimentConfig) -> dict:
    geo = config.geometry
    out = {
        "geometry": {
            "m_y_count": geo.m_y_count,
            "m_z_count": geo.m_z_count,
            "spacing": geo.spacing,
            "wavelength": geo.wavelength,
        },
        "bs_position": list(config.bs_position),
        "user_box_corner_a": list(config.user_box_corner_a),
        "user_box_corner_b": list(config.user_box_corner_b),
        "snr_grid_db": list(config.snr_grid_db),
        "pilot_length": config.pilot_length,
        "pilot_kind": config.pilot_kind,
        "pilot_power": config.pilot_power,
        "trials": config.trials,
        "rng_seed": config.rng_seed,
        "synthesis_model": config.synthesis_model,
        "methods": list(config.methods),
        "rotation_grid_gy": config.rotation_grid_gy,
        "rotation_grid_gz": config.rotation_grid_gz,
        "fresnel_floor_factor": config.fresnel_floor_factor,
        "gain_model": config.gain_model,
        "music_grid": {
            "u_count": config.music_grid.u_count,
            "v_count": config.music_grid.v_count,
            "r_count": config.music_grid.r_count,
            "u_range": list(config.music_grid.u_range),
            "v_range": list(config.music_grid.v_range),
            "r_range": list(config.music_grid.r_range),
            "r_spacing": config.music_grid.r_spacing,
        },
    }
    if config.pilot_length_grid is not None:
        out["pilot_length_grid"] = list(config.pilot_length_grid)
    return out
