"""
INI run configuration.

    [MAIN]        n, lmax, seed, samples
    [GROUP]       preset, asserted_class, lam, theta, gen_<name> = "a, b; c, d"
    [TOLERANCES]  dedup_tol, rank_tol, conv_tol, gap_tol, sep, type_tol
    [OUTPUT]      format, path

Command-line overrides are applied on top of the file, then everything is validated
into a RunConfig.
"""

import configparser
import os
from typing import Any, Dict, Optional

from pydantic import ValidationError

from sources.errors import ConfigError
from sources.logger import Logger
from sources.schemas import RunConfig

logger = Logger("config.log")

MAIN_KEYS = ("n", "lmax", "seed", "samples")
TOLERANCE_KEYS = ("dedup_tol", "rank_tol", "conv_tol", "gap_tol", "sep", "type_tol")
GENERATOR_PREFIX = "gen_"


def read_ini(path: str) -> configparser.ConfigParser:
    config = configparser.ConfigParser()
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}", {"path": path})
    try:
        config.read(path)
    except configparser.Error as e:
        raise ConfigError(f"cannot parse {path}: {e}", {"path": path})
    return config


def ini_to_dict(config: configparser.ConfigParser) -> Dict[str, Any]:
    """Raw nested dict in RunConfig layout; values stay strings, pydantic converts them."""
    data: Dict[str, Any] = {}
    if config.has_section("MAIN"):
        for key in MAIN_KEYS:
            if config.has_option("MAIN", key):
                data[key] = config.get("MAIN", key)
    if config.has_section("GROUP"):
        section = config["GROUP"]
        group: Dict[str, Any] = {}
        for key in ("preset", "asserted_class", "lam", "theta"):
            if key in section and section[key].strip():
                group[key] = section[key].strip()
        generators = {key[len(GENERATOR_PREFIX):]: value.strip().strip('"')
                      for key, value in section.items() if key.startswith(GENERATOR_PREFIX)}
        if generators:
            group["generators"] = generators
        data["group"] = group
    if config.has_section("TOLERANCES"):
        data["tolerances"] = {key: config.get("TOLERANCES", key)
                              for key in TOLERANCE_KEYS if config.has_option("TOLERANCES", key)}
    if config.has_section("OUTPUT"):
        output = {}
        for key in ("format", "path"):
            value = config.get("OUTPUT", key, fallback="").strip()
            if value:
                output[key] = value
        data["output"] = output
    return data


def apply_overrides(data: Dict[str, Any], overrides: Dict[str, Any]) -> Dict[str, Any]:
    """Flags that were given on the command line (not None) replace file values."""
    data = dict(data)
    for key in MAIN_KEYS:
        if overrides.get(key) is not None:
            data[key] = overrides[key]
    output = dict(data.get("output", {}))
    if overrides.get("format") is not None:
        output["format"] = overrides["format"]
    if overrides.get("out") is not None:
        output["path"] = overrides["out"]
    data["output"] = output
    if overrides.get("preset") is not None:
        data["group"] = {**data.get("group", {}), "preset": overrides["preset"], "generators": {}}
    return data


def build_run_config(data: Dict[str, Any]) -> RunConfig:
    try:
        return RunConfig.model_validate(data)
    except ValidationError as e:
        problems = [f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}" for err in e.errors()]
        raise ConfigError("invalid run configuration", {"problems": problems})


def load_config(path: Optional[str] = None, overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
    """
    Load a RunConfig from an INI file (None means defaults only) with command-line overrides.
    """
    data = ini_to_dict(read_ini(path)) if path else {}
    run_config = build_run_config(apply_overrides(data, overrides or {}))
    logger.info(f"run configuration from {path or '<defaults>'}: {run_config}")
    return run_config
