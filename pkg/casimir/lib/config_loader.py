"""
Configuration loading: shipped defaults from configs/defaults.yml and run
configs validated into RunConfig, with errors mapped back to file positions.
"""

import copy
import logging
import sys
from pathlib import Path
from typing import Any, Dict, Optional, Sequence

import yaml
from pydantic import ValidationError

from casimir.lib.constants import C, ev_to_rad_per_s
from casimir.lib.errors import ConfigError
from casimir.lib.params import default_b_for
from casimir.models.config import NernstBlock, OutputBlock, QuadratureConfig, RunConfig
from casimir.models.physics import DefectLattice, Material, PerfectLattice, ZeroRelaxation

# Set up logging
logger = logging.getLogger(__name__)

# Load defaults from defaults.yml - REQUIRED
_defaults_path = Path(__file__).resolve().parent.parent.parent / "configs" / "defaults.yml"

try:
    with open(_defaults_path, "r") as f:
        _defaults_data = yaml.safe_load(f)
except Exception as e:
    logger.critical(f"Could not load required defaults.yml: {e}")
    sys.exit(1)

for _section in ("material", "quadrature", "output", "nernst"):
    if not isinstance(_defaults_data, dict) or _section not in _defaults_data:
        logger.critical(f"defaults.yml missing '{_section}' section")
        sys.exit(1)

for _field in ("omega_p_ev", "v_tr_c", "v_l_c", "gamma0", "T0"):
    if _field not in _defaults_data["material"]:
        logger.critical(f"defaults.yml missing 'material.{_field}'")
        sys.exit(1)

try:
    DEFAULT_QUADRATURE = QuadratureConfig(**_defaults_data["quadrature"])
    DEFAULT_OUTPUT = OutputBlock(**_defaults_data["output"])
    DEFAULT_NERNST = NernstBlock(**_defaults_data["nernst"])
except ValidationError as e:
    logger.critical(f"defaults.yml has invalid values: {e}")
    sys.exit(1)

DEFAULT_MATERIAL = _defaults_data["material"]


def get_default_material(relaxation: Optional[str] = "perfect-lattice") -> Material:
    """
    Gold-like material from the shipped defaults.

    Args:
        relaxation: 'perfect-lattice', 'defect-lattice' or 'zero'

    Returns:
        Material with ω_p, both velocities and the requested relaxation law
    """
    gamma0 = float(DEFAULT_MATERIAL["gamma0"])
    if relaxation == "perfect-lattice":
        law = PerfectLattice(b=default_b_for(gamma0, float(DEFAULT_MATERIAL["T0"])))
    elif relaxation == "defect-lattice":
        law = DefectLattice(gamma0=gamma0)
    elif relaxation in ("zero", None):
        law = ZeroRelaxation()
    else:
        raise ValueError(f"Unknown relaxation: {relaxation}")
    return Material(
        omega_p=ev_to_rad_per_s(float(DEFAULT_MATERIAL["omega_p_ev"])),
        relaxation=law,
        v_tr=float(DEFAULT_MATERIAL["v_tr_c"]) * C,
        v_l=float(DEFAULT_MATERIAL["v_l_c"]) * C,
    )


def apply_overrides(data: Dict[str, Any], overrides: Sequence[str]) -> Dict[str, Any]:
    """
    Apply 'dotted.key=value' overrides; values are parsed as YAML scalars or flow
    collections.
    """
    data = copy.deepcopy(data)
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override '{item}' is not of the form key=value")
        key, raw = item.split("=", 1)
        parts = [p for p in key.strip().split(".") if p]
        if not parts:
            raise ConfigError(f"override '{item}' has an empty key")
        try:
            value = yaml.safe_load(raw)
        except yaml.YAMLError as e:
            raise ConfigError(f"override '{item}' has an unparsable value: {e}")
        target = data
        for part in parts[:-1]:
            child = target.get(part)
            if not isinstance(child, dict):
                child = {}
                target[part] = child
            target = child
        target[parts[-1]] = value
        logger.debug(f"Override {key} = {value!r}")
    return data


def _merge_defaults(data: Dict[str, Any]) -> Dict[str, Any]:
    """Fill the quadrature, output and nernst blocks from the validated defaults"""
    merged = dict(data)
    for section, default in (("quadrature", DEFAULT_QUADRATURE),
                             ("output", DEFAULT_OUTPUT),
                             ("nernst", DEFAULT_NERNST)):
        user = merged.get(section) or {}
        if isinstance(user, dict):
            merged[section] = {**default.model_dump(), **user}
    return merged


def _locate(node: Optional[yaml.Node], loc: Sequence[Any]) -> Optional[yaml.Mark]:
    """Start mark of the deepest YAML node reachable along a validation location"""
    if node is None:
        return None
    mark = node.start_mark
    for part in loc:
        child = None
        if isinstance(node, yaml.MappingNode):
            for key_node, value_node in node.value:
                if key_node.value == str(part):
                    child = value_node
                    break
        elif isinstance(node, yaml.SequenceNode) and isinstance(part, int) and part < len(node.value):
            child = node.value[part]
        if child is None:
            # union tags and missing keys: stay on the enclosing node
            continue
        node = child
        mark = node.start_mark
    return mark


def load_run_config(path, overrides: Sequence[str] = ()) -> RunConfig:
    """
    Read and validate a YAML run config.

    Args:
        path: config file
        overrides: 'dotted.key=value' strings applied before validation

    Returns:
        RunConfig

    Raises:
        ConfigError: unreadable file, YAML syntax error or invalid values, with
            the file position where available
    """
    path = str(path)
    try:
        with open(path, "r") as f:
            text = f.read()
    except (IOError, OSError) as e:
        raise ConfigError(f"cannot read config: {e}", path)

    try:
        data = yaml.safe_load(text)
        root = yaml.compose(text)
    except yaml.MarkedYAMLError as e:
        mark = e.problem_mark or e.context_mark
        line = mark.line + 1 if mark else None
        column = mark.column + 1 if mark else None
        raise ConfigError(f"YAML parsing error: {e.problem}", path, line, column)
    except yaml.YAMLError as e:
        raise ConfigError(f"YAML parsing error: {e}", path)

    if not isinstance(data, dict):
        raise ConfigError("config must be a mapping of sections", path, 1, 1)

    data = _merge_defaults(apply_overrides(data, overrides))
    try:
        config = RunConfig.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        loc = first.get("loc", ())
        mark = _locate(root, loc)
        where = ".".join(str(p) for p in loc) or "config"
        raise ConfigError(
            f"{where}: {first.get('msg', 'invalid value')}",
            path,
            mark.line + 1 if mark else None,
            mark.column + 1 if mark else None,
        )

    logger.info(f"Loaded run config {path} ({len(config.models())} model(s))")
    return config
