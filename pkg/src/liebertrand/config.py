"""Run configuration: JSON files validated against the shipped schema."""

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

import jsonschema

from .errors import ConfigError, ValidationError
from .frenet import CurveSpec
from .lie import LieStructure
from .verify import DEFAULT_PROFILE


def load_schema(name):
    """Load ``schemas/<name>.schema.json`` shipped with the package."""
    text = (resources.files("liebertrand") / "schemas"
            / f"{name}.schema.json").read_text(encoding="utf-8")
    return json.loads(text)


@dataclass
class RunConfig:
    spec: CurveSpec
    epsilon: int = 1
    tolerance: dict = field(default_factory=lambda: dict(DEFAULT_PROFILE))
    output_path: Optional[str] = None
    output_format: Optional[str] = None

    @property
    def structure(self):
        return self.spec.structure


def _structure(data):
    if data is None:
        return LieStructure()
    if "preset" in data:
        return LieStructure.preset(data["preset"])
    return LieStructure(float(data["tau_G"]))


def config_from_dict(data):
    """Validate ``data`` against the RunConfig schema and build a ``RunConfig``."""
    try:
        jsonschema.validate(data, load_schema("run_config"))
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"{where}: {exc.message}") from None
    curve = data["curve"]
    try:
        spec = CurveSpec(curve["kappa"], curve["tau"], curve["domain"],
                         curve.get("n", 2001), _structure(data.get("structure")),
                         curve.get("initial_frame"))
    except ValidationError as exc:
        if isinstance(exc, ConfigError) or exc.code != "validation_error":
            raise
        raise ConfigError(str(exc)) from None
    tolerance = dict(DEFAULT_PROFILE)
    tolerance.update(data.get("tolerance", {}))
    output = data.get("output", {})
    return RunConfig(spec, int(data.get("epsilon", 1)), tolerance,
                     output.get("path"), output.get("format"))


def load_config(path):
    """Read and validate a UTF-8 JSON run configuration."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}", "config_not_found")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ConfigError(f"{path}: not valid JSON ({exc})", "invalid_json") from None
    return config_from_dict(data)
