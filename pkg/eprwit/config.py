"""JSON run configuration: state, noise, measurement, witness, optimize and sweep sections."""
import json

from .epr_measure import EprMeasurementConfig
from .fock_core import load_state
from .noise_channels import NoiseSpec, apply_loss_thermal
from .runner import OptimizationSpec
from .state_catalog import state_from_params
from .utils import EprwitError, parse_spec_string
from .witness_bounds import TestFunction

SECTIONS = ("state", "noise", "measure", "witness", "optimize", "sweep", "teleport")


def load_config(path):
    if not path:
        return {}

    try:
        with open(path) as f:
            config = json.load(f)
    except OSError as e:
        raise EprwitError(
            error_type="InvalidConfig",
            message=f"Could not read config file {path}",
            source=e)
    except json.JSONDecodeError as e:
        raise EprwitError(
            error_type="InvalidConfig",
            message=f"Config file {path} is not valid JSON: {e.msg} (line {e.lineno})",
            source=e)

    return validate_config(config)


def validate_config(config):
    if not isinstance(config, dict):
        raise EprwitError(
            error_type="InvalidConfig",
            message="Config must be a JSON object")

    unknown = sorted(set(config) - set(SECTIONS))
    if unknown:
        raise EprwitError(
            error_type="InvalidConfig",
            message=f"Unknown config sections: {', '.join(unknown)}")

    for name in SECTIONS:
        if not isinstance(config.get(name, {}), dict):
            raise EprwitError(
                error_type="InvalidConfig",
                message=f"Config section '{name}' must be an object")

    return config


def merge_overrides(section, **overrides):
    """Copy of `section` with every non-None override applied."""
    merged = dict(section or {})
    merged.update({k: v for k, v in overrides.items() if v is not None})
    return merged


def state_from_config(section):
    """Build the state named by a `state` section or a `family:k=v` string."""
    if isinstance(section, str):
        family, params = parse_spec_string(section)
    else:
        params = dict(section or {})
        family = params.pop("family", None)
        if family is None:
            raise EprwitError(
                error_type="InvalidConfig",
                message="State section needs a 'family'")

    if family == "file":
        if "path" not in params:
            raise EprwitError(
                error_type="InvalidConfig",
                message="File states need a 'path'")
        try:
            return load_state(params["path"])
        except OSError as e:
            raise EprwitError(
                error_type="InvalidConfig",
                message=f"Could not read state file {params['path']}",
                source=e)

    return state_from_params(family, params)


def noise_from_config(section):
    section = section or {}
    if not section:
        return None
    return NoiseSpec.from_params(section)


def prepared_state(state, noise):
    """Apply channel-stage noise to the state; detection-stage noise stays with the measurement."""
    if noise is None or noise.stage != NoiseSpec.CHANNEL or noise.is_identity:
        return state
    return apply_loss_thermal(state, noise)


def measurement_from_config(section, noise=None):
    measure_noise = noise if noise is not None and noise.stage == NoiseSpec.DETECTION else None
    try:
        return EprMeasurementConfig.from_params(section or {}, noise=measure_noise)
    except (TypeError, ValueError) as e:
        raise EprwitError(
            error_type="InvalidConfig",
            message=f"Bad measure section: {section}",
            source=e)


def witness_from_config(section):
    section = section or {}
    D = section.get("D", [0.0])
    if not isinstance(D, (list, tuple)):
        D = [D]
    try:
        return TestFunction(float(section.get("C", 1.0)), [float(d) for d in D])
    except (TypeError, ValueError) as e:
        raise EprwitError(
            error_type="InvalidConfig",
            message=f"Bad witness section: {section}",
            source=e)


def optimization_from_config(section):
    try:
        return OptimizationSpec.from_params(section or {})
    except (TypeError, ValueError) as e:
        raise EprwitError(
            error_type="InvalidConfig",
            message=f"Bad optimize section: {section}",
            source=e)
