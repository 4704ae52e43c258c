# This file is part of the pilotsic project
# https://github.com/pilotsic/pilotsic
#
# Copyright (c) 2023-2026 pilotsic contributors - MIT License
# SPDX-License-Identifier: MIT
"""Scenario parameters, defaults and config loading."""

import os
import json
import enum
import logging
import pathlib as pl
from typing import Any
from typing import Dict
from typing import Union
from typing import Iterable
from typing import NamedTuple

from . import common_types as ct

logger = logging.getLogger(__name__)


class ChannelBackend(enum.Enum):

    CLARKE       = "clarke"
    IID_RAYLEIGH = "iid_rayleigh"
    ORTHO_IDEAL  = "ortho_ideal"


class CancellationMode(enum.Enum):

    SOFT = "soft"
    HARD = "hard"


class ConfigError(ValueError):
    pass


# Simulation defaults (carrier, mobility, scatterers, noise, pilots, slot, message length)
DEFAULT_CARRIER_HZ   = 1.8e9
DEFAULT_SPEED_MPS    = 3 / 3.6
DEFAULT_N_SCATTERERS = 20
DEFAULT_SIGMA_N2     = 0.1
DEFAULT_TAU          = 5
DEFAULT_SLOT_S       = 0.01
DEFAULT_L            = 1000

DEFAULT_K          = 100
DEFAULT_AVG_DEGREE = 2.5
DEFAULT_SEED       = 0

# resource block surplus relative to K
BETA_SURPLUS_NUM = 6
BETA_SURPLUS_DEN = 5

MAX_SEED = 2 ** 64 - 1

DEFAULT_M       = int(os.getenv("PILOTSIC_ANTENNAS") or 100)
DEFAULT_WORKERS = int(os.getenv("PILOTSIC_WORKERS") or 1)
DEFAULT_TRIALS  = int(os.getenv("PILOTSIC_TRIALS") or 100)


class SystemConfig(NamedTuple):

    K   : int
    M   : int
    tau : int
    beta: int
    p_a : float

    sigma_n2: float
    L       : int

    carrier_hz  : ct.Hertz
    speed_mps   : float
    n_scatterers: int
    slot_s      : ct.Seconds

    channel_backend  : ChannelBackend
    cancellation_mode: CancellationMode

    seed: ct.Seed


FIELD_NAMES = SystemConfig._fields

_INT_FIELDS   = {"K", "M", "tau", "beta", "L", "n_scatterers", "seed"}
_FLOAT_FIELDS = {"p_a", "sigma_n2", "carrier_hz", "speed_mps", "slot_s"}
_ENUM_FIELDS  = {'channel_backend': ChannelBackend, 'cancellation_mode': CancellationMode}


def default_beta(K: int, tau: int) -> int:
    """Number of slots for a 20% surplus of resource blocks.

    >>> default_beta(K=100, tau=5)
    24
    >>> default_beta(K=50, tau=5)
    12
    """
    if K < 1 or tau < 1:
        raise ValueError(f"Invalid K={K} or tau={tau}, both must be >= 1")
    # integer ceil(1.2 * K / tau)
    return -(-BETA_SURPLUS_NUM * K // (BETA_SURPLUS_DEN * tau))


def default_p_a(K: int, tau: int) -> float:
    """Activation probability for the default average block degree.

    >>> default_p_a(K=100, tau=5)
    0.125
    >>> default_p_a(K=400, tau=5)
    0.03125
    >>> default_p_a(K=10, tau=5)
    1.0
    """
    if K < 1:
        raise ValueError(f"Invalid K={K}, must be >= 1")
    return min(DEFAULT_AVG_DEGREE * tau / K, 1.0)


def validate_config(config: SystemConfig) -> SystemConfig:
    checks = {
        'K'           : config.K >= 1,
        'M'           : config.M >= 1,
        'tau'         : config.tau >= 1,
        'beta'        : config.beta >= 1,
        'p_a'         : 0.0 <= config.p_a <= 1.0,
        'sigma_n2'    : config.sigma_n2 >= 0.0,
        'L'           : config.L >= 1,
        'carrier_hz'  : config.carrier_hz > 0.0,
        'speed_mps'   : config.speed_mps >= 0.0,
        'n_scatterers': config.n_scatterers >= 1,
        'slot_s'      : config.slot_s > 0.0,
        'seed'        : 0 <= config.seed <= MAX_SEED,
    }
    bad_fields = [name for name, is_ok in checks.items() if not is_ok]
    if bad_fields:
        bad_values = ", ".join(f"{name}={getattr(config, name)!r}" for name in bad_fields)
        raise ConfigError(f"Invalid config field(s): {bad_values}")

    if not isinstance(config.channel_backend, ChannelBackend):
        raise ConfigError(f"Invalid config field channel_backend={config.channel_backend!r}")
    if not isinstance(config.cancellation_mode, CancellationMode):
        raise ConfigError(f"Invalid config field cancellation_mode={config.cancellation_mode!r}")

    return config


def init_config(
    K                : int   = DEFAULT_K,
    M                : int   = DEFAULT_M,
    tau              : int   = DEFAULT_TAU,
    beta             : int   = -1,
    p_a              : float = -1.0,
    sigma_n2         : float = DEFAULT_SIGMA_N2,
    L                : int   = DEFAULT_L,
    carrier_hz       : float = DEFAULT_CARRIER_HZ,
    speed_mps        : float = DEFAULT_SPEED_MPS,
    n_scatterers     : int   = DEFAULT_N_SCATTERERS,
    slot_s           : float = DEFAULT_SLOT_S,
    channel_backend  : ChannelBackend   = ChannelBackend.CLARKE,
    cancellation_mode: CancellationMode = CancellationMode.SOFT,
    seed             : ct.Seed = DEFAULT_SEED,
) -> SystemConfig:
    """Create a validated SystemConfig.

    A negative beta is derived from K and tau, a negative p_a is
    derived from the default average degree of a resource block.
    """
    if beta < 0 and K >= 1 and tau >= 1:
        beta = default_beta(K, tau)
    if p_a < 0 and K >= 1:
        p_a = default_p_a(K, tau)

    config = SystemConfig(
        K=int(K),
        M=int(M),
        tau=int(tau),
        beta=int(beta),
        p_a=float(p_a),
        sigma_n2=float(sigma_n2),
        L=int(L),
        carrier_hz=float(carrier_hz),
        speed_mps=float(speed_mps),
        n_scatterers=int(n_scatterers),
        slot_s=float(slot_s),
        channel_backend=channel_backend,
        cancellation_mode=cancellation_mode,
        seed=int(seed),
    )
    return validate_config(config)


def _parse_field(name: str, raw_val: Any) -> Any:
    if name not in FIELD_NAMES:
        raise ConfigError(f"Unknown config field: {name!r}")

    try:
        if name in _ENUM_FIELDS:
            enum_type = _ENUM_FIELDS[name]
            if isinstance(raw_val, enum_type):
                return raw_val
            return enum_type(str(raw_val).strip().lower())
        elif name in _INT_FIELDS:
            if isinstance(raw_val, float) and not raw_val.is_integer():
                raise ValueError(raw_val)
            return int(raw_val)
        else:
            assert name in _FLOAT_FIELDS
            return float(raw_val)
    except (TypeError, ValueError) as err:
        raise ConfigError(f"Invalid value for config field {name!r}: {raw_val!r}") from err


def config_from_dict(data: Dict[str, Any]) -> SystemConfig:
    """Parse a config document, unknown keys are rejected."""
    unknown = sorted(set(data) - set(FIELD_NAMES))
    if unknown:
        raise ConfigError(f"Unknown config field(s): {', '.join(unknown)}")

    kwargs = {name: _parse_field(name, raw_val) for name, raw_val in data.items()}
    return init_config(**kwargs)


def config_to_dict(config: SystemConfig) -> Dict[str, Any]:
    data: Dict[str, Any] = config._asdict()
    data['channel_backend'  ] = config.channel_backend.value
    data['cancellation_mode'] = config.cancellation_mode.value
    return data


def load_config(path: Union[str, pl.Path]) -> SystemConfig:
    path = pl.Path(path)
    try:
        with path.open(mode="r", encoding="utf-8") as fobj:
            data = json.load(fobj)
    except json.JSONDecodeError as err:
        raise ConfigError(f"Invalid JSON in config file {path}: {err}") from err

    if not isinstance(data, dict):
        raise ConfigError(f"Config file {path} must contain a JSON object")

    logger.debug(f"loaded config from {path}")
    return config_from_dict(data)


def parse_overrides(overrides: Iterable[str]) -> Dict[str, Any]:
    """Parse 'key=value' strings into typed config fields.

    >>> parse_overrides(["K=50", "channel_backend=iid_rayleigh"])['K']
    50
    """
    parsed: Dict[str, Any] = {}
    for override in overrides:
        if "=" not in override:
            raise ConfigError(f"Invalid override {override!r}, expected key=value")
        key, raw_val = override.split("=", 1)
        key = key.strip()
        parsed[key] = _parse_field(key, raw_val.strip())
    return parsed


def apply_overrides(config: SystemConfig, overrides: Iterable[str]) -> SystemConfig:
    """Replace fields of config.

    If K or tau change, beta and p_a are derived again unless they are
    given explicitly, so the average block degree stays at its default.
    """
    parsed = parse_overrides(overrides)
    if "K" in parsed or "tau" in parsed:
        K   = parsed.get("K", config.K)
        tau = parsed.get("tau", config.tau)
        if "beta" not in parsed and K >= 1 and tau >= 1:
            parsed["beta"] = default_beta(K, tau)
        if "p_a" not in parsed and K >= 1:
            parsed["p_a"] = default_p_a(K, tau)
    return validate_config(config._replace(**parsed))
