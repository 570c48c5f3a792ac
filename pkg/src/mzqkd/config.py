"""Run configuration: flat INI files in human units, merged with CLI flags.

A config file holds ``key = value`` entries grouped into the sections below.
Command-line flags override file values; file values override defaults.
Every value is converted to SI exactly once, in :func:`RunConfig.link_params`
and :func:`RunConfig.mz_config`.
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, fields
from typing import Optional

from .core import CONVENTIONS, LinkParams, MzConfig
from .design import DETECTOR_PROFILES, RATE_MODES
from .errors import ConfigError
from .units import dispersion_to_si, km_to_m, nm_to_m, ns_to_s

ENV_CONFIG_PATH = "MZQKD_CONFIG"

# section -> key -> (RunConfig attribute, parser)
_SCHEMA = {
    "link": {
        "length_km": ("length_km", float),
        "lambda0_nm": ("lambda0_nm", float),
        "delta_lambda_nm": ("delta_lambda_nm", float),
        "dispersion_ps_per_km_nm": ("dispersion_ps_per_km_nm", float),
        "group_index": ("group_index", float),
        "leg_length_m": ("leg_length_m", float),
        "t_fiber": ("t_fiber", float),
        "t_leg": ("t_leg", float),
        "convention": ("convention", str),
    },
    "interferometer": {
        "delta_d_m": ("delta_d_m", float),
        "delta_m_m": ("delta_m_m", float),
        "delta_c_m": ("delta_c_m", float),
        "t_rising_ns": ("t_rising_ns", float),
        "t_falling_ns": ("t_falling_ns", float),
        "detector_profile": ("detector_profile", str),
    },
    "design": {
        "rho": ("rho", float),
        "mode": ("mode", str),
        "safety_factor": ("safety_factor", float),
    },
    "output": {
        "format": ("out_format", str),
        "path": ("out_path", str),
        "normalize": ("normalize", str),
    },
}


@dataclass
class RunConfig:
    """All tunables of one command invocation, in human units."""

    length_km: float = 50.0
    lambda0_nm: float = 1550.0
    delta_lambda_nm: float = 0.31
    dispersion_ps_per_km_nm: float = 17.0
    group_index: float = 1.4682
    leg_length_m: float = 1.0
    t_fiber: float = 1.0
    t_leg: float = 1.0
    convention: str = "first_principles"

    delta_d_m: float = 0.25
    delta_m_m: float = 0.25
    delta_c_m: float = 0.0
    t_rising_ns: Optional[float] = None
    t_falling_ns: Optional[float] = None
    detector_profile: Optional[str] = None

    rho: float = 3.0
    mode: str = "linear"
    safety_factor: float = 1.0

    out_format: Optional[str] = None  # per-command default when unset
    out_path: Optional[str] = None
    normalize: str = "absolute"

    def resolved_edge_times(self) -> tuple[float, float]:
        """Detector edge times in seconds: explicit values beat the profile."""
        profile = (0.0, 0.0)
        if self.detector_profile is not None:
            try:
                profile = DETECTOR_PROFILES[self.detector_profile]
            except KeyError:
                raise ConfigError(
                    f"interferometer.detector_profile: unknown profile "
                    f"{self.detector_profile!r}; choose from {sorted(DETECTOR_PROFILES)}")
        rising = ns_to_s(self.t_rising_ns) if self.t_rising_ns is not None else profile[0]
        falling = ns_to_s(self.t_falling_ns) if self.t_falling_ns is not None else profile[1]
        return rising, falling

    def link_params(self) -> LinkParams:
        if self.convention not in CONVENTIONS:
            raise ConfigError(f"link.convention: must be one of {CONVENTIONS}, "
                              f"got {self.convention!r}")
        try:
            return LinkParams(
                lambda0=nm_to_m(self.lambda0_nm),
                delta_lambda=nm_to_m(self.delta_lambda_nm),
                dispersion=dispersion_to_si(self.dispersion_ps_per_km_nm),
                group_index=self.group_index,
                fiber_length=km_to_m(self.length_km),
                leg_length=self.leg_length_m,
                t_fiber=self.t_fiber,
                t_leg=self.t_leg,
                convention=self.convention,
            )
        except ValueError as exc:
            raise ConfigError(f"link: {exc}") from exc

    def mz_config(self) -> MzConfig:
        rising, falling = self.resolved_edge_times()
        try:
            return MzConfig(
                delta_d=self.delta_d_m,
                delta_m=self.delta_m_m,
                delta_c=self.delta_c_m,
                t_rising=rising,
                t_falling=falling,
            )
        except ValueError as exc:
            raise ConfigError(f"interferometer: {exc}") from exc

    def validate_design(self) -> None:
        if not self.rho > 0:
            raise ConfigError(f"design.rho: must be positive, got {self.rho!r}")
        if self.mode not in RATE_MODES:
            raise ConfigError(f"design.mode: must be one of {RATE_MODES}, "
                              f"got {self.mode!r}")
        if not self.safety_factor > 0:
            raise ConfigError("design.safety_factor: must be positive, "
                              f"got {self.safety_factor!r}")


def load_config_file(path: str) -> RunConfig:
    """Parse one INI file into a RunConfig, rejecting unknown keys."""
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise ConfigError(f"config file not found: {path}")
    config = RunConfig()
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"{section}: unknown config section "
                              f"(expected one of {sorted(_SCHEMA)})")
        for key, raw in parser.items(section):
            if key not in _SCHEMA[section]:
                raise ConfigError(f"{section}.{key}: unknown config key")
            attr, cast = _SCHEMA[section][key]
            try:
                setattr(config, attr, cast(raw))
            except ValueError:
                raise ConfigError(
                    f"{section}.{key}: could not parse {raw!r} as {cast.__name__}")
    return config


def default_config_path() -> Optional[str]:
    return os.environ.get(ENV_CONFIG_PATH) or None


def apply_overrides(config: RunConfig, overrides: dict) -> RunConfig:
    """Apply CLI-sourced attribute overrides (None means not given)."""
    valid = {f.name for f in fields(RunConfig)}
    for attr, value in overrides.items():
        if value is None:
            continue
        if attr not in valid:
            raise ConfigError(f"unknown override {attr!r}")
        setattr(config, attr, value)
    return config
