"""Design bounds for the link: shifter sums, detection rates, gate window.

Three facts drive every bound here.  The three pulses of one symbol must not
overlap, which puts a lower bound on the shifter sum.  Two consecutive symbols
must not overlap, which caps the detection rate.  And whatever margin remains
between the shifter sum and the pulse width is the time the detector gate may
stay open.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable, Optional

from scipy.special import erf

from .core import LinkParams, MzConfig, derive, x_rho
from .errors import InfeasibleDesignError

RATE_MODES = ("linear", "nonlinear", "general")

# Denominator of c0/(q * X_rho) per mode: "linear" ignores photon-photon
# non-linearity (consecutive symbols may interleave exterior pulses),
# "nonlinear" keeps consecutive symbols fully disjoint, "general" is the
# single-pulse variant for setups without exterior pulses.
_MODE_FACTOR = {"linear": 4.0, "nonlinear": 6.0, "general": 2.0}

# Named detector edge-time presets (seconds).  The SNSPD profile splits a
# 5 ns response time evenly between the rising and falling edge.
DETECTOR_PROFILES = {
    "ideal": (0.0, 0.0),
    "snspd-5ns": (2.5e-9, 2.5e-9),
}


@dataclass(frozen=True)
class DesignReport:
    """Computed design bounds for one (link, rho) choice."""

    rho: float
    visibility: float
    min_phase_sum: float          # m
    max_rate_linear: float        # Hz
    max_rate_nonlinear: float     # Hz
    max_rate_general: float       # Hz
    gate_window: Optional[float]  # s, None when no actual phase sum was supplied
    safety_factor: float
    actual_phase_sum: Optional[float] = None  # m


def pulse_half_width(params: LinkParams, rho: float) -> float:
    """X_rho of the broadened pulse at the far end of the link, m."""
    return x_rho(derive(params, MzConfig()), rho)


def visibility_of_rho(rho: float) -> float:
    """Probability mass of a pulse inside +-X_rho, i.e. erf(rho).

    Equals the coverage of a standard normal within +-rho*sqrt(2) standard
    deviations: 0.8427 at rho=1, 0.99532 at rho=2, 0.99998 at rho=3.
    """
    if not rho > 0:
        raise ValueError(f"rho must be positive, got {rho!r}")
    return float(erf(rho))


def min_phase_sum(params: LinkParams, rho: float,
                  t_rising: float = 0.0, t_falling: float = 0.0,
                  safety_factor: float = 1.0) -> float:
    """Smallest delta_d + delta_m separating the three pulses at visibility erf(rho), m.

    An ideal gate needs 4*X_rho; detector edge times extend the bound by
    c0*(t_rising + t_falling).  The safety factor multiplies the whole bound.
    """
    if t_rising < 0 or t_falling < 0:
        raise ValueError("detector edge times must be non-negative")
    if safety_factor <= 0:
        raise ValueError("safety_factor must be positive")
    bound = 4.0 * pulse_half_width(params, rho) + params.c0 * (t_rising + t_falling)
    return safety_factor * bound


def max_rate(params: LinkParams, rho: float, mode: str = "linear") -> float:
    """Largest symbol rate without intersymbol overlap, Hz."""
    if mode not in _MODE_FACTOR:
        raise ValueError(f"mode must be one of {RATE_MODES}, got {mode!r}")
    return params.c0 / (_MODE_FACTOR[mode] * pulse_half_width(params, rho))


def gate_window(actual_phase_sum: float, params: LinkParams, rho: float) -> float:
    """Longest detector gate centered on the middle pulse, s.

    Requires actual_phase_sum >= 2*X_rho; anything smaller cannot isolate the
    middle pulse and raises InfeasibleDesignError.
    """
    half = pulse_half_width(params, rho)
    margin = actual_phase_sum - 2.0 * half
    if margin < 0:
        raise InfeasibleDesignError(
            f"phase sum {actual_phase_sum:.6g} m is below 2*X_rho = "
            f"{2.0 * half:.6g} m; the gate window would be negative")
    return margin / params.c0


def build_design_report(params: LinkParams, config: MzConfig, rho: float,
                        actual_phase_sum: float | None = None,
                        safety_factor: float = 1.0) -> DesignReport:
    """Assemble every design bound for one link instance."""
    window = None
    if actual_phase_sum is not None:
        window = gate_window(actual_phase_sum, params, rho)
    return DesignReport(
        rho=rho,
        visibility=visibility_of_rho(rho),
        min_phase_sum=min_phase_sum(params, rho, config.t_rising, config.t_falling,
                                    safety_factor),
        max_rate_linear=max_rate(params, rho, "linear"),
        max_rate_nonlinear=max_rate(params, rho, "nonlinear"),
        max_rate_general=max_rate(params, rho, "general"),
        gate_window=window,
        safety_factor=safety_factor,
        actual_phase_sum=actual_phase_sum,
    )


def sweep_lengths(params: LinkParams, config: MzConfig, rho: float,
                  lengths_m: Iterable[float]) -> list[dict[str, float]]:
    """Evaluate the design bounds over a range of fiber lengths.

    Returns one row per length with keys length_m, min_phase_sum_m,
    rate_linear_hz, rate_nonlinear_hz, rate_general_hz.
    """
    rows = []
    for length in lengths_m:
        p = replace(params, fiber_length=float(length))
        rows.append({
            "length_m": float(length),
            "min_phase_sum_m": min_phase_sum(p, rho, config.t_rising, config.t_falling),
            "rate_linear_hz": max_rate(p, rho, "linear"),
            "rate_nonlinear_hz": max_rate(p, rho, "nonlinear"),
            "rate_general_hz": max_rate(p, rho, "general"),
        })
    if not rows:
        raise ValueError("length sweep must contain at least one value")
    return rows
