"""Phase-basis encoding on top of the two-interferometer link.

Alice encodes each bit as one of four wavelength-scale offsets added to her
long-arm shifter; Bob decodes with one of two reader offsets.  Only the
offset difference reaches the middle pulse, whose interference phase is
(2*pi/lambda0)*(phi_m - phi_d) times a bracket 1 + G*(dx - delta_c) carrying
the residual dispersion correction.  This module provides the offset tables,
both forms of the phase difference, the G-term study and the end-to-end
detection truth table.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .core import DerivedQuantities, LinkParams, MzConfig, derive, x_rho
from .design import min_phase_sum
from .errors import InfeasibleDesignError
from .spectra import GridSpec, eval_analytic, middle_window_masses, z_phase_difference

BASES = ("X", "Z")
ROLES = ("alice", "bob")

# Offsets as fractions of lambda0.  First table entry per basis is bit 0.
_ALICE_OFFSETS = {("X", 0): 0.0, ("X", 1): 0.5, ("Z", 0): 0.25, ("Z", 1): 0.75}
_BOB_OFFSETS = {"X": 0.0, "Z": 0.25}

# Probability integration half-width of 3*sigma, expressed through X_rho.
MIDDLE_WINDOW_RHO = 3.0 / math.sqrt(2.0)


@dataclass(frozen=True)
class PhaseChoice:
    """One party's shifter setting: basis, optional bit, offset and baseline."""

    role: str
    basis: str
    bit: Optional[int]
    phase_offset: float   # m, in {0, lambda0/4, lambda0/2, 3*lambda0/4}
    baseline: float       # m, common additive shifter length

    @property
    def total_shift(self) -> float:
        """Full shifter value baseline + offset, m."""
        return self.baseline + self.phase_offset


def phase_for(params: LinkParams, role: str, basis: str,
              bit: int | None = None, baseline: float = 0.0) -> PhaseChoice:
    """Table lookup of the encoding/reading offset for one party."""
    if role not in ROLES:
        raise ValueError(f"role must be one of {ROLES}, got {role!r}")
    if basis not in BASES:
        raise ValueError(f"basis must be one of {BASES}, got {basis!r}")
    if role == "alice":
        if bit not in (0, 1):
            raise ValueError("alice requires bit 0 or 1")
        fraction = _ALICE_OFFSETS[(basis, bit)]
    else:
        if bit is not None:
            raise ValueError("bob does not take a bit")
        fraction = _BOB_OFFSETS[basis]
    return PhaseChoice(role=role, basis=basis, bit=bit,
                       phase_offset=fraction * params.lambda0, baseline=baseline)


def g_term_value(derived: DerivedQuantities) -> float:
    """Signed dispersion-correction coefficient G, 1/m.  Zero without dispersion."""
    if derived.delta1 == 0.0:
        return 0.0
    return (derived.params.lambda0 * (1.0 - 1.0 / derived.gamma)
            / (4.0 * math.pi * derived.delta1))


class ZDifference(NamedTuple):
    """Middle-pulse phase difference in two algebraic forms, rad."""

    exact: float
    factored: float


def z_difference(params: LinkParams, config: MzConfig, delta_x: float,
                 pair_a: str, pair_b: str) -> ZDifference:
    """Phase difference z_a - z_b at offset delta_x from the symbol center.

    ``exact`` subtracts the raw per-pair phases; ``factored`` evaluates
    (2*pi/lambda0)*(shifter-sum difference)*(1 + G*[delta_x + s]) where s
    recenters for the pairs involved.  The two agree to rounding error.
    """
    d = derive(params, config)
    for pair in (pair_a, pair_b):
        if pair not in d.mu:
            raise ValueError(f"unknown leg pair {pair!r}")
    if abs(delta_x) > 5.0 * d.sigma:
        raise ValueError("delta_x outside +-5 sigma of the symbol center")
    x_abs = d.window_center + delta_x
    exact = float(z_phase_difference(d, pair_a, pair_b, x_abs))

    dsum_a = config.delta_sum(pair_a)
    dsum_b = config.delta_sum(pair_b)
    recenter = delta_x + 0.5 * (config.delta_d + config.delta_m - dsum_a - dsum_b)
    factored = (2.0 * math.pi / params.lambda0) * (dsum_a - dsum_b) \
        * (1.0 + g_term_value(d) * recenter)
    return ZDifference(exact=exact, factored=factored)


@dataclass(frozen=True)
class GTermAnalysis:
    """G and the end-of-window correction magnitude over a length sweep."""

    lengths: np.ndarray       # m
    g_values: np.ndarray      # signed G, 1/m
    second_terms: np.ndarray  # |G*(3*sigma - delta_c)|, dimensionless
    argmax_length: float      # sweep length maximizing |G|, m
    analytic_argmax: float    # 1/(4*delta_k^2*kappa), m


def g_term_analysis(params: LinkParams, lengths: Sequence[float] | np.ndarray,
                    delta_c: float = 0.0) -> GTermAnalysis:
    """Evaluate G over fiber lengths and locate its maximum magnitude."""
    lengths = np.asarray(lengths, dtype=float)
    if lengths.size == 0 or np.any(lengths < 0):
        raise ValueError("length sweep must be non-empty and non-negative")
    g_values = np.empty_like(lengths)
    second = np.empty_like(lengths)
    for i, length in enumerate(lengths):
        d = derive(replace(params, fiber_length=float(length)), MzConfig())
        g = g_term_value(d)
        g_values[i] = g
        second[i] = abs(g * (3.0 * d.sigma - delta_c))
    d0 = derive(params, MzConfig())
    return GTermAnalysis(
        lengths=lengths, g_values=g_values, second_terms=second,
        argmax_length=float(lengths[int(np.argmax(np.abs(g_values)))]),
        analytic_argmax=1.0 / (4.0 * d0.delta_k**2 * d0.kappa),
    )


@dataclass(frozen=True)
class DetectionRow:
    """Middle-window detection shares for one (alice, bob) setting."""

    alice_basis: str
    bit: int
    bob_basis: str
    phi_d: float   # m
    phi_m: float   # m
    mass_o: float
    mass_p: float

    @property
    def p_o(self) -> float:
        return self.mass_o / (self.mass_o + self.mass_p)

    @property
    def p_p(self) -> float:
        return self.mass_p / (self.mass_o + self.mass_p)


@dataclass(frozen=True)
class DetectionTable:
    """Truth table over every (alice basis, bit, bob basis) combination."""

    rows: tuple
    baseline: float
    link_length: float
    warning: Optional[str] = None

    def row(self, alice_basis: str, bit: int, bob_basis: str) -> DetectionRow:
        for r in self.rows:
            if (r.alice_basis, r.bit, r.bob_basis) == (alice_basis, bit, bob_basis):
                return r
        raise KeyError((alice_basis, bit, bob_basis))


def default_baseline(params: LinkParams, rho: float = 3.0) -> float:
    """Half the shifter-sum bound, rounded up to the next centimeter, m."""
    return math.ceil(min_phase_sum(params, rho) / 2.0 * 100.0) / 100.0


def detection_table(params: LinkParams, baseline: float,
                    link_length: float | None = None,
                    rho_window: float = MIDDLE_WINDOW_RHO,
                    grid: GridSpec | None = None) -> DetectionTable:
    """Detection shares of both exits for all eight encoding combinations.

    Each combination runs the analytic spectra with delta_d/delta_m set to
    baseline plus the table offsets and integrates the middle window.  A
    warning is attached when the baseline fails the rho=3 separation bound;
    a baseline below the 1/e overlap point is a hard error.
    """
    if link_length is not None:
        params = replace(params, fiber_length=float(link_length))
    derived = derive(params, MzConfig(delta_d=baseline, delta_m=baseline))
    if 2.0 * baseline < 4.0 * x_rho(derived, 1.0):
        raise InfeasibleDesignError(
            f"baseline {baseline!r} m leaves the three pulses overlapping "
            f"(2*baseline < 4*X_1 = {4.0 * x_rho(derived, 1.0):.4g} m)")
    warning = None
    bound = min_phase_sum(params, 3.0)
    if 2.0 * baseline < bound:
        warning = (f"baseline sum {2.0 * baseline:.4g} m is below the rho=3 "
                   f"separation bound {bound:.4g} m")

    rows = []
    for alice_basis in BASES:
        for bit in (0, 1):
            alice = phase_for(params, "alice", alice_basis, bit, baseline)
            for bob_basis in BASES:
                bob = phase_for(params, "bob", bob_basis, baseline=baseline)
                config = MzConfig(delta_d=alice.total_shift, delta_m=bob.total_shift)
                curve = eval_analytic(params, config, grid or GridSpec())
                mass_o, mass_p = middle_window_masses(curve, rho_window)
                rows.append(DetectionRow(
                    alice_basis=alice_basis, bit=bit, bob_basis=bob_basis,
                    phi_d=alice.phase_offset, phi_m=bob.phase_offset,
                    mass_o=mass_o, mass_p=mass_p))
    return DetectionTable(rows=tuple(rows), baseline=baseline,
                          link_length=params.fiber_length, warning=warning)
