"""Dispersion-compensation planning for a clocked link.

Two regimes exist.  When the clock rate stays below the intersymbol bound at
the full link length, no compensating fiber is needed and the shifter bound
is evaluated at the full length.  Above it, symbols would be read in the
wrong order; the planner then finds the longest "active" length whose bound
still accommodates the clock and prescribes cancelling the dispersion of the
remaining span.  The cancellation itself is a wavenumber-domain multiplier
verified against the spectra oracle.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

from .core import LinkParams, MzConfig, derive
from .design import RATE_MODES, max_rate, min_phase_sum
from .errors import InfeasibleDesignError
from .spectra import PrecompMultiplier

REGIMES = ("no_dcf", "partial_dcf")

# Bisection tolerance on the active length, m.
ACTIVE_LENGTH_TOL = 1.0


@dataclass(frozen=True)
class DcfParams:
    """Compensating-fiber description: only the product kappa_cp*l_cp acts.

    kappa_cp must oppose the link's signed dispersion parameter; for a
    normal positive-D link that makes kappa_cp positive.
    """

    kappa_cp: float  # m
    l_cp: float      # m
    t_cp: float = 1.0

    @property
    def b_cp(self) -> float:
        """Accumulated dispersion of the element, m^2."""
        return self.kappa_cp * self.l_cp


@dataclass(frozen=True)
class CompensationPlan:
    """Planner output for one (link, clock rate) pair."""

    regime: str
    clock_rate: float              # Hz
    link_length: float             # m
    active_length: float           # m, uncompensated remainder
    dcf_equivalent_length: float   # m, link_length - active_length
    dcf_params: Optional[DcfParams]
    phase_sum_requirement: float   # m, shifter bound at the active length
    rho: float
    mode: str


def plan(params: LinkParams, clock_rate: float, rho: float,
         mode: str = "linear") -> CompensationPlan:
    """Choose the compensation regime and minimum compensated span.

    Raises InfeasibleDesignError when even a fully compensated link (only
    leg dispersion left) cannot reach the clock rate.
    """
    if not clock_rate > 0:
        raise ValueError("clock_rate must be positive")
    if mode not in RATE_MODES:
        raise ValueError(f"mode must be one of {RATE_MODES}, got {mode!r}")
    link = params.fiber_length

    def rate_at(active: float) -> float:
        return max_rate(replace(params, fiber_length=active), rho, mode)

    if clock_rate <= rate_at(link):
        return CompensationPlan(
            regime="no_dcf", clock_rate=clock_rate, link_length=link,
            active_length=link, dcf_equivalent_length=0.0, dcf_params=None,
            phase_sum_requirement=min_phase_sum(params, rho),
            rho=rho, mode=mode)

    if clock_rate > rate_at(0.0):
        raise InfeasibleDesignError(
            f"clock rate {clock_rate:.4g} Hz exceeds the bound "
            f"{rate_at(0.0):.4g} Hz of a fully compensated link "
            "(interferometer legs still disperse)")

    # rate_at is strictly decreasing in the active length, so plain bisection
    # brackets the crossing.
    lo, hi = 0.0, link
    while hi - lo > ACTIVE_LENGTH_TOL:
        mid = 0.5 * (lo + hi)
        if rate_at(mid) >= clock_rate:
            lo = mid
        else:
            hi = mid
    active = lo
    span = link - active
    kappa = derive(params, MzConfig()).kappa
    return CompensationPlan(
        regime="partial_dcf", clock_rate=clock_rate, link_length=link,
        active_length=active, dcf_equivalent_length=span,
        dcf_params=DcfParams(kappa_cp=kappa, l_cp=span),
        phase_sum_requirement=min_phase_sum(
            replace(params, fiber_length=active), rho),
        rho=rho, mode=mode)


def full_compensation_dcf(params: LinkParams) -> DcfParams:
    """Element cancelling the whole link including the interferometer legs."""
    kappa = derive(params, MzConfig()).kappa
    return DcfParams(kappa_cp=kappa,
                     l_cp=params.fiber_length + 2.0 * params.leg_length)


def precompensate_input(params: LinkParams,
                        plan_or_dcf: CompensationPlan | DcfParams) -> PrecompMultiplier:
    """Wavenumber-domain multiplier realizing a plan's compensating element.

    The multiplier is sqrt(t_cp)*exp(-i k a_cp - i k^2 b_cp) with
    a_cp = group_index*l_cp and b_cp = kappa_cp*l_cp.  The product must
    oppose the link's accumulated dispersion; a same-sign product would add
    dispersion instead of cancelling it and is rejected.
    """
    if isinstance(plan_or_dcf, CompensationPlan):
        dcf = plan_or_dcf.dcf_params
        if dcf is None:
            raise ValueError("plan prescribes no compensating element (no_dcf regime)")
    else:
        dcf = plan_or_dcf
    link_delta1 = derive(params, MzConfig()).delta1
    if dcf.b_cp != 0.0 and link_delta1 != 0.0 and dcf.b_cp * link_delta1 > 0:
        raise ValueError(
            "kappa_cp*l_cp has the same sign as the link dispersion; "
            "a compensating element must oppose it")
    return PrecompMultiplier(t_cp=dcf.t_cp,
                             a_cp=params.group_index * dcf.l_cp,
                             b_cp=dcf.b_cp)
