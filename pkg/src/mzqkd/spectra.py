"""Output position spectra of the two-interferometer link.

Two independent evaluation routes are provided.  ``eval_analytic`` computes
the closed-form intensity: four Gaussian leg-pair components plus six
cosine-weighted cross terms.  ``eval_oracle`` builds the wavenumber-domain
transfer function of the full setup, multiplies it onto the Gaussian input
spectrum and inverse-transforms to position space by direct quadrature.  The
two must agree to high precision; the oracle is the verification reference
for the analytic route and for compensation studies.

Position bookkeeping: intensities are probability densities over the
vacuum-equivalent propagation distance x.  At telecom lengths x is tens of
kilometers while the pulse structure lives on a scale of meters, so the
oracle factors the x-independent carrier phase out of the transform (a global
phase, invisible in |psi|^2) and evaluates only well-conditioned residual
phases.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np

from .core import DerivedQuantities, LinkParams, MzConfig, PAIRS, derive
from .errors import ResolutionError

# Cross-term ordering and the interference sign of each output.  Exit o takes
# component signs (+dm, -cm, -dc, +cc), exit p takes (+dm, -cm, +dc, -cc);
# the entries below are the products sign(ij)*sign(kl) for each ordered pair.
CROSS_PAIRS = (("dm", "cm"), ("dm", "dc"), ("cm", "dc"),
               ("dm", "cc"), ("cm", "cc"), ("dc", "cc"))
SIGNS_O = (-1.0, -1.0, +1.0, +1.0, -1.0, -1.0)
SIGNS_P = (-1.0, +1.0, -1.0, -1.0, +1.0, -1.0)

_trapz = getattr(np, "trapezoid", None) or np.trapz


@dataclass(frozen=True)
class GridSpec:
    """Position grid for spectrum evaluation.

    Without explicit bounds the grid spans [min(mu) - pad_sigmas*sigma,
    max(mu) + pad_sigmas*sigma].  Explicit bounds are absolute positions, or
    offsets from the window center when ``relative`` is true; they must cover
    at least +-5 sigma around the outer component means.
    """

    n_points: int = 4096
    pad_sigmas: float = 6.0
    x_min: Optional[float] = None
    x_max: Optional[float] = None
    relative: bool = False

    def __post_init__(self) -> None:
        if self.n_points < 2:
            raise ValueError("grid needs at least 2 points")
        if (self.x_min is None) != (self.x_max is None):
            raise ValueError("x_min and x_max must be given together")
        if self.x_min is None and self.pad_sigmas < 5.0:
            raise ValueError("pad_sigmas below 5 leaves pulse tails outside the grid")


@dataclass(frozen=True)
class PulseMoments:
    """Means and width of the four components, after any pre-compensation."""

    mu: Mapping[str, float]
    sigma: float
    delta1: float
    gamma: float

    @property
    def window_center(self) -> float:
        return 0.5 * (self.mu["cm"] + self.mu["dc"])


@dataclass(frozen=True)
class SpectrumCurve:
    """Sampled |psi_o(x)|^2, |psi_p(x)|^2 with the inputs that produced them."""

    x: np.ndarray
    intensity_o: np.ndarray
    intensity_p: np.ndarray
    params: LinkParams
    config: MzConfig
    derived: DerivedQuantities = field(repr=False)
    window_center: float = 0.0
    sigma: float = 0.0
    checks: Optional[dict] = None

    @property
    def x_relative(self) -> np.ndarray:
        """Grid as offsets from the middle-pulse center."""
        return self.x - self.window_center


@dataclass(frozen=True)
class ComponentTerms:
    """Per-pair pieces of the analytic intensity on a shared grid."""

    x: np.ndarray
    j_sq: Mapping[str, np.ndarray]       # |J_ij|^2
    c_prime: Mapping[str, np.ndarray]    # Gaussian cross-term amplitudes
    z: Mapping[str, np.ndarray]          # per-pair phases, rad
    cross: Mapping[tuple, np.ndarray]    # Re[J_ij J*_kl] for CROSS_PAIRS
    ii_o: np.ndarray
    ii_p: np.ndarray


def _grid_for(moments: PulseMoments, grid: GridSpec) -> np.ndarray:
    mu_lo = min(moments.mu.values())
    mu_hi = max(moments.mu.values())
    if grid.x_min is None:
        lo = mu_lo - grid.pad_sigmas * moments.sigma
        hi = mu_hi + grid.pad_sigmas * moments.sigma
    else:
        lo, hi = grid.x_min, grid.x_max
        if grid.relative:
            lo += moments.window_center
            hi += moments.window_center
        if lo > mu_lo - 5.0 * moments.sigma or hi < mu_hi + 5.0 * moments.sigma:
            raise ValueError(
                "grid too narrow: must cover +-5 sigma around the outer component means")
    if not lo < hi:
        raise ValueError("empty position grid")
    return np.linspace(lo, hi, grid.n_points)


def _moments(derived: DerivedQuantities) -> PulseMoments:
    return PulseMoments(mu=dict(derived.mu), sigma=derived.sigma,
                        delta1=derived.delta1, gamma=derived.gamma)


def _a_sum_extended(derived: DerivedQuantities, pair: str) -> np.longdouble:
    """Per-pair linear path term summed in extended precision.

    The path terms are tens of kilometers while phase differences resolve
    nanometers; float64 rounding of the sum would leak into the phases.
    """
    p, cfg = derived.params, derived.config
    shifter = {"c": cfg.delta_c, "d": cfg.delta_d, "m": cfg.delta_m}
    first, second = pair[0], ("m" if pair[1] == "m" else "c")
    group_delay = np.longdouble(p.group_index) * (
        np.longdouble(p.fiber_length) + 2 * np.longdouble(p.leg_length))
    return group_delay + np.longdouble(shifter[first]) + np.longdouble(shifter[second])


def z_phase(derived: DerivedQuantities, pair: str, x) -> np.ndarray:
    """Raw phase of one leg-pair component at absolute position x, rad.

    Evaluated in extended precision: the raw phases are huge at telecom
    lengths and only their pairwise differences are physical.
    """
    d = derived
    dk, k0, d1, g = d.delta_k, d.k0, d.delta1, d.gamma
    xp = np.asarray(x, dtype=np.longdouble) - _a_sum_extended(d, pair)
    return (0.5 * math.atan(4.0 * d1 * dk**2)
            + (k0**2 * d1 - k0 * xp - 4.0 * dk**4 * d1 * xp * xp) / g)


def z_phase_difference(derived: DerivedQuantities, pair_a: str, pair_b: str, x):
    """Difference z_a(x) - z_b(x) without the huge common phase, rad.

    The pair-independent pieces of the raw phases cancel algebraically;
    what remains is proportional to the shifter-sum difference and stays
    well-conditioned at any link length.
    """
    d = derived
    dk, k0, d1, g = d.delta_k, d.k0, d.delta1, d.gamma
    cfg = d.config
    dsum_diff = np.longdouble(cfg.delta_sum(pair_a)) - np.longdouble(cfg.delta_sum(pair_b))
    xl = np.asarray(x, dtype=np.longdouble)
    xp_sum = (xl - _a_sum_extended(d, pair_a)) + (xl - _a_sum_extended(d, pair_b))
    return (dsum_diff / g) * (k0 + 4.0 * dk**4 * d1 * xp_sum)


def component_terms(params: LinkParams, config: MzConfig,
                    x: np.ndarray) -> ComponentTerms:
    """Evaluate every analytic component on the given grid."""
    d = derive(params, config)
    dk, k0, d1, g = d.delta_k, d.k0, d.delta1, d.gamma
    t = params.t_leg

    j_sq = {}
    c_prime = {}
    z = {}
    for pair in PAIRS:
        env = np.exp(-dk**2 * (x - d.mu[pair]) ** 2 / g)
        j_sq[pair] = 4.0 * math.pi * dk**2 * t * t * env * env / math.sqrt(g)
        c_prime[pair] = 2.0 * dk * t * math.sqrt(math.pi) * env / g**0.25
        z[pair] = z_phase(d, pair, x)

    cross = {}
    for (a, b) in CROSS_PAIRS:
        # Stable phase difference: the pair-independent pieces of z cancel
        # algebraically, leaving a small, well-conditioned expression.
        dsum_diff = config.delta_sum(a) - config.delta_sum(b)
        xp_sum = 2.0 * x - (d.a_sum(a) + d.a_sum(b))
        zdiff = (dsum_diff / g) * (k0 + 4.0 * dk**4 * d1 * xp_sum)
        cross[(a, b)] = c_prime[a] * c_prime[b] * np.cos(zdiff)

    ii_o = sum(s * cross[p] for s, p in zip(SIGNS_O, CROSS_PAIRS))
    ii_p = sum(s * cross[p] for s, p in zip(SIGNS_P, CROSS_PAIRS))
    z64 = {pair: z[pair].astype(np.float64) for pair in PAIRS}
    return ComponentTerms(x=x, j_sq=j_sq, c_prime=c_prime, z=z64,
                          cross=cross, ii_o=ii_o, ii_p=ii_p)


def eval_analytic(params: LinkParams, config: MzConfig,
                  grid: GridSpec | None = None) -> SpectrumCurve:
    """Closed-form output spectra of both exits."""
    grid = grid or GridSpec()
    d = derive(params, config)
    moments = _moments(d)
    x = _grid_for(moments, grid)
    terms = component_terms(params, config, x)
    prefactor = params.t_fiber / (32.0 * math.pi * math.sqrt(2.0 * math.pi) * d.delta_k)
    total_j = sum(terms.j_sq[pair] for pair in PAIRS)
    intensity_o = prefactor * (total_j + 2.0 * terms.ii_o)
    intensity_p = prefactor * (total_j + 2.0 * terms.ii_p)
    if not (np.all(np.isfinite(intensity_o)) and np.all(np.isfinite(intensity_p))):
        raise ValueError("non-finite intensity; parameters out of numeric range")
    # destructive points cancel to rounding noise; clip it, but treat anything
    # beyond noise scale as a genuine sign error
    floor = -1e-10 * max(float(intensity_o.max()), float(intensity_p.max()))
    if intensity_o.min() < floor or intensity_p.min() < floor:
        raise ValueError("negative intensity beyond rounding noise")
    intensity_o = np.maximum(intensity_o, 0.0)
    intensity_p = np.maximum(intensity_p, 0.0)
    return SpectrumCurve(x=x, intensity_o=intensity_o, intensity_p=intensity_p,
                         params=params, config=config, derived=d,
                         window_center=moments.window_center, sigma=moments.sigma)


@dataclass(frozen=True)
class PrecompMultiplier:
    """Wavenumber-domain multiplier of a dispersion-compensating element.

    Multiplies the input spectrum by sqrt(t_cp)*exp(-i k a_cp - i k^2 b_cp).
    ``a_cp`` is the element's linear path term (group index times physical
    length, m) and ``b_cp`` its accumulated dispersion (m^2); cancellation
    requires b_cp to oppose the link's own accumulated dispersion.
    """

    t_cp: float = 1.0
    a_cp: float = 0.0
    b_cp: float = 0.0

    def __post_init__(self) -> None:
        if not 0 < self.t_cp <= 1:
            raise ValueError("t_cp must lie in (0, 1]")
        for name in ("a_cp", "b_cp"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")


def effective_moments(params: LinkParams, config: MzConfig,
                      precomp: PrecompMultiplier | None = None) -> PulseMoments:
    """Component means/width including an optional compensating element."""
    d = derive(params, config)
    if precomp is None:
        return _moments(d)
    delta1 = d.delta1 + precomp.b_cp
    gamma = 1.0 + 16.0 * d.delta_k**4 * delta1**2
    sigma = math.sqrt(gamma) / (2.0 * d.delta_k)
    shift = precomp.a_cp + 2.0 * (delta1 - d.delta1) * d.k0
    mu = {pair: d.mu[pair] + shift for pair in PAIRS}
    return PulseMoments(mu=mu, sigma=sigma, delta1=delta1, gamma=gamma)


def _oracle_n_k(k_span: float, max_inst_offset: float, n_k_min: int) -> int:
    # Sampling margin 1.5x over the largest instantaneous position offset the
    # integrand reaches; below that the quadrature aliases.
    du_max = math.pi / (1.5 * max(max_inst_offset, 1e-9))
    n = max(n_k_min, int(math.ceil(2.0 * k_span / du_max)) + 1)
    n_pow = 1 << (n - 1).bit_length()
    if n_pow > (1 << 20):
        raise ResolutionError(
            f"oracle would need {n_pow} wavenumber samples; grid is too wide "
            "for the available resolution")
    return n_pow


def eval_oracle(params: LinkParams, config: MzConfig,
                grid: GridSpec | None = None, *,
                precomp: PrecompMultiplier | None = None,
                placement: str = "pre",
                k_span_sigmas: float = 10.0,
                n_k_min: int = 1 << 14) -> SpectrumCurve:
    """Numeric propagation through the wavenumber-domain transfer function.

    Builds the product of the input Gaussian spectrum, the fiber's linear and
    quadratic phase, both interferometers' leg factors and (optionally) a
    compensating element, then inverse-transforms to position space by direct
    trapezoid quadrature.  ``placement`` applies the compensating multiplier
    before, after, or split around the link factors; for this linear model
    all three are equivalent and the option exists for verification.

    Raises ResolutionError when the wavenumber sampling cannot represent the
    requested grid or fails the input-norm self-check (1e-8).
    """
    if placement not in ("pre", "post", "symmetric"):
        raise ValueError(f"placement must be pre, post or symmetric, got {placement!r}")
    grid = grid or GridSpec()
    d = derive(params, config)
    moments = effective_moments(params, config, precomp)
    x = _grid_for(moments, grid)

    dk, k0 = d.delta_k, d.k0
    kappa_signed = -d.kappa
    b_fiber = kappa_signed * params.fiber_length
    b_leg = kappa_signed * params.leg_length
    b_cp = precomp.b_cp if precomp is not None else 0.0
    a_cp = precomp.a_cp if precomp is not None else 0.0
    t_cp = precomp.t_cp if precomp is not None else 1.0

    k_span = k_span_sigmas * dk
    delta1_eff = moments.delta1
    max_off = max(abs(float(x[0]) - m) for m in moments.mu.values())
    max_off = max(max_off, *(abs(float(x[-1]) - m) for m in moments.mu.values()))
    n_k = _oracle_n_k(k_span, max_off + 2.0 * abs(delta1_eff) * k_span, n_k_min)

    u = np.linspace(-k_span, k_span, n_k)
    du = u[1] - u[0]
    alpha_in = (2.0 * math.pi * dk**2) ** -0.25 * np.exp(-u**2 / (4.0 * dk**2))

    norm_in = _trapz(alpha_in**2, dx=du)
    if abs(norm_in - 1.0) > 1e-8:
        raise ResolutionError(
            f"input-norm quadrature error {abs(norm_in - 1.0):.3e} exceeds 1e-8; "
            "raise n_k_min or k_span_sigmas")

    def leg_factor(delta: float) -> np.ndarray:
        # sqrt(T)*exp(-i[(k0+u)A + (k0+u)^2 B]) for one interferometer leg.
        a = delta + params.group_index * params.leg_length
        phase = (k0 + u) * a + (k0 + u) ** 2 * b_leg
        return math.sqrt(params.t_leg) * np.exp(-1j * phase)

    # Common factors: the fiber's quadratic phase and the compensator's,
    # keeping only the u-dependent part (the k0^2 piece and the k0-linear
    # carrier are global phases of psi and cancel in the intensity).
    chirp_fiber = np.exp(-1j * (2.0 * k0 * u + u * u) * b_fiber)
    mult_cp = math.sqrt(t_cp) * np.exp(-1j * (2.0 * k0 * u + u * u) * b_cp)

    e_d = leg_factor(config.delta_d)
    e_m = leg_factor(config.delta_m)
    e_c = leg_factor(config.delta_c)

    first_mz = e_d - e_c
    if placement == "pre":
        source = alpha_in * mult_cp * chirp_fiber
        base_o = source * (e_m - e_c) * first_mz
        base_p = source * (e_m + e_c) * first_mz
    elif placement == "post":
        source = alpha_in * chirp_fiber
        base_o = source * (e_m - e_c) * first_mz * mult_cp
        base_p = source * (e_m + e_c) * first_mz * mult_cp
    else:
        half = np.sqrt(mult_cp)
        source = alpha_in * half * chirp_fiber
        base_o = source * (e_m - e_c) * first_mz * half
        base_p = source * (e_m + e_c) * first_mz * half

    weights = np.ones(n_k)
    weights[0] = weights[-1] = 0.5
    scale = 0.25 * math.sqrt(params.t_fiber) * du / math.sqrt(2.0 * math.pi)
    base_o = base_o * weights * scale
    base_p = base_p * weights * scale

    # Inverse transform: psi(x) ~ sum_u base(u) exp(i u X), X measured from
    # the linear path of fiber plus compensator (their carrier phase exp(i k0 X)
    # has unit modulus and is dropped).
    x_off = x - (d.a_fiber + a_cp)
    intensity_o = np.empty_like(x)
    intensity_p = np.empty_like(x)
    # cap the kernel block at ~2M complex entries (~32 MB)
    chunk = max(1, int(2.0e6 // n_k))
    for start in range(0, x.size, chunk):
        kernel = np.exp(1j * np.outer(x_off[start:start + chunk], u))
        intensity_o[start:start + chunk] = np.abs(kernel @ base_o) ** 2
        intensity_p[start:start + chunk] = np.abs(kernel @ base_p) ** 2

    # Parseval bookkeeping for the unitarity ledger: per-exit masses in k
    # space plus the share that left through the first interferometer's
    # unused exit.
    mass_o = float(_trapz(np.abs(0.25 * math.sqrt(params.t_fiber)
                                 * alpha_in * mult_cp * chirp_fiber
                                 * (e_m - e_c) * first_mz) ** 2, dx=du))
    mass_p = float(_trapz(np.abs(0.25 * math.sqrt(params.t_fiber)
                                 * alpha_in * mult_cp * chirp_fiber
                                 * (e_m + e_c) * first_mz) ** 2, dx=du))
    checks = {
        "norm_in": float(norm_in),
        "mass_o_kspace": mass_o,
        "mass_p_kspace": mass_p,
        "unused_exit_remainder": float(norm_in * params.t_fiber * t_cp
                                       * params.t_leg**2 - mass_o - mass_p),
        "n_k": n_k,
    }
    return SpectrumCurve(x=x, intensity_o=intensity_o, intensity_p=intensity_p,
                         params=params, config=config, derived=d,
                         window_center=moments.window_center,
                         sigma=moments.sigma, checks=checks)


def middle_window_masses(curve: SpectrumCurve, rho_window: float) -> tuple[float, float]:
    """Probability mass of each exit inside the middle-pulse window.

    The window is [center - X, center + X] with X = rho_window*sqrt(2)*sigma
    and the center halfway between the two middle-component means.  Raises
    ValueError when the window is not fully inside the sampled grid.
    """
    if not rho_window > 0:
        raise ValueError("rho_window must be positive")
    half = rho_window * math.sqrt(2.0) * curve.sigma
    lo = curve.window_center - half
    hi = curve.window_center + half
    if lo < curve.x[0] or hi > curve.x[-1]:
        raise ValueError("integration window exceeds the sampled grid")
    return (_window_mass(curve.x, curve.intensity_o, lo, hi),
            _window_mass(curve.x, curve.intensity_p, lo, hi))


def _window_mass(x: np.ndarray, y: np.ndarray, lo: float, hi: float) -> float:
    inside = (x > lo) & (x < hi)
    xs = np.concatenate(([lo], x[inside], [hi]))
    ys = np.concatenate(([np.interp(lo, x, y)], y[inside], [np.interp(hi, x, y)]))
    return float(_trapz(ys, xs))


def total_mass(curve: SpectrumCurve) -> tuple[float, float]:
    """Trapezoid-integrated mass of each exit over the whole grid."""
    return (float(_trapz(curve.intensity_o, curve.x)),
            float(_trapz(curve.intensity_p, curve.x)))


def max_normalized_deviation(a: SpectrumCurve, b: SpectrumCurve) -> float:
    """Largest pointwise |difference| after normalizing each exit to peak 1.

    Curves must share the same relative grid; positions are compared as
    offsets from each curve's own window center.
    """
    if a.x.size != b.x.size:
        raise ValueError("curves have different grid sizes")
    if not np.allclose(a.x_relative, b.x_relative, rtol=0, atol=1e-9):
        raise ValueError("curves are sampled on different relative grids")
    dev = 0.0
    for ya, yb in ((a.intensity_o, b.intensity_o), (a.intensity_p, b.intensity_p)):
        peak = max(float(ya.max()), float(yb.max()))
        if peak <= 0:
            raise ValueError("cannot normalize an all-zero curve")
        dev = max(dev, float(np.max(np.abs(ya - yb))) / peak)
    return dev
