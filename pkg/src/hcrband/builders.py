"""Constructors for the four concrete envelope members and the band.

Each builder picks the triple (eps, C, q) of one member of the
two-parameter family, certifies it, and returns the EnvelopeSpec:

  global upper   eps = 1, C = 1, q = q+(t)               heights [1, T]
  global lower   eps = 3/4, corner C, q capped at 1.1    heights [1, T]
  partial upper  matched eps, corner C, iterated q       heights [sqrt(T), T]
  partial lower  eps = eps~+(t), corner C, matched q     heights [sqrt(T), T]

The C values come from the boundary condition y(1) = T, whose exact form
atanh(c) = atanh(c/zeta(c)) + lam(c) c is made solvable by freezing zeta
and lam at fixed-point seeds and keeping the mid-regime bracket end with
the safe inequality direction: the minus end underestimates C for lower
members, the plus end overestimates it for upper members, so whatever
the frozen seeds miss only pushes the member further onto its own side.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, PreconditionError
from .model import (
    SQRT2,
    C_from_delta,
    EnvelopeBand,
    EnvelopeSpec,
    ProblemParams,
    c_to_C,
    closed_form_y,
    eps_root,
    eps_tilde_bounds,
    residue_poly,
    slope_threshold_q,
    x_of_y,
)
from .transcendental import bracket_mid, bracket_small, fixed_point_c0
from .verification import certify

# ------------------------------------------------------------------
# tuning constants
# ------------------------------------------------------------------

GLOBAL_LOWER_EPS = 0.75
GLOBAL_LOWER_Q_CAP = 1.1
# Lambda shrink factors for the fixed-point seeds that freeze zeta.
SEED_SHRINK_UPPER = 0.99
SEED_Q_LOWER = 1.25
GRADIENT_ITERATIONS = 2
# b t^0.25 >= 50 sqrt(5) marks the boundary-layer regime.
LAYER_THRESHOLD = 50.0


# ------------------------------------------------------------------
# global upper member
# ------------------------------------------------------------------


def q_global_upper(t: float) -> float:
    """Slope factor q+(t) = sqrt((1-t^3)(5+t^3) / (5(1-t^4))).

    Decreases from 1 at t = 0 to sqrt(0.9) as t -> 1 (the t -> 1 limit
    of the ratio is 6/(5*4/3) = 9/10), so q+ in [sqrt(0.9), 1] always.
    """
    if not 0.0 < t < 1.0:
        raise DomainError(f"t must lie in (0, 1), got {t}")
    t3 = t**3
    return math.sqrt((1.0 - t3) * (5.0 + t3) / (5.0 * (1.0 - t3 * t)))


def build_global_upper(params: ProblemParams) -> EnvelopeSpec:
    """Member (eps=1, C=1, q=q+(t)): upper envelope on all of [0, 1].

    With eps = C = 1 the closed form collapses to a shifted coth in
    z = y^1.5, anchored at z(1) = T^1.5; q+ is the largest slope factor
    for which the residue stays nonpositive on [1, T], which is what the
    certificate re-checks numerically.
    """
    spec = EnvelopeSpec(
        params=params,
        side="upper",
        scope="global",
        eps=1.0,
        C=1.0,
        q=q_global_upper(params.t),
    )
    certify(spec)
    return spec


# ------------------------------------------------------------------
# derivative bounds at the cold face
# ------------------------------------------------------------------


@dataclass(frozen=True)
class DerivativeBounds:
    """Two-sided information on y'(0) and y'(1) extracted from y+.

    delta_cap bounds the energy constant delta = y'(0)^2 / (2 B^2) from
    above via the chord of the upper envelope over [0, 0.25]; the
    secant estimate delta_estimate replaces the 1 in the chord by
    y+(0) >= 1, so delta_estimate <= delta_cap always.  delta_closed_cap
    is the a-priori cap 15 B^-2 (e^{3B}-1)^-2 (1 + (e^{3B}-1)^-1)^2,
    which dominates delta_cap and shows the super-exponential decay.
    slope1_lower = sqrt(2) B sqrt(T^5-5T+4) <= y'(1), with excess at
    most slope1_gap = sqrt(2) B delta_cap / (2 sqrt(T^5-5T+4)).
    """

    delta_cap: float
    delta_estimate: float
    delta_closed_cap: float
    slope1_lower: float
    slope1_gap: float


def derivative_bounds(params: ProblemParams) -> DerivativeBounds:
    upper = build_global_upper(params)
    y_quarter = float(closed_form_y(0.25, upper))
    y_zero = float(closed_form_y(0.0, upper))
    denom = 0.25 * SQRT2 * params.B
    delta_cap = ((y_quarter - 1.0) / denom) ** 2
    delta_estimate = ((y_quarter - y_zero) / denom) ** 2
    try:
        inv = 1.0 / math.expm1(3.0 * params.B)
    except OverflowError:
        inv = 0.0
    delta_closed_cap = 15.0 / params.B**2 * inv**2 * (1.0 + inv) ** 2
    poly = params.T**5 - 5.0 * params.T + 4.0
    slope1_lower = SQRT2 * params.B * math.sqrt(poly)
    slope1_gap = SQRT2 * params.B * delta_cap / (2.0 * math.sqrt(poly))
    return DerivativeBounds(
        delta_cap=delta_cap,
        delta_estimate=delta_estimate,
        delta_closed_cap=delta_closed_cap,
        slope1_lower=slope1_lower,
        slope1_gap=slope1_gap,
    )


# ------------------------------------------------------------------
# corner C values from the frozen boundary condition
# ------------------------------------------------------------------


def _zeta_at_seed(params: ProblemParams, eps: float, c_seed: float) -> float:
    # zeta(C) = (T^1.5 + X) / (1 + X) with X = (1-eps) C / 2, evaluated
    # at the seed's C; decreasing in C, and > 1 whenever T > 1.
    x_half = 0.5 * (1.0 - eps) * c_to_C(c_seed, eps)
    return (params.T**1.5 + x_half) / (1.0 + x_half)


def _corner_C(zeta: float, lam: float, eps: float, side: str) -> float:
    # Bracket of atanh(c) = atanh(c/zeta) + lam c; the minus end
    # (delta_lower) understates c hence C, the plus end overstates.
    # The tanh-addition corners hold for every zeta > 1 once lam >= 1.5
    # and are kept there verbatim (they are what the reference
    # tabulations were generated with); below 1.5 they collapse toward
    # the fixed point and the biquadratic corners take over.
    if lam < 1.5:
        bounds = bracket_small(zeta, lam)
    else:
        bounds = bracket_mid(zeta, lam)
    delta = bounds.delta_lower if side == "lower" else bounds.delta_upper
    return C_from_delta(delta, eps)


# ------------------------------------------------------------------
# global lower member
# ------------------------------------------------------------------


def build_global_lower(params: ProblemParams) -> EnvelopeSpec:
    """Member (eps=3/4, corner C, capped q): lower envelope on [0, 1].

    q is the slope threshold at the hot face, q(T, 3/4, 4/3) with the
    delta cap folded into the derivative bound, clipped to 1.1; zeta is
    frozen at the 30-fold fixed-point seed of Lambda = 0.99 L and the
    minus corner of the bracket at Lambda = L/q supplies C.  Raises
    NoRootError at weak coupling, where the frozen boundary equation
    admits no root and no member of the family can reach y(1) = T.
    """
    bounds = derivative_bounds(params)
    eps = GLOBAL_LOWER_EPS
    q = min(
        GLOBAL_LOWER_Q_CAP,
        slope_threshold_q(params.T, eps, 1.0 / eps, bounds.delta_cap),
    )
    c_seed = fixed_point_c0(SEED_SHRINK_UPPER * params.L)
    zeta = _zeta_at_seed(params, eps, c_seed)
    C = _corner_C(zeta, params.L / q, eps, "lower")
    spec = EnvelopeSpec(
        params=params, side="lower", scope="global", eps=eps, C=C, q=q
    )
    certify(spec, delta_cap=bounds.delta_cap)
    return spec


# ------------------------------------------------------------------
# partial members (heights sqrt(T) .. T)
# ------------------------------------------------------------------


def build_partial_upper(
    params: ProblemParams, iteration_rule: str = "text"
) -> EnvelopeSpec:
    """Slope-matched upper member, tight near the hot face.

    eps is the residue root at the hot face for the seed pair
    (q = 1 - 0.6 t^3, C = c-seed); q starts from the slope threshold at
    y = T, and two gradient corrections q <- q + R(T) * step follow,
    re-solving the corner C between steps.  The two published variants
    of this recipe differ in the threshold's eps argument and in the
    step size, and iteration_rule selects the pair as a unit:

      "text"      eps = 1 - 0.8 t^3,  step = t^4 / (20 B^2)
      "listing"   eps = eps~-(t),     step = t^4 / 15

    Both yield certified members; "listing" reproduces the reference
    tabulations digit-for-digit, "text" agrees to ~4 digits.
    """
    if iteration_rule not in ("text", "listing"):
        raise PreconditionError(
            f"iteration_rule must be 'text' or 'listing', got {iteration_rule!r}"
        )
    t, T = params.t, params.T
    c_seed = fixed_point_c0(SEED_SHRINK_UPPER * params.L)
    eps = eps_root(T, 1.0 - 0.6 * t**3, c_seed)
    if iteration_rule == "listing":
        eps_for_q = eps_tilde_bounds(t)[0]
        step = t**4 / 15.0
    else:
        eps_for_q = 1.0 - 0.8 * t**3
        step = t**4 / (20.0 * params.B**2)
    q = slope_threshold_q(T, eps_for_q, c_seed, 0.0)
    # zeta frozen at C = 1/eps (the strong-coupling endpoint c = 1).
    zeta = _zeta_at_seed(params, eps, 1.0)
    for _ in range(GRADIENT_ITERATIONS):
        C = _corner_C(zeta, params.L / (q * eps), eps, "upper")
        q = q + residue_poly(T, q, C, eps) * step
    C = _corner_C(zeta, params.L / (q * eps), eps, "upper")
    spec = EnvelopeSpec(
        params=params, side="upper", scope="partial", eps=eps, C=C, q=q
    )
    certify(spec)
    return spec


def build_partial_lower(params: ProblemParams) -> EnvelopeSpec:
    """Slope-matched lower member, tight near the hot face.

    eps = eps~+(t) makes the residue strictly negative at the hot face
    for any admissible C, so raising C toward the corner value only
    helps; q is the slope threshold at the half height sqrt(T) (with
    the delta cap), re-matched once after the first corner solve.  zeta
    stays frozen at the seed c0(L/1.25) through both rounds.
    """
    bounds = derivative_bounds(params)
    eps_lo, eps_hi = eps_tilde_bounds(params.t)
    eps = eps_hi
    c_seed = fixed_point_c0(params.L / SEED_Q_LOWER)
    zeta = _zeta_at_seed(params, eps, c_seed)
    y_anchor = math.sqrt(params.T)
    C = 1.0 / eps_lo
    for _ in range(2):
        q = slope_threshold_q(y_anchor, eps, C, bounds.delta_cap)
        C = _corner_C(zeta, params.L / q, eps, "lower")
    spec = EnvelopeSpec(
        params=params, side="lower", scope="partial", eps=eps, C=C, q=q
    )
    certify(spec, delta_cap=bounds.delta_cap)
    return spec


# ------------------------------------------------------------------
# bands
# ------------------------------------------------------------------


def build_band(
    params: ProblemParams, scope: str = "global", iteration_rule: str = "text"
) -> EnvelopeBand:
    """Assemble the certified two-sided band for the requested scope.

    Partial bands carry x_valid_min, the abscissa where the lower
    member crosses sqrt(T): right of it the true solution is certainly
    above the half height, so both partial members apply.
    """
    if scope == "global":
        lower = build_global_lower(params)
        upper = build_global_upper(params)
        return EnvelopeBand(params=params, scope="global", lower=lower, upper=upper)
    if scope == "partial":
        lower = build_partial_lower(params)
        upper = build_partial_upper(params, iteration_rule=iteration_rule)
        x_min = float(x_of_y(math.sqrt(params.T), lower))
        return EnvelopeBand(
            params=params,
            scope="partial",
            lower=lower,
            upper=upper,
            x_valid_min=x_min,
        )
    raise PreconditionError(f"scope must be 'global' or 'partial', got {scope!r}")


def width_grid(band: EnvelopeBand, points: int = 2001):
    """Abscissas for width evaluation, biased toward the hot face.

    Uniform x resolves nothing when the band hugs y = T on most of the
    interval, so heights are sampled uniformly in y along the lower
    member and pulled back through its inverse; the exact bottom height
    is excluded (it may be unattained when the closed form saturates)
    and a uniform-in-x grid is merged in so flat regions stay covered.
    """
    params = band.params
    if band.scope == "global":
        y_bottom = float(closed_form_y(0.0, band.lower))
    else:
        y_bottom = math.sqrt(params.T)
    heights = np.linspace(y_bottom, params.T, points + 1)[1:]
    xs_height = x_of_y(heights, band.lower)
    xs_uniform = np.linspace(band.x_valid_min, 1.0, points)
    xs = np.unique(np.concatenate([xs_height, xs_uniform]))
    return np.clip(xs, band.x_valid_min, 1.0)


def max_band_width(band: EnvelopeBand, points: int = 2001):
    """Maximum band width in y and in u over the width grid.

    Returns (width_y, width_u, x_at_max) with width_u = t * width_y
    evaluated at the same abscissa (the u widths are uniform rescalings
    of the y widths, so one argmax serves both).
    """
    xs = width_grid(band, points)
    widths = band.width_y(xs)
    i = int(np.argmax(widths))
    w = float(widths[i])
    return w, band.params.t * w, float(xs[i])


# ------------------------------------------------------------------
# boundary layer diagnostics
# ------------------------------------------------------------------


@dataclass(frozen=True)
class BoundaryLayerReport:
    """Verdict on boundary-layer behaviour at the hot face.

    strength = b t^0.25; the layer criterion B T^1.25 >= 50 is
    strength >= 50 sqrt(5) ~ 111.8.  xi = sqrt(5)/b is the depth scale
    and variation_ratio the share of the total variation T - 1 that the
    upper envelope concedes within xi of the hot face.
    """

    strength: float
    has_layer: bool
    xi: float
    variation_ratio: float


def variation_ratio_limit(t: float) -> float:
    """Share of the variation of y+ inside depth xi = sqrt(5)/b.

    b cancels: at x = 1 - xi the exponent of the closed form is
    a = 3 sqrt(2) (B/q+) xi = 3 sqrt(2) t^1.5 / q+(t), so the ratio
    (T - y+(1-xi)) / (T - 1) is a function of t alone.  Its minimum
    over t in (0, 1) is ~0.53, so a layer always carries at least half
    the variation.
    """
    if not 0.0 < t < 1.0:
        raise DomainError(f"t must lie in (0, 1), got {t}")
    T = 1.0 / t
    a = 3.0 * SQRT2 * t**1.5 / q_global_upper(t)
    e_inv = math.exp(-a)
    one_minus_e = -math.expm1(-a)
    t32 = T**1.5
    z = (t32 * (1.0 + e_inv) + one_minus_e) / (t32 * one_minus_e + 1.0 + e_inv)
    y = z ** (2.0 / 3.0)
    return (T - y) / (T - 1.0)


def boundary_layer(params: ProblemParams) -> BoundaryLayerReport:
    strength = params.b * params.t**0.25
    has_layer = params.B * params.T**1.25 >= LAYER_THRESHOLD
    return BoundaryLayerReport(
        strength=strength,
        has_layer=has_layer,
        xi=math.sqrt(5.0) / params.b,
        variation_ratio=variation_ratio_limit(params.t),
    )
