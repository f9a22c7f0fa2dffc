"""The limiting problem at vanishing cold-end temperature.

As t -> 0 the scaled two-point problem degenerates to

    u0'' = b^2 u0^4,   u0(0) = 1,  u0(1) = 0,

whose first integral is u0' = -(sqrt(2) b / sqrt(5)) sqrt(u0^5 + gamma)
for an unknown constant gamma > 0.  Dropping gamma gives the closed-form
upper envelope

    u0+(x) = [1 + (1.5 sqrt(2)/sqrt(5)) b x]^(-2/3),

and evaluating the square of its scaled end slope gives the computable
approximation Gamma = [1 + 1.5 sqrt(2) b / sqrt(5)]^(-10/3) to gamma.

Replacing the exponent -10/3 by a nearby r and integrating the IVP from
u(0) = 1 turns the terminal value w(1) into a monotone function of r
(larger r means faster decay, so w(1) decreases).  Bisecting r until the
terminal changes sign across a width-tol_r interval yields certified
envelopes: the run ending below zero sits under u0, the one ending above
sits over it.

Integration notes: the IVP leaves x = 0 with slope about -c, where
c = sqrt(2) b / sqrt(5) can be enormous, so a fixed-step explicit scheme
on w itself overshoots immediately.  The runs therefore start in the
reciprocal variable v := w^(-3/2), with

    v' = 1.5 c sqrt(1 + gamma v^(10/3)),

which is near-linear (its Jacobian stays below about 1.8 for every b),
and switch to the w form once gamma v^(10/3) reaches 1, i.e. once w^5
drops below gamma and the remaining decay is gentle.  The w tail clamps
the radicand at zero so runs that cross w = 0 keep a defined slope.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateError, DomainError, NoBracketError, OrderingError
from .model import SQRT2, SQRT5
from .numerics import rk4_integrate
from .shooting import default_steps

SEED_RHO_LOW = 2.75
SEED_RHO_HIGH = 2.84
SEED_RHO_CENTER = 2.8
WIDEN_ATTEMPTS = 10
MONOTONE_SLACK = 1e-12
TOL_R = 1e-7
SOFT_MIN_B = 16.0


def _growth_base(b: float, x: float = 1.0) -> float:
    return 1.0 + 1.5 * SQRT2 / SQRT5 * b * x


def u0_upper(b: float, x: float) -> float:
    """Closed-form upper envelope [1 + (1.5 sqrt2/sqrt5) b x]^(-2/3)."""
    if not b > 0.0:
        raise DomainError(f"b={b} must be > 0")
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"x={x} outside [0, 1]")
    return _growth_base(b, x) ** (-2.0 / 3.0)


def gamma_of_b(b: float) -> float:
    """Gamma = [1 + 1.5 sqrt(2) b / sqrt(5)]^(-10/3), the square of the
    scaled end slope of the closed-form envelope."""
    if not b > 0.0:
        raise DomainError(f"b={b} must be > 0")
    return _growth_base(b) ** (-10.0 / 3.0)


# ---------------------------------------------------------------------------
# the gamma-family of initial value problems
# ---------------------------------------------------------------------------


def _decay_profile(b: float, gamma: float, steps: int):
    """Integrate w' = -c sqrt(w^5 + gamma) from w(0)=1 across [0, 1].

    Phase one advances v = w^(-3/2); phase two finishes in w once the
    gamma term dominates.  Returns (terminal, xs, ws).
    """
    c = SQRT2 * b / SQRT5
    growth = 1.5 * c
    exponent = 10.0 / 3.0
    h = 1.0 / steps

    xs = np.empty(steps + 1)
    ws = np.empty(steps + 1)
    xs[0] = 0.0
    ws[0] = 1.0

    def v_slope(v: float) -> float:
        return growth * math.sqrt(1.0 + gamma * v**exponent)

    v = 1.0
    k = 0
    while k < steps and gamma * v**exponent < 1.0:
        x = k * h
        k1 = v_slope(v)
        k2 = v_slope(v + 0.5 * h * k1)
        k3 = v_slope(v + 0.5 * h * k2)
        k4 = v_slope(v + h * k3)
        v += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        k += 1
        xs[k] = k * h
        ws[k] = v ** (-2.0 / 3.0)
    if k == steps:
        xs[steps] = 1.0
        return float(ws[steps]), xs, ws

    def w_slope(x: float, w: float) -> float:
        rad = w**5 + gamma
        return -c * math.sqrt(rad) if rad > 0.0 else 0.0

    tail = rk4_integrate(w_slope, xs[k], float(ws[k]), 1.0, steps - k)
    xs[k:] = tail.xs
    ws[k:] = tail.ys
    return float(ws[steps]), xs, ws


def w0_integrate(b: float, exponent_r: float, steps: int | None = None):
    """Terminal and trajectory of the IVP with gamma = base^exponent_r.

    The terminal may be negative: past w = 0 the radicand is still
    positive while |w|^5 < gamma, and clamped to zero beyond.
    """
    if not b > 0.0:
        raise DomainError(f"b={b} must be > 0")
    if not exponent_r < 0.0:
        raise DomainError(f"exponent_r={exponent_r} must be < 0")
    if steps is None:
        steps = default_steps()
    if steps < 1:
        raise DomainError(f"steps={steps} must be >= 1")
    gamma = _growth_base(b) ** exponent_r
    terminal, xs, ws = _decay_profile(b, gamma, steps)
    return terminal, list(zip(xs.tolist(), ws.tolist()))


# ---------------------------------------------------------------------------
# bracketing the exponent
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LimitZeroResult:
    """Certified exponent bracket at one b.

    The subscripts on the terminals name the envelope side, not the end
    of the r interval: w_terminal_lower belongs to r_upper (faster decay,
    ends below zero, runs under the solution) and w_terminal_upper to
    r_lower.
    """

    b: float
    gamma: float
    r_lower: float
    r_upper: float
    w_terminal_lower: float
    w_terminal_upper: float
    u0p_terminal: float


def bracket_r(b: float, tol_r: float = TOL_R, steps: int | None = None) -> LimitZeroResult:
    """Bisect the exponent r until the terminal changes sign across an
    interval of width tol_r.

    Seeds come from r = -10/3 + rho/ln(b) with rho in [2.75, 2.84]; if
    they fail to straddle the sign change the interval is widened
    geometrically around the rho = 2.8 center before giving up.
    """
    if not b > 1.0:
        raise DomainError(f"b={b} must exceed 1 for the exponent seed")
    if not tol_r > 0.0:
        raise DomainError(f"tol_r={tol_r} must be > 0")
    if b < SOFT_MIN_B:
        warnings.warn(
            f"exponent seed is calibrated for b >= {SOFT_MIN_B:g}; b={b:g}"
            " may need widening",
            stacklevel=2,
        )
    if steps is None:
        steps = default_steps()

    log_b = math.log(b)
    center = -10.0 / 3.0 + SEED_RHO_CENTER / log_b
    half = 0.5 * (SEED_RHO_HIGH - SEED_RHO_LOW) / log_b

    def terminal(r: float) -> float:
        return _decay_profile(b, _growth_base(b) ** r, steps)[0]

    lo = hi = t_lo = t_hi = None
    for attempt in range(WIDEN_ATTEMPTS):
        width = half * 2.0**attempt
        cand_lo = center - width
        cand_hi = min(center + width, -1e-9)
        t_lo, t_hi = terminal(cand_lo), terminal(cand_hi)
        if t_lo > 0.0 > t_hi:
            lo, hi = cand_lo, cand_hi
            break
    if lo is None:
        raise NoBracketError(
            f"no sign change in w(1) around r={center} after"
            f" {WIDEN_ATTEMPTS} widenings (b={b})"
        )

    while hi - lo > tol_r:
        mid = 0.5 * (lo + hi)
        t_mid = terminal(mid)
        if t_mid > t_lo + MONOTONE_SLACK or t_mid < t_hi - MONOTONE_SLACK:
            raise OrderingError(
                f"terminal not monotone in r: w(1)={t_mid} at r={mid}"
                f" outside [{t_hi}, {t_lo}]"
            )
        if t_mid == 0.0:
            raise DegenerateError(f"terminal exactly zero at r={mid}")
        if t_mid > 0.0:
            lo, t_lo = mid, t_mid
        else:
            hi, t_hi = mid, t_mid

    return LimitZeroResult(
        b=float(b),
        gamma=gamma_of_b(b),
        r_lower=lo,
        r_upper=hi,
        w_terminal_lower=t_hi,
        w_terminal_upper=t_lo,
        u0p_terminal=u0_upper(b, 1.0),
    )


# ---------------------------------------------------------------------------
# independent check: bisection on gamma itself
# ---------------------------------------------------------------------------


def u0_oracle(b: float, tol: float = 1e-10, steps: int | None = None):
    """Bisect gamma directly until u(1) lands in [-tol, tol].

    Returns (gamma_star, terminal, samples).  gamma = 0 reproduces the
    closed-form envelope exactly, so the bracket starts at [0, 1] and
    the terminal decreases in gamma.
    """
    if not b > 0.0:
        raise DomainError(f"b={b} must be > 0")
    if not tol > 0.0:
        raise DomainError(f"tol={tol} must be > 0")
    if steps is None:
        steps = default_steps()

    g_lo, g_hi = 0.0, 1.0
    t_hi = _decay_profile(b, g_hi, steps)[0]
    widen = 0
    while t_hi > 0.0:
        g_hi *= 4.0
        t_hi = _decay_profile(b, g_hi, steps)[0]
        widen += 1
        if widen > 50:
            raise NoBracketError(f"u(1) stays positive up to gamma={g_hi}")

    gamma_star = 0.5 * (g_lo + g_hi)
    terminal, xs, ws = _decay_profile(b, gamma_star, steps)
    for _ in range(200):
        if abs(terminal) <= tol:
            break
        if terminal > 0.0:
            g_lo = gamma_star
        else:
            g_hi = gamma_star
        gamma_star = 0.5 * (g_lo + g_hi)
        terminal, xs, ws = _decay_profile(b, gamma_star, steps)
    return gamma_star, terminal, list(zip(xs.tolist(), ws.tolist()))
