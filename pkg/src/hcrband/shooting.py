"""Runge-Kutta bracketing of the transformed solution.

The two-point problem for y on [0, 1] (y(0) = 1, y(1) = T) is replaced by
initial value problems started from the known end,

    y'/sqrt(2) = B sqrt(y^5 - 5y + 4 + delta),   y(1) = T,

integrated backward to x = 0.  delta = 0 gives an upper trajectory, the
derivative cap delta = Delta a lower one, and the true solution sits in
between; bisection on delta pins it down.

Integration runs in the de-stiffened variable v := 1 - y^(-3/2), for
which

    v' = (3/sqrt(2)) B sqrt((1-a)^2 (4a^3+3a^2+2a+1) + delta a^5),
    a := (1-v)^(2/3),

a bounded, smooth right-hand side.  Two representation choices matter
at strong coupling, where terminal differences of order e^(-3B) sit far
below one ulp of 1.0: the radicand must use the factored form above
(the expanded 1 - 5a^4 + (4+delta) a^5 cancels catastrophically near
a = 1), and the carried state must be v rather than y^(-3/2) itself
(v shrinks along the backward run, so its floating-point grid refines
exactly where the trajectory creeps; the y-grid stalls at 1 +- ulp).
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .builders import derivative_bounds
from .errors import DomainError, NoBracketError
from .model import ProblemParams
from .numerics import rk4_integrate

DEFAULT_STEPS = 20_000
ORACLE_TOL = 1e-12
ORACLE_MAX_HALVINGS = 100
DELTA_UNDERFLOW = 1e-300


def default_steps() -> int:
    """Step count used when a caller does not pass one.

    The environment variable HCR_DEFAULT_STEPS overrides the built-in
    default; invalid values raise rather than being silently ignored.
    """
    raw = os.environ.get("HCR_DEFAULT_STEPS")
    if raw is None:
        return DEFAULT_STEPS
    try:
        steps = int(raw)
    except ValueError as exc:
        raise DomainError(f"HCR_DEFAULT_STEPS={raw!r} is not an integer") from exc
    if steps < 1:
        raise DomainError(f"HCR_DEFAULT_STEPS={steps} must be >= 1")
    return steps


# ---------------------------------------------------------------------------
# single shot
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ShootResult:
    """One backward integration, sampled at every step.

    xs runs from 1 down to 0 (integration order); ys is nonincreasing
    along the array, from T at x=1 toward about 1 at x=0.
    """

    delta: float
    xs: np.ndarray
    ys: np.ndarray
    terminal_y0: float
    steps: int
    blewup: bool = False

    def samples(self) -> Sequence[tuple]:
        return list(zip(self.xs.tolist(), self.ys.tolist()))


def _v_slope(B: float, delta: float):
    coeff = 1.5 * math.sqrt(2.0) * B

    def f(x: float, v: float) -> float:
        lw = (2.0 / 3.0) * math.log1p(-v)
        a = math.exp(lw)
        omc = -math.expm1(lw)
        rad = omc * omc * (((4.0 * a + 3.0) * a + 2.0) * a + 1.0)
        rad += delta * a * a * a * a * a
        return coeff * math.sqrt(rad)

    return f


def shoot(params: ProblemParams, delta: float, steps: int | None = None) -> ShootResult:
    """Integrate y' = sqrt(2) B sqrt(y^5-5y+4+delta) backward from y(1)=T.

    The radicand equals (y-1)^2 (y^3+2y^2+3y+4) + delta, so it stays
    nonnegative for delta >= 0 even if the trajectory crosses below 1.

    The backward flow decays toward y = 1 at rate 2 sqrt(5) B, so the
    explicit scheme needs steps >= roughly 3B for stability; far below
    that (B in the tens of thousands at the default count) the run
    diverges and the BlowupError from the integrator propagates.
    """
    if not (delta >= 0.0 and math.isfinite(delta)):
        raise DomainError(f"delta={delta} must be finite and >= 0")
    if steps is None:
        steps = default_steps()
    if steps < 1:
        raise DomainError(f"steps={steps} must be >= 1")
    v1 = -math.expm1(1.5 * math.log(params.t))
    res = rk4_integrate(_v_slope(params.B, delta), 1.0, v1, 0.0, steps)
    ys = np.exp((-2.0 / 3.0) * np.log1p(-res.ys))
    return ShootResult(
        delta=float(delta),
        xs=res.xs,
        ys=ys,
        terminal_y0=float(ys[-1]),
        steps=steps,
        blewup=res.blewup,
    )


# ---------------------------------------------------------------------------
# bracket width and the resolved solution
# ---------------------------------------------------------------------------


def bracket_error(params: ProblemParams, steps: int | None = None) -> tuple:
    """Max over the shared grid of y_RK+ - y_RK-, and ln(max)/B.

    y_RK+ is the delta=0 run, y_RK- the delta=Delta run with Delta the
    chord cap on the initial-slope parameter.  The maximum sits at x=0:
    the gap only grows as the integration moves away from the pinned end.
    """
    cap = derivative_bounds(params).delta_cap
    upper = shoot(params, 0.0, steps)
    lower = shoot(params, cap, steps)
    max_err = float(np.max(upper.ys - lower.ys))
    return max_err, math.log(max_err) / params.B


@dataclass(frozen=True)
class OracleSolution:
    """delta pinned by bisection plus the trajectory integrated with it."""

    delta_star: float
    trajectory: ShootResult


_ORACLE_CACHE: dict = {}


def oracle_solve(
    params: ProblemParams,
    tol: float = ORACLE_TOL,
    steps: int | None = None,
) -> OracleSolution:
    """Bisect delta in [0, Delta] until |y(0) - 1| <= tol.

    The terminal value decreases in delta, so the bracket is monotone.
    For very strong coupling Delta underflows; the bracket is then
    thinner than anything measurable in double precision and the delta=0
    run is returned outright.
    """
    if not tol > 0.0:
        raise DomainError(f"tol={tol} must be > 0")
    if steps is None:
        steps = default_steps()
    key = (params.b, params.t, steps, tol)
    hit = _ORACLE_CACHE.get(key)
    if hit is not None:
        return hit

    cap = derivative_bounds(params).delta_cap
    if cap < DELTA_UNDERFLOW:
        sol = OracleSolution(0.0, shoot(params, 0.0, steps))
        _ORACLE_CACHE[key] = sol
        return sol

    res_lo = shoot(params, 0.0, steps)
    g_lo = res_lo.terminal_y0 - 1.0
    if g_lo < -tol:
        raise NoBracketError(
            f"shoot with delta=0 ends at y(0)={res_lo.terminal_y0} < 1;"
            " the integrator is misconfigured"
        )
    best = (0.0, res_lo)
    if abs(g_lo) > tol:
        res_hi = shoot(params, cap, steps)
        g_hi = res_hi.terminal_y0 - 1.0
        if g_hi > tol:
            raise NoBracketError(
                f"shoot with delta=Delta={cap} ends at"
                f" y(0)={res_hi.terminal_y0} > 1; the cap fails to bracket"
            )
        lo, hi = 0.0, cap
        best = (cap, res_hi)
        for _ in range(ORACLE_MAX_HALVINGS):
            mid = 0.5 * (lo + hi)
            res_mid = shoot(params, mid, steps)
            g_mid = res_mid.terminal_y0 - 1.0
            best = (mid, res_mid)
            if abs(g_mid) <= tol:
                break
            if g_mid > 0.0:
                lo = mid
            else:
                hi = mid

    sol = OracleSolution(best[0], best[1])
    _ORACLE_CACHE[key] = sol
    return sol
