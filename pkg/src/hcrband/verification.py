"""Certificates for envelope members and comparisons against shot trajectories.

A member of the closed-form family is a one-sided bound when two things
hold: its squared-slope gap F^2 - G^2 against the trajectory slope cannot
open in the wrong direction (a sign condition on the residue R), and the
comparison is anchored at one end of the height range.  certify() checks
these conditions on a dense height grid and raises CertificationError when
any of them fails, so a band that comes out of the builders is checked by
construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from .errors import CertificationError, OrderingError, PreconditionError
from .model import (
    EnvelopeBand,
    EnvelopeSpec,
    closed_form_y,
    envelope_slope,
    residue_derivative_form,
    residue_poly,
    solution_slope,
)

RESIDUE_GRID_POINTS = 2001


# ---------------------------------------------------------------------------
# certificates
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Certificate:
    """Outcome of the sign checks for one envelope member.

    residue_profile is (min, max) of R over the checked heights; for an
    upper member the max must not exceed the rounding margin, for a lower
    member the min must not fall below it.
    """

    kind: str
    residue_profile: tuple
    boundary_ok: bool
    ordering_ok: bool
    details: dict


def certify(
    spec: EnvelopeSpec,
    delta_cap: float | None = None,
    points: int = RESIDUE_GRID_POINTS,
) -> Certificate:
    """Check the conditions that make spec a one-sided bound.

    Upper members need R <= 0 on the height range so F^2 - G^2 is
    nonincreasing; with the anchor at the bottom of the range this keeps
    F <= G pointwise and the member above every trajectory.  Lower members
    need R >= 0 and the reverse anchor.  Global members run over heights
    [1, T] and are anchored by their boundary values; partial members run
    over [sqrt(T), T] and are anchored by a slope comparison at sqrt(T),
    against the steepest admissible trajectory (delta_cap) on the lower
    side.  Raises CertificationError when any check fails.
    """
    p = spec.params
    T = p.T
    kind = f"{spec.scope}-{spec.side}"
    y_bottom = 1.0 if spec.scope == "global" else math.sqrt(T)
    ys = np.linspace(y_bottom, T, points)
    r = residue_poly(ys, spec.q, spec.C, spec.eps)
    margin = 1e-12 * float(np.max(np.abs(r)))
    if spec.side == "upper":
        residue_ok = bool(np.all(r <= margin))
    else:
        residue_ok = bool(np.all(r >= -margin))
    profile = (float(np.min(r)), float(np.max(r)))

    y1 = float(closed_form_y(1.0, spec))
    boundary_ok = abs(y1 - T) <= 1e-12 * T

    details = {"y_bottom": y_bottom, "residue_margin": margin, "y1": y1}
    if spec.scope == "global":
        y0 = float(closed_form_y(0.0, spec))
        details["y0"] = y0
        if spec.side == "upper":
            ordering_ok = y0 >= 1.0 - 1e-12
        else:
            ordering_ok = y0 <= 1.0 + 1e-12
    else:
        y_anchor = math.sqrt(T)
        f_anchor = float(envelope_slope(y_anchor, spec))
        if spec.side == "upper":
            g_anchor = float(solution_slope(y_anchor, p.B, 0.0))
            ordering_ok = f_anchor <= g_anchor * (1.0 + 1e-9)
        else:
            if delta_cap is None:
                raise PreconditionError(
                    "certifying a partial lower member needs delta_cap, the"
                    " bound on the initial-slope parameter"
                )
            g_anchor = float(solution_slope(y_anchor, p.B, delta_cap))
            ordering_ok = f_anchor >= g_anchor * (1.0 - 1e-9)
        details["anchor_envelope_slope"] = f_anchor
        details["anchor_trajectory_slope"] = g_anchor

    cert = Certificate(
        kind=kind,
        residue_profile=profile,
        boundary_ok=bool(boundary_ok),
        ordering_ok=bool(ordering_ok),
        details=details,
    )
    if not (residue_ok and boundary_ok and ordering_ok):
        failed = [
            name
            for name, ok in (
                ("residue sign", residue_ok),
                ("boundary value", boundary_ok),
                ("ordering anchor", ordering_ok),
            )
            if not ok
        ]
        raise CertificationError(
            f"{kind} member failed: {', '.join(failed)};"
            f" residue profile {profile}, details {details}"
        )
    return cert


# ---------------------------------------------------------------------------
# comparison against the shooting oracle
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ComparisonReport:
    """Containment margins of a band around one shot trajectory.

    lower_margin / upper_margin are the smallest signed gaps
    (oracle - lower) and (upper - oracle) over the compared grid; both
    stay nonnegative up to rounding when the band contains the solution.
    """

    delta_star: float
    grid: np.ndarray
    lower_margin: float
    upper_margin: float
    max_width_y: float
    points_checked: int


def compare_to_oracle(
    band: EnvelopeBand,
    steps: int | None = None,
    grid_points: int = 201,
    atol: float = 1e-9,
    rtol: float = 1e-10,
) -> ComparisonReport:
    """Check that band contains the resolved trajectory, without interpolating.

    The trajectory is subsampled at exact step multiples, so steps must be
    divisible by grid_points - 1.  Partial bands are compared only where
    the trajectory satisfies y >= sqrt(T).  Raises OrderingError if any
    sampled point escapes the band beyond atol + rtol |y|.
    """
    from .shooting import oracle_solve

    p = band.params
    sol = oracle_solve(p, steps=steps)
    res = sol.trajectory
    if res.steps % (grid_points - 1) != 0:
        raise PreconditionError(
            f"steps={res.steps} is not divisible by grid_points-1="
            f"{grid_points - 1}; exact subsampling is impossible"
        )
    stride = res.steps // (grid_points - 1)
    xs = res.xs[::stride]
    ys = res.ys[::stride]
    if band.scope == "partial":
        keep = ys >= math.sqrt(p.T)
        xs, ys = xs[keep], ys[keep]
    ylo = np.asarray(band.y_lower(xs))
    yup = np.asarray(band.y_upper(xs))
    slack = atol + rtol * np.abs(ys)
    low_gap = ys - ylo
    up_gap = yup - ys
    if np.any(low_gap < -slack) or np.any(up_gap < -slack):
        i = int(np.argmin(np.minimum(low_gap, up_gap)))
        raise OrderingError(
            f"trajectory escapes the band at x={xs[i]:.6g}:"
            f" lower gap {low_gap[i]:.3e}, upper gap {up_gap[i]:.3e}"
        )
    return ComparisonReport(
        delta_star=sol.delta_star,
        grid=xs,
        lower_margin=float(np.min(low_gap)),
        upper_margin=float(np.min(up_gap)),
        max_width_y=float(np.max(yup - ylo)),
        points_checked=int(xs.size),
    )


# ---------------------------------------------------------------------------
# defect norm
# ---------------------------------------------------------------------------


def residue_l2_norm(spec: EnvelopeSpec, points: int = 4001) -> float:
    """L2(0, 1) norm of the slope-comparison defect along the member.

    The integrand is (1/2) d/dy (F^2 - G^2) evaluated at the member's own
    height profile; it measures how far the member is from solving the
    equation exactly, in slope-squared units.
    """
    xs = np.linspace(0.0, 1.0, points)
    ys = closed_form_y(xs, spec)
    vals = residue_derivative_form(ys, spec.q, spec.C, spec.eps, spec.params.B)
    return float(math.sqrt(simpson(np.asarray(vals) ** 2, x=xs)))
