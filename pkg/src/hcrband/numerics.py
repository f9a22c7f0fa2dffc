"""Saturation-safe scalar kernels, fixed-step RK4 and bisection.

The transcendental layer of this package lives in a region where
``tanh`` arguments reach several hundred, so the quantities of interest
are complements ``1 - tanh(x)`` of order ``exp(-2x)``.  Forming them by
subtraction destroys all information once ``x > 18`` or so.  The helpers
here keep the *argument* of the saturating function as the primary
datum and derive value and complement from it without cancellation:

    1 - tanh(x) = 2 exp(-2x) / (1 + exp(-2x))        (x >= 0)
    atanh(1 - d) = 0.5 * log(2/d - 1)                (0 < d < 2)

Integration is deliberately plain: the classical fixed-step fourth
order Runge-Kutta scheme, with a magnitude cap instead of adaptivity.
Stiff problems are handled upstream by a change of dependent variable,
never by step-size control.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import BlowupError, DomainError, NoBracketError

# Magnitude cap for trajectories; beyond this the integration is
# declared blown up rather than allowed to overflow to inf.
BLOWUP_CAP = 1e300


@dataclass(frozen=True)
class SaturatingArg:
    """A number x carried as the argument of tanh rather than its value.

    Keeping x itself makes both tanh(x) and the complement 1 - tanh(x)
    available at full relative precision for arbitrarily large x.
    """

    value: float

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise DomainError(f"saturating argument must be finite, got {self.value}")

    @property
    def tanh(self) -> float:
        return math.tanh(self.value)

    @property
    def complement(self) -> float:
        """1 - tanh(value), computed without forming 1 - (quantity near 1)."""
        x = self.value
        if x < 0:
            # no cancellation on this side, 1 - tanh(x) is in (1, 2)
            return 1.0 - math.tanh(x)
        e = math.exp(-2.0 * x)
        return 2.0 * e / (1.0 + e)


@dataclass(frozen=True)
class Complement:
    """Marker wrapper: the payload is d = 1 - c, not c itself."""

    delta: float


def tanh_sum(a: float, b: float) -> SaturatingArg:
    """tanh(a + b) in saturation-safe form.

    The sum is performed on the arguments, so the result's complement is
    accurate to machine precision even when tanh(a + b) rounds to 1.0.
    """
    return SaturatingArg(a + b)


def atanh_safe(c) -> float:
    """Inverse hyperbolic tangent accepting value, complement or SaturatingArg.

    For a complement d = 1 - c the identity atanh(1 - d) = 0.5*log(2/d - 1)
    avoids evaluating atanh near its pole.
    """
    if isinstance(c, SaturatingArg):
        if c.value > 0.25:
            return _atanh_from_complement(c.complement)
        return math.atanh(c.tanh)
    if isinstance(c, Complement):
        return _atanh_from_complement(c.delta)
    c = float(c)
    if not -1.0 < c < 1.0:
        raise DomainError(f"atanh argument must satisfy |c| < 1, got {c}")
    return math.atanh(c)


def _atanh_from_complement(d: float) -> float:
    if not 0.0 < d < 2.0:
        raise DomainError(f"complement must lie in (0, 2), got {d}")
    return 0.5 * math.log(2.0 / d - 1.0)


@dataclass(frozen=True)
class Grid:
    """Strictly increasing sample points spanning [0, 1] exactly."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        object.__setattr__(self, "points", pts)
        if pts.ndim != 1 or pts.size < 2:
            raise DomainError("grid needs at least two points")
        if pts[0] != 0.0 or pts[-1] != 1.0:
            raise DomainError("grid must span [0, 1] with exact endpoints")
        if not np.all(np.diff(pts) > 0):
            raise DomainError("grid points must be strictly increasing")

    @property
    def count(self) -> int:
        return int(self.points.size)

    @classmethod
    def uniform(cls, n: int) -> "Grid":
        if n < 2:
            raise DomainError("uniform grid needs n >= 2")
        return cls(np.linspace(0.0, 1.0, n))


@dataclass
class IntegrationResult:
    """Trajectory of a scalar IVP sampled at every RK4 step."""

    xs: np.ndarray
    ys: np.ndarray
    terminal: float
    blewup: bool = False

    def samples(self) -> Sequence[tuple]:
        return list(zip(self.xs.tolist(), self.ys.tolist()))


def rk4_integrate(
    f: Callable[[float, float], float],
    x0: float,
    y0: float,
    x1: float,
    steps: int,
) -> IntegrationResult:
    """Classical fixed-step RK4 from (x0, y0) to x = x1.

    x1 < x0 integrates backward (negative step).  The trajectory is
    sampled at every step.  If |y| exceeds BLOWUP_CAP the integration
    stops with BlowupError; no adaptivity of any kind is attempted.
    """
    if steps < 1:
        raise DomainError("rk4_integrate needs steps >= 1")
    if x1 == x0:
        raise DomainError("empty integration interval")
    h = (x1 - x0) / steps
    xs = [0.0] * (steps + 1)
    ys = [0.0] * (steps + 1)
    xs[0] = x0
    ys[0] = y = float(y0)
    half = 0.5 * h
    sixth = h / 6.0
    for i in range(1, steps + 1):
        x = x0 + (i - 1) * h
        k1 = f(x, y)
        k2 = f(x + half, y + half * k1)
        k3 = f(x + half, y + half * k2)
        k4 = f(x + h, y + h * k3)
        y = y + sixth * (k1 + 2.0 * (k2 + k3) + k4)
        if not abs(y) <= BLOWUP_CAP:  # catches NaN as well
            raise BlowupError(
                f"trajectory exceeded magnitude cap at x={x + h:.6g}",
                x=x + h,
                value=y,
            )
        xs[i] = x0 + i * h
        ys[i] = y
    xs[-1] = x1  # exact endpoint regardless of rounding in x0 + i*h
    return IntegrationResult(np.asarray(xs), np.asarray(ys), terminal=y)


def bisect(
    g: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = 1e-14,
    max_iter: int = 200,
) -> float:
    """Bisection for a sign change of g on [lo, hi].

    Returns the midpoint of the final interval.  Infinite g values are
    legal (they carry a usable sign); NaN is not.  Raises NoBracketError
    when g(lo) and g(hi) have the same strict sign.
    """
    if not lo < hi:
        raise DomainError(f"need lo < hi, got [{lo}, {hi}]")
    glo = g(lo)
    ghi = g(hi)
    if math.isnan(glo) or math.isnan(ghi):
        raise DomainError("g evaluated to NaN at a bracket endpoint")
    if glo == 0.0:
        return lo
    if ghi == 0.0:
        return hi
    if (glo > 0) == (ghi > 0):
        raise NoBracketError(
            f"no sign change on [{lo}, {hi}]: g(lo)={glo:.6g}, g(hi)={ghi:.6g}"
        )
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if hi - lo <= tol or mid <= lo or mid >= hi:
            break
        gm = g(mid)
        if math.isnan(gm):
            raise DomainError(f"g evaluated to NaN at {mid}")
        if gm == 0.0:
            return mid
        if (gm > 0) == (glo > 0):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
