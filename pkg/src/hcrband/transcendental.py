"""Certified brackets for the root of zeta = c(1 - c tanh(L c))/(c - tanh(L c)).

For fixed L > 0 the right-hand side, as a function of c on (c0, 1), falls
monotonically from +infinity to 1, where c0 = c0(L) is the largest fixed
point of c = tanh(L c) (zero when L <= 1, positive when L > 1).  For
zeta > 1 the equation therefore has at most one root, and closed-form
bracket pairs are available in three parameter regimes:

  small  (L < 1.5)        roots of a biquadratic obtained by replacing
                          tanh(L c) with the secant chords L c (1 - r L^2 c^2)
                          at slopes r = 0.35 (below) and r = 0.05 (above);
  mid    (1.5 <= L < 5)   one tanh-addition step away from the fixed point,
                          using the 30-fold iterate for c0;
  large  (L >= 5)         the same step started at tanh(L) itself, valid
                          while zeta <= exp(L).

Everything near c = 1 is handled through the complement d = 1 - c: for
large L the root and both bracket ends agree with 1 to hundreds of
digits, so values are carried as tanh arguments (SaturatingArg) and all
ordering decisions are made on complements, never on the saturated
values themselves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, NoRootError, PreconditionError, RegimeError
from .numerics import SaturatingArg, atanh_safe

# Beyond this L the complement of the root underflows float64 entirely.
LAM_MAX = 300.0

# Relative widening applied to reported bracket complements.  The noise
# floor of every quantity here is ~2A eps where A is the tanh argument
# (exp turns absolute argument error into relative value error), so the
# slack must grow linearly with A.
_EPS = math.ulp(1.0)


def _slack(arg: float) -> float:
    return 64.0 * _EPS * (1.0 + abs(arg))


def rhs(c: float, lam: float) -> float:
    """The decreasing side of the equation, with the pole mapped to +inf.

    Values of c at or below the fixed point (where c - tanh(L c) <= 0)
    return +inf so that root finders see a consistent sign.
    """
    if not 0.0 < c <= 1.0:
        raise DomainError(f"c must lie in (0, 1], got {c}")
    return rhs_complement(1.0 - c, lam)


def rhs_complement(delta: float, lam: float) -> float:
    """Same function evaluated at c = 1 - delta without cancellation.

    Writing p = 1 - tanh(L c), the identity

        c (1 - c tanh(Lc)) / (c - tanh(Lc)) = c (delta + p - delta p) / (p - delta)

    keeps full relative precision when both delta and p are tiny, which
    is the situation for L beyond ~18 where c and tanh(L c) both round
    to 1.0.  delta = 0 returns 1 (the continuous limit at c = 1).
    """
    if not 0.0 <= delta < 1.0:
        raise DomainError(f"complement must lie in [0, 1), got {delta}")
    if lam <= 0.0:
        raise DomainError(f"lam must be positive, got {lam}")
    c = 1.0 - delta
    p = SaturatingArg(lam * c).complement
    den = p - delta
    if den <= 0.0:
        return math.inf
    return c * (delta + p - delta * p) / den


def fixed_point_c0(lam: float, iterations: int = 30) -> float:
    """Iterate c <- tanh(L c) from c = 1 a fixed number of times.

    The iterates decrease monotonically toward the largest fixed point,
    so the result is always an upper bound for it.  Thirty rounds give
    ~1e-12 accuracy for L >= 1.5; convergence degrades to useless as
    L -> 1 (use converged_c0 there).
    """
    if lam <= 0.0:
        raise DomainError(f"lam must be positive, got {lam}")
    x = 1.0
    for _ in range(iterations):
        x = math.tanh(lam * x)
    return x


def converged_c0(lam: float) -> float:
    """Largest fixed point of c = tanh(L c), to full float precision.

    Exactly 0.0 for L <= 1 (tanh(L c) < c for every c > 0 there).  For
    L > 1 the root of tanh(L c) - c on (0, 1] is bisected directly,
    which stays fast arbitrarily close to L = 1 where the plain
    iteration slows to a crawl.
    """
    if lam <= 0.0:
        raise DomainError(f"lam must be positive, got {lam}")
    if lam <= 1.0:
        return 0.0
    g = lambda c: math.tanh(lam * c) - c
    lo, hi = 5e-324, 1.0
    if g(hi) >= 0.0:  # cannot happen for finite lam, defensive
        return hi
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if g(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class TranscendentalRoot:
    """Bisection solution of zeta = rhs(c), carried as value + complement."""

    zeta: float
    lam: float
    c: float
    delta: float  # 1 - c at full relative precision


def solve_c_exact(zeta: float, lam: float) -> TranscendentalRoot:
    """Solve zeta = rhs(c) on (c0, 1) by bisection in log(1 - c).

    Working in the complement keeps full relative precision however
    close the root sits to 1.  Preconditions: zeta > 1 always, and for
    L <= 1 additionally zeta (1 - L) < 1, without which the equation
    has no root (rhs never exceeds 1/(1 - L) there).
    """
    _check_inputs(zeta, lam)
    # g(log d) = rhs(1 - d) - zeta is increasing in d: 1 - zeta < 0 at
    # tiny d, +inf on the far side of the pole.
    lo, hi = math.log(1e-320), math.log(1.0 - 1e-16)
    for _ in range(220):
        mid = 0.5 * (lo + hi)
        if rhs_complement(math.exp(mid), lam) > zeta:
            hi = mid
        else:
            lo = mid
        if hi - lo < 1e-16:
            break
    delta = math.exp(0.5 * (lo + hi))
    return TranscendentalRoot(zeta=zeta, lam=lam, c=1.0 - delta, delta=delta)


def _check_inputs(zeta: float, lam: float) -> None:
    if lam <= 0.0:
        raise DomainError(f"lam must be positive, got {lam}")
    if lam > LAM_MAX:
        raise RegimeError(
            f"lam={lam} exceeds {LAM_MAX}; the root's distance from 1 underflows"
        )
    if not zeta > 1.0:
        raise PreconditionError(f"zeta must exceed 1, got {zeta}")
    if lam <= 1.0 and zeta * (1.0 - lam) >= 1.0:
        raise NoRootError(
            f"no root: for lam={lam} <= 1 the equation requires "
            f"zeta < 1/(1-lam) = {1.0 / (1.0 - lam):.6g}, got zeta={zeta}"
        )


@dataclass(frozen=True)
class TranscendentalBounds:
    """Certified two-sided bracket c_lower <= c* <= c_upper for the root.

    delta_lower and delta_upper are the complements 1 - c_lower and
    1 - c_upper at full relative precision; every ordering test should
    use them rather than the (possibly saturated) c values.  The
    reported interval is widened outward by a few hundred ulps relative
    to the raw formula values, so containment of the true root is
    preserved under float evaluation noise.
    """

    zeta: float
    lam: float
    regime: str  # "small" | "mid" | "large"
    c_lower: float
    c_upper: float
    delta_lower: float
    delta_upper: float

    @property
    def width(self) -> float:
        return self.delta_lower - self.delta_upper

    def contains(self, root: TranscendentalRoot) -> bool:
        return self.delta_upper <= root.delta <= self.delta_lower


def _pair_from_args(zeta, lam, regime, arg_minus, arg_plus) -> TranscendentalBounds:
    """Assemble bounds from tanh arguments, widening outward in complement."""
    d_lo = SaturatingArg(arg_minus).complement * (1.0 + _slack(arg_minus))
    d_up = SaturatingArg(arg_plus).complement * (1.0 - _slack(arg_plus))
    return TranscendentalBounds(
        zeta=zeta,
        lam=lam,
        regime=regime,
        c_lower=1.0 - d_lo,
        c_upper=1.0 - d_up,
        delta_lower=d_lo,
        delta_upper=d_up,
    )


def bracket_mid(zeta: float, lam: float) -> TranscendentalBounds:
    """One tanh-addition step from the iterated fixed point (1.5 <= L < 5).

    With g = c0/zeta for the lower end and the pole-slope correction
    1/(1 - L sech^2(L c0)) for the upper end:

        c_lower = tanh(L c0 + atanh(c0 / zeta))
        c_upper = tanh(L c0 + atanh(1 / zeta) / (1 - L / cosh^2(L c0)))

    Both remain valid (and stay useful) for any zeta > 1; they are also
    the fallback for L >= 5 when zeta > exp(L).
    """
    _check_inputs(zeta, lam)
    c0 = fixed_point_c0(lam)
    arg_minus = lam * c0 + atanh_safe(c0 / zeta)
    gap = 1.0 - lam / math.cosh(lam * c0) ** 2
    if gap <= 0.0:
        raise PreconditionError(
            f"pole-slope correction failed: L sech^2(L c0) >= 1 at lam={lam}"
        )
    arg_plus = lam * c0 + atanh_safe(1.0 / zeta) / gap
    return _pair_from_args(zeta, lam, "mid", arg_minus, arg_plus)


def bracket_large(zeta: float, lam: float) -> TranscendentalBounds:
    """Fixed point replaced by tanh(L) itself (L >= 5, zeta <= exp(L)).

        c_lower = tanh(L tanh(L) + atanh(tanh(L) / zeta))
        c_upper = tanh((atanh(1/zeta) + L (tanh L - L sech^2 L)) / (1 - L sech^2 L))

    The L sech^2 L factor is evaluated as 4 L e^{-2L} / (1 + e^{-2L})^2
    so it underflows gracefully instead of overflowing cosh.
    """
    _check_inputs(zeta, lam)
    if lam < 1.0:
        raise RegimeError(f"large-argument bracket needs lam >= 1, got {lam}")
    if math.log(zeta) > lam:
        raise RegimeError(
            f"large-argument bracket requires zeta <= exp(lam) "
            f"(log zeta = {math.log(zeta):.4g} > lam = {lam:.4g})"
        )
    th = math.tanh(lam)
    e2 = math.exp(-2.0 * lam)
    lsech2 = 4.0 * lam * e2 / (1.0 + e2) ** 2
    arg_minus = lam * th + atanh_safe(th / zeta)
    gap = 1.0 - lsech2
    arg_plus = (atanh_safe(1.0 / zeta) + lam * (th - lsech2)) / gap
    return _pair_from_args(zeta, lam, "large", arg_minus, arg_plus)


def bracket_small(zeta: float, lam: float) -> TranscendentalBounds:
    """Biquadratic secant-chord bracket for L < 1.5.

    Replacing tanh(L c) with L c (1 - r L^2 c^2) turns the equation into

        r L^2 c^4 - (1 + r zeta L^2) c^2 + (1 - zeta (1 - L))/L = 0,

    whose smaller positive root is decreasing in the chord slope r, so
    r = 0.35 gives the lower end and r = 0.05 the upper (clamped to 1;
    the biquadratic value may exceed it slightly without harm).  The
    constant term being positive is exactly the existence condition for
    L <= 1.
    """
    _check_inputs(zeta, lam)

    def c_of_rho(rho: float) -> float:
        ct = (1.0 - zeta * (1.0 - lam)) / lam
        disc = (1.0 - rho * zeta * lam * lam) ** 2 + 4.0 * rho * lam * (zeta - 1.0)
        if disc < 0.0:  # unreachable for zeta > 1, kept as a tripwire
            raise PreconditionError(f"negative discriminant at rho={rho}")
        c2 = 2.0 * ct / ((1.0 + rho * zeta * lam * lam) + math.sqrt(disc))
        if c2 <= 0.0:
            raise PreconditionError(f"nonpositive squared bound at rho={rho}")
        return math.sqrt(c2)

    c_lo = c_of_rho(0.35)
    c_up = min(c_of_rho(0.05), 1.0)
    # widen outward by a few ulps; margins in this regime are >= 1e-4
    for _ in range(4):
        c_lo = math.nextafter(c_lo, 0.0)
        c_up = math.nextafter(c_up, 2.0)
    c_up = min(c_up, 1.0)
    return TranscendentalBounds(
        zeta=zeta,
        lam=lam,
        regime="small",
        c_lower=c_lo,
        c_upper=c_up,
        delta_lower=1.0 - c_lo,
        delta_upper=1.0 - c_up,
    )


def bound_c(zeta: float, lam: float) -> TranscendentalBounds:
    """Certified bracket for the root, choosing the regime from L.

    L < 1.5 uses the biquadratic pair, 1.5 <= L < 5 the mid pair, and
    L >= 5 the large pair, falling back to the mid pair when zeta
    exceeds exp(L) there.
    """
    _check_inputs(zeta, lam)
    if lam < 1.5:
        return bracket_small(zeta, lam)
    if lam < 5.0:
        return bracket_mid(zeta, lam)
    try:
        return bracket_large(zeta, lam)
    except RegimeError:
        return bracket_mid(zeta, lam)
