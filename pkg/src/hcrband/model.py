"""Problem data, the closed-form envelope family, and its residue algebra.

The two-point problem

    u'' = b^2 (u^4 - t^4),   u(0) = 1,  u(1) = t,   0 < t < 1,

is normalized by y = u/t on the reversed axis x |-> 1 - x, giving

    y'' = 5 B^2 (y^4 - 1),   y(0) = 1,  y(1) = T := 1/t,

with B := b t^1.5 / sqrt(5).  A first integral pins the slope to

    y' = sqrt(2) B sqrt(y^5 - 5y + 4 + delta),      delta = y'(0)^2 / (2 B^2),

so certified envelopes reduce to slope comparisons in y-space.  The
three-parameter family used for both envelope sides is, with z = y^1.5,

    z(x) = C (eps + k E) / (1 - k E),   E = exp(-3 sqrt(2) (B/q) C (1 - x)),
    k = (T^1.5 - eps C) / (T^1.5 + C),

which satisfies z(1) = T^1.5 identically and has the explicit slope

    F(y) = 2 sqrt(2) (B/q) (z - eps C)(z + C) / ((1 + eps) sqrt(y)).

The residue R(y, q, C, eps) defined below is, up to the positive factor
4 (B/q)^2 / (1+eps)^2, equal to (1/2) d/dy [F^2 - G^2] where
G = sqrt(2) B sqrt(y^5 - 5y + 4 + delta) for any constant delta; its
sign therefore controls whether the envelope/solution slope gap opens
or closes with height.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import (
    DegenerateError,
    DomainError,
    NoRootError,
    PreconditionError,
)
from .transcendental import bound_c, converged_c0

SQRT2 = math.sqrt(2.0)
SQRT5 = math.sqrt(5.0)


@dataclass(frozen=True)
class ProblemParams:
    """Problem constants b (coupling) and t (cold-end boundary value)."""

    b: float
    t: float

    def __post_init__(self):
        if not self.b > 0.0:
            raise DomainError(f"b must be positive, got {self.b}")
        if not 0.0 < self.t < 1.0:
            raise DomainError(f"t must lie in (0, 1), got {self.t}")

    @property
    def T(self) -> float:
        return 1.0 / self.t

    @property
    def B(self) -> float:
        return self.b * self.t**1.5 / SQRT5

    @property
    def L(self) -> float:
        return 1.5 * SQRT2 * self.B


@dataclass(frozen=True)
class EnvelopeSpec:
    """One member of the closed-form family, tagged with its intended role.

    side is "lower" or "upper", scope "global" (certified on y in [1, T])
    or "partial" (certified on y in [sqrt(T), T]).  The parameter window
    eps > 0, C > 0, eps C <= 1, q > 0 is what the construction routes
    can produce; eps C <= 1 in particular keeps k nonnegative.
    """

    params: ProblemParams
    side: str
    scope: str
    eps: float
    C: float
    q: float

    def __post_init__(self):
        if self.side not in ("lower", "upper"):
            raise DomainError(f"side must be 'lower' or 'upper', got {self.side!r}")
        if self.scope not in ("global", "partial"):
            raise DomainError(f"scope must be 'global' or 'partial', got {self.scope!r}")
        if not 0.0 < self.eps < 2.0:
            raise DomainError(f"eps must lie in (0, 2), got {self.eps}")
        if not self.C > 0.0:
            raise DomainError(f"C must be positive, got {self.C}")
        if self.eps * self.C > 1.0 + 1e-9:
            raise DomainError(
                f"need eps*C <= 1, got eps*C = {self.eps * self.C:.12g}"
            )
        if not (self.q > 0.0 and math.isfinite(self.q)):
            raise DomainError(f"q must be positive and finite, got {self.q}")

    @property
    def B_tilde(self) -> float:
        return self.params.B / self.q

    @property
    def k(self) -> float:
        t32 = self.params.T**1.5
        return (t32 - self.eps * self.C) / (t32 + self.C)


def closed_form_z(x, spec: EnvelopeSpec):
    """z(x) = y(x)^1.5 for the family member, scalar or ndarray in x.

    Clearing k = (T^1.5 - eps C)/(T^1.5 + C) from z = C (eps + k E)/(1 - k E)
    and writing 1 - E through expm1 gives

        z = C [T^1.5 (eps + E) + eps C (1 - E)]
              / [T^1.5 (1 - E) + C (1 + eps E)],

    a quotient of nonnegative sums: nothing cancels, nothing overflows,
    and x = 1 reproduces T^1.5 exactly however large T is.
    """
    x = np.asarray(x, dtype=float)
    a = 3.0 * SQRT2 * spec.B_tilde * spec.C * (1.0 - x)
    e_inv = np.exp(-a)
    one_minus_e = -np.expm1(-a)
    t32 = spec.params.T**1.5
    num = t32 * (spec.eps + e_inv) + spec.eps * spec.C * one_minus_e
    den = t32 * one_minus_e + spec.C * (1.0 + spec.eps * e_inv)
    if np.any(den <= 0.0):
        raise DegenerateError("vanishing denominator in the envelope family")
    z = spec.C * num / den
    if np.any(z <= 0.0):
        raise DegenerateError("nonpositive z in the envelope family")
    return z if z.ndim else float(z)


def closed_form_y(x, spec: EnvelopeSpec):
    """y(x) of the family member, scalar or ndarray in x."""
    z = np.asarray(closed_form_z(x, spec))
    y = z ** (2.0 / 3.0)
    return y if y.ndim else float(y)


def x_of_y(y, spec: EnvelopeSpec):
    """Explicit inverse of the family: the x at which it passes height y.

    From z = C (eps + k E)/(1 - k E) one gets E = (z - eps C)/(k (z + C)),
    then x = 1 - (-log E) / (3 sqrt(2) (B/q) C).  Heights outside the
    profile (E outside (0, 1]) raise DomainError.  Scalar or ndarray in y.
    """
    y = np.asarray(y, dtype=float)
    if np.any(y <= 0.0):
        raise DomainError("heights must be positive")
    z = y**1.5
    if spec.k == 0.0:
        raise DegenerateError("constant family member has no inverse")
    e_inv = (z - spec.eps * spec.C) / (spec.k * (z + spec.C))
    if np.any(e_inv <= 0.0) or np.any(e_inv > 1.0 + 1e-12):
        raise DomainError("some heights are not attained by this envelope")
    a = -np.log(np.minimum(e_inv, 1.0))
    x = 1.0 - a / (3.0 * SQRT2 * spec.B_tilde * spec.C)
    return x if x.ndim else float(x)


def envelope_slope(y, spec: EnvelopeSpec):
    """dy/dx of the family member as a function of its height,

        F(y) = 2 sqrt(2) (B/q) (z - eps C)(z + C) / ((1 + eps) sqrt(y)).
    """
    y = np.asarray(y, dtype=float)
    z = y**1.5
    f = (
        2.0
        * SQRT2
        * spec.B_tilde
        * (z - spec.eps * spec.C)
        * (z + spec.C)
        / ((1.0 + spec.eps) * np.sqrt(y))
    )
    return f if f.ndim else float(f)


def solution_slope(y, B: float, delta: float):
    """dy/dx of a true trajectory at height y: sqrt(2) B sqrt(y^5 - 5y + 4 + delta)."""
    y = np.asarray(y, dtype=float)
    rad = y**5 - 5.0 * y + 4.0 + delta
    rad = np.where(np.abs(rad) < 1e-13, np.maximum(rad, 0.0), rad)
    if np.any(rad < 0.0):
        raise DomainError("negative radicand in the slope integral")
    g = SQRT2 * B * np.sqrt(rad)
    return g if g.ndim else float(g)


def slope_threshold_q(y: float, eps: float, C: float, delta_cap: float) -> float:
    """Largest q for which the family slope clears the steepest trajectory.

    With s = 1/y and M(s) = sqrt(1 - 5 s^4 + (4 + delta_cap) s^5),

        q <= 2 (1 + (1-eps) C y^-1.5 - eps C^2 y^-3) / ((1+eps) M)

    holds exactly when F(y) >= sqrt(2) B sqrt(y^5 - 5y + 4 + delta_cap),
    for any B > 0 (B cancels).  Requires the numerator to be positive,
    i.e. the height must lie inside the envelope's rising range.
    """
    if y < 1.0:
        raise DomainError(f"threshold is defined for y >= 1, got {y}")
    s = 1.0 / y
    rad = 1.0 - 5.0 * s**4 + (4.0 + delta_cap) * s**5
    if rad < 0.0:
        raise DomainError("negative radicand in the slope threshold")
    m = math.sqrt(rad)
    num = 1.0 + (1.0 - eps) * C * y**-1.5 - eps * C * C * y**-3
    if num <= 0.0:
        raise DegenerateError(
            f"height y={y} is below the envelope's rising range (numerator {num:.3g})"
        )
    if m == 0.0:
        raise DegenerateError("zero steepest slope; threshold unbounded")
    return 2.0 * num / ((1.0 + eps) * m)


# ------------------------------------------------------------------
# residue algebra
# ------------------------------------------------------------------

def residue_coeffs(y, q: float, C: float):
    """Coefficients (a2, a1, a0) of R = a2 eps^2 + a1 eps + a0."""
    y = np.asarray(y, dtype=float)
    p = (5.0 - 5.0 * y**4) * q * q
    sq = np.sqrt(y)
    a2 = p / 4.0 + 2.0 * C * C * y + C**3 / sq - C**4 / y**2
    a1 = p / 2.0 - 7.0 * C * y**2 * sq - 8.0 * C * C * y - C**3 / sq
    a0 = 5.0 * y**4 + p / 4.0 + 7.0 * C * y**2 * sq + 2.0 * C * C * y
    return a2, a1, a0


def residue_poly(y, q: float, C: float, eps: float):
    """R(y, q, C, eps), a quadratic in eps; R(1, 1, 1, eps) = 2(eps-1)(eps-7)."""
    a2, a1, a0 = residue_coeffs(y, q, C)
    r = (a2 * eps + a1) * eps + a0
    r = np.asarray(r)
    return r if r.ndim else float(r)


def residue(y, q: float, C: float, eps: float, B: float):
    """Scaled residue B^2 R: same sign as R, magnitude in slope-squared units."""
    r = np.asarray(residue_poly(y, q, C, eps)) * B * B
    return r if r.ndim else float(r)


def residue_derivative_form(y, q: float, C: float, eps: float, B: float):
    """(1/2) d/dy [F^2 - G^2] = (4 (B/q)^2 / (1+eps)^2) R.

    This is the exact pointwise defect of the slope comparison; its sign
    says whether the envelope/trajectory gap opens (positive) or closes
    with increasing height.
    """
    bt = B / q
    scale = 4.0 * bt * bt / (1.0 + eps) ** 2
    r = np.asarray(residue_poly(y, q, C, eps)) * scale
    return r if r.ndim else float(r)


def eps_root(y: float, q: float, C: float, target: float = 0.0) -> float:
    """The eps nearest 1 with R(y, q, C, eps) = target.

    Solved as a quadratic with the cancellation-stable split; raises
    NoRootError when the discriminant is negative.
    """
    a2, a1, a0 = residue_coeffs(np.float64(y), q, C)
    a2, a1, a0 = float(a2), float(a1), float(a0 - target)
    if a2 == 0.0:
        if a1 == 0.0:
            raise NoRootError("residue does not depend on eps here")
        return -a0 / a1
    disc = a1 * a1 - 4.0 * a2 * a0
    if disc < 0.0:
        raise NoRootError(f"no real eps root (discriminant {disc:.6g})")
    sd = math.sqrt(disc)
    qs = -0.5 * (a1 + math.copysign(sd, a1))
    roots = []
    if qs != 0.0:
        roots.append(qs / a2)
        roots.append(a0 / qs)
    else:
        roots.extend([sd / (2 * a2), -sd / (2 * a2)])
    return min(roots, key=lambda r: abs(r - 1.0))


def eps_tilde_bounds(s: float) -> tuple:
    """Two-sided eps window pinned at height 1/s, for s in (0, 1].

        lower(s) = 1 - (4/5) s^3 + (3/5) s^4
        upper(s) = 1 - (4/5) s^3 + ((8 - 3 s)/5) s^4

    Along y = 1/s with q = C = 1 the residue satisfies R >= 2 at the
    lower value and R <= -2/3 at the upper one (limits 2 and -3 as
    s -> 0), so every sign-change eps is trapped between them.
    """
    if not 0.0 < s <= 1.0:
        raise DomainError(f"s must lie in (0, 1], got {s}")
    lo = 1.0 - 0.8 * s**3 + 0.6 * s**4
    hi = 1.0 - 0.8 * s**3 + (8.0 - 3.0 * s) / 5.0 * s**4
    return lo, hi


# ------------------------------------------------------------------
# reduction of the C-equation to the transcendental bracket problem
# ------------------------------------------------------------------

def c_to_C(c: float, eps: float) -> float:
    """The substitution C = 2c / ((1+eps) - (1-eps) c), increasing in c."""
    den = (1.0 + eps) - (1.0 - eps) * c
    if den <= 0.0:
        raise DomainError(f"substitution denominator vanished (c={c}, eps={eps})")
    return 2.0 * c / den


def C_from_delta(delta: float, eps: float) -> float:
    """Same substitution written in d = 1-c: C = 2(1-d) / (2 eps + (1-eps) d).

    Free of cancellation when c is within rounding of 1, where the plain
    form loses the entire distance to the limit value 1/eps.
    """
    den = 2.0 * eps + (1.0 - eps) * delta
    if den <= 0.0:
        raise DomainError(f"substitution denominator vanished (delta={delta})")
    return 2.0 * (1.0 - delta) / den


@dataclass(frozen=True)
class CReduction:
    """The boundary equation z(0) = 1 recast as a bracketable root problem.

    Writing the family's free-constant equation k(C) e^{-2 Lt C} =
    (1 - eps C)/(1 + C) with Lt = 1.5 sqrt(2) B / q, the substitution
    C = C(c) collapses it to atanh(c) = atanh(c / zeta(c)) + lam(c) c,
    i.e. the transcendental root problem, with

        zeta(C) = (T^1.5 + (1-eps)/2 C) / (1 + (1-eps)/2 C)   (decreasing)
        lam(c)  = 2 Lt / ((1+eps) - (1-eps) c)   in  [lam_floor, lam_ceil].

    Freezing (zeta, lam) at opposite corners turns the monotone root
    into certified one-sided values: the (zeta_conservative, lam_floor)
    corner underestimates c, the (zeta_liberal, lam_ceil) corner
    overestimates it.
    """

    T: float
    eps: float
    q: float
    L_tilde: float
    lam_floor: float
    lam_ceil: float
    zeta_conservative: float  # largest zeta over the admissible C window
    zeta_liberal: float  # smallest
    C_min: float
    C_max: float

    def zeta_of_C(self, C: float) -> float:
        g = 0.5 * (1.0 - self.eps) * C
        return (self.T**1.5 + g) / (1.0 + g)

    def lam_of_c(self, c: float) -> float:
        return 2.0 * self.L_tilde / ((1.0 + self.eps) - (1.0 - self.eps) * c)

    def equation_residual(self, C: float) -> float:
        """Signed log-form defect of k(C) e^{-2 Lt C} = (1 - eps C)/(1 + C).

        Needs eps C strictly below 1 in float; at strong coupling where
        C saturates against 1/eps use equation_residual_delta instead.
        """
        t32 = self.T**1.5
        if not 0.0 < C * self.eps < 1.0:
            raise DomainError(
                f"C={C} outside (0, 1/eps) in float; use the delta form"
            )
        k = (t32 - self.eps * C) / (t32 + C)
        return (
            math.log(k)
            - 2.0 * self.L_tilde * C
            - math.log((1.0 - self.eps * C) / (1.0 + C))
        )

    def equation_residual_delta(self, delta: float) -> float:
        """The same defect parametrized by d = 1 - c, cancellation-free.

        Under the substitution, (1 - eps C)/(1 + C) collapses to
        d/(2 - d), which stays exact however close C is to 1/eps.
        """
        if not 0.0 < delta < 1.0:
            raise DomainError(f"delta must lie in (0, 1), got {delta}")
        t32 = self.T**1.5
        C = C_from_delta(delta, self.eps)
        k = (t32 - self.eps * C) / (t32 + C)
        return (
            math.log(k)
            - 2.0 * self.L_tilde * C
            - math.log(delta / (2.0 - delta))
        )

    def solve_C(self) -> tuple:
        """Self-consistent (c*, delta*, C*) of the full boundary equation.

        Solves g(c) = atanh(c) - atanh(c / zeta(C(c))) - lam(c) c = 0 by
        bisection in log(1 - c): for strong coupling the root's distance
        from 1 is exponentially small, far below float resolution of c
        itself.  g -> +inf as c -> 1, so a sign change exists exactly
        when g < 0 somewhere, which fails for weak coupling
        (2 Lt T^1.5 <= (1+eps)(T^1.5 - 1)); NoRootError then.
        """
        from .numerics import Complement, atanh_safe

        def g_of_delta(d: float) -> float:
            c = 1.0 - d
            C = C_from_delta(d, self.eps)
            return (
                atanh_safe(Complement(d))
                - math.atanh(c / self.zeta_of_C(C))
                - self.lam_of_c(c) * c
            )

        lo, hi = math.log(1e-320), math.log(1.0 - 1e-9)
        if g_of_delta(math.exp(hi)) > 0.0:
            raise NoRootError(
                "boundary equation has no self-consistent root (coupling too weak)"
            )
        for _ in range(220):
            mid = 0.5 * (lo + hi)
            if g_of_delta(math.exp(mid)) > 0.0:
                lo = mid
            else:
                hi = mid
            if hi - lo < 1e-16:
                break
        delta_star = math.exp(0.5 * (lo + hi))
        return 1.0 - delta_star, delta_star, C_from_delta(delta_star, self.eps)


def reduce_C_equation(params: ProblemParams, eps: float, q: float) -> CReduction:
    """Build the reduction data for given flattening eps and slope factor q.

    The admissible window is C in [c0(lam_floor), 1/eps): the fixed
    point bounds C from below (the root c always exceeds it and C(c)
    >= c... >= c0), and C(c) < C(1) = 1/eps from above.  zeta is
    decreasing in C, so the window corners give the conservative and
    liberal zeta values used by the one-sided routes.
    """
    if not 0.0 < eps < 2.0:
        raise DomainError(f"eps must lie in (0, 2), got {eps}")
    if not q > 0.0:
        raise DomainError(f"q must be positive, got {q}")
    L_tilde = params.L / q
    lam_floor = L_tilde
    lam_ceil = L_tilde / eps
    c0_floor = converged_c0(lam_floor)
    g = 0.5 * (1.0 - eps)
    t32 = params.T**1.5
    zeta_conservative = (t32 + g * c0_floor) / (1.0 + g * c0_floor)
    zeta_liberal = (t32 + g / eps) / (1.0 + g / eps)
    return CReduction(
        T=params.T,
        eps=eps,
        q=q,
        L_tilde=L_tilde,
        lam_floor=lam_floor,
        lam_ceil=lam_ceil,
        zeta_conservative=zeta_conservative,
        zeta_liberal=zeta_liberal,
        C_min=c0_floor,
        C_max=1.0 / eps,
    )


def C_route_lower(red: CReduction) -> float:
    """Certified underestimate of the boundary constant C.

    Uses the bracket's lower end at the (conservative zeta, floor lam)
    corner; both freezings push the root down, so the image under the
    increasing map C(c) is a guaranteed lower value.
    """
    bounds = bound_c(red.zeta_conservative, red.lam_floor)
    return C_from_delta(bounds.delta_lower, red.eps)


def C_route_upper(red: CReduction) -> float:
    """Certified overestimate of the boundary constant C (liberal corner)."""
    bounds = bound_c(red.zeta_liberal, red.lam_ceil)
    return C_from_delta(bounds.delta_upper, red.eps)


# ------------------------------------------------------------------
# the paired band
# ------------------------------------------------------------------

@dataclass(frozen=True)
class EnvelopeBand:
    """A lower/upper envelope pair enclosing every admissible trajectory.

    For scope "partial" the enclosure is certified only at heights
    y >= sqrt(T); x_valid_min is the abscissa where the guaranteed
    region starts (0 for global bands).
    """

    params: ProblemParams
    scope: str
    lower: EnvelopeSpec
    upper: EnvelopeSpec
    x_valid_min: float = 0.0

    def y_lower(self, x):
        return closed_form_y(x, self.lower)

    def y_upper(self, x):
        return closed_form_y(x, self.upper)

    def u_lower(self, xu):
        """Lower envelope in original coordinates: u(xu) = t y(1 - xu)."""
        return self.params.t * np.asarray(self.y_lower(1.0 - np.asarray(xu, dtype=float)))

    def u_upper(self, xu):
        return self.params.t * np.asarray(self.y_upper(1.0 - np.asarray(xu, dtype=float)))

    def width_y(self, x):
        w = np.asarray(self.y_upper(x)) - np.asarray(self.y_lower(x))
        return w if w.ndim else float(w)

    def width_u(self, xu):
        w = np.asarray(self.u_upper(xu)) - np.asarray(self.u_lower(xu))
        return w if w.ndim else float(w)
