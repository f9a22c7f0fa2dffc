"""Tests for the Runge-Kutta bracketing scheme.

Reference terminals, bracket widths, and the crossing abscissa below were
frozen from a 50-digit quadrature of the separated slope field (the IVP is
autonomous in y, so x(y) is an integral of 1/y'), cross-checked against an
adaptive stiff integrator at rtol 1e-12.
"""

import math
import os

import numpy as np
import pytest

from hcrband.builders import derivative_bounds
from hcrband.errors import BlowupError, DomainError
from hcrband.model import ProblemParams
from hcrband.shooting import (
    DEFAULT_STEPS,
    ShootResult,
    bracket_error,
    default_steps,
    oracle_solve,
    shoot,
)

WEAK = ProblemParams(b=10.0, t=0.3)
MID = ProblemParams(b=55.0, t=0.1)
STRONG = ProblemParams(b=30.0, t=0.7)

# quadrature references at (b=10, t=0.3)
TERMINAL_DELTA_005 = 1.0071576337825413
TERMINAL_DELTA_0 = 1.0374261770541535
TERMINAL_DELTA_CAP = 0.9575776457283645
X_AT_Y2_DELTA_005 = 0.8721255620660633
DELTA_STAR_WEAK = 0.06199455009873083

# bracket widths max(y_RK+ - y_RK-) and ln(width)/B
GAP_WEAK = 0.0798485313257890
LOG_RATIO_WEAK = -3.4396603140873781
GAP_MID = 0.0877985760875208
LOG_RATIO_MID = -3.1276104271658116
GAP_STRONG = 5.2252443799383288e-11
LOG_RATIO_STRONG = -3.0130439926719525


# ---------------------------------------------------------------------------
# single shots against quadrature references
# ---------------------------------------------------------------------------


def test_terminal_matches_quadrature_weak():
    res = shoot(WEAK, 0.05)
    assert res.steps == DEFAULT_STEPS
    assert abs(res.terminal_y0 - TERMINAL_DELTA_005) <= 1e-13


def test_terminal_endpoints_of_delta_range():
    cap = derivative_bounds(WEAK).delta_cap
    upper = shoot(WEAK, 0.0)
    lower = shoot(WEAK, cap)
    assert abs(upper.terminal_y0 - TERMINAL_DELTA_0) <= 1e-13
    assert abs(lower.terminal_y0 - TERMINAL_DELTA_CAP) <= 1e-13
    assert upper.terminal_y0 >= 1.0 >= lower.terminal_y0


def test_trajectory_brackets_known_crossing():
    res = shoot(WEAK, 0.05)
    k = int(np.argmax(res.ys <= 2.0))
    assert res.ys[k - 1] > 2.0 >= res.ys[k]
    assert res.xs[k] <= X_AT_Y2_DELTA_005 <= res.xs[k - 1]


def test_shot_trajectory_shape():
    res = shoot(WEAK, 0.05, steps=400)
    assert isinstance(res, ShootResult)
    assert not res.blewup
    assert len(res.xs) == 401
    assert res.xs[0] == 1.0 and res.xs[-1] == 0.0
    assert np.all(np.diff(res.xs) < 0.0)
    assert np.all(np.diff(res.ys) <= 0.0)
    assert res.ys[0] == pytest.approx(WEAK.T, rel=1e-15)
    assert res.terminal_y0 == res.ys[-1]
    pairs = res.samples()
    assert pairs[0] == (1.0, res.ys[0]) and pairs[-1][0] == 0.0


def test_strong_coupling_terminal_pins_to_one():
    res = shoot(STRONG, 0.0)
    assert 0.0 <= res.terminal_y0 - 1.0 <= 5e-16


def test_rk4_order_visible_in_terminal():
    terminals = {n: shoot(WEAK, 0.05, steps=n).terminal_y0 for n in (250, 500, 1000)}
    ratio = (terminals[250] - terminals[500]) / (terminals[500] - terminals[1000])
    assert 12.0 <= ratio <= 20.0


def test_shoot_rejects_bad_arguments():
    with pytest.raises(DomainError):
        shoot(WEAK, -1e-9)
    with pytest.raises(DomainError):
        shoot(WEAK, math.inf)
    with pytest.raises(DomainError):
        shoot(WEAK, 0.05, steps=0)


def test_blowup_propagates_when_steps_cannot_resolve_decay():
    stiff = ProblemParams(b=1e6, t=0.3)
    with pytest.raises(BlowupError):
        shoot(stiff, 0.0, steps=1000)


# ---------------------------------------------------------------------------
# bracket width
# ---------------------------------------------------------------------------


def test_bracket_error_weak():
    max_err, log_ratio = bracket_error(WEAK)
    assert max_err == pytest.approx(GAP_WEAK, rel=1e-12)
    assert log_ratio == pytest.approx(LOG_RATIO_WEAK, abs=1e-11)


def test_bracket_error_mid():
    max_err, log_ratio = bracket_error(MID)
    assert max_err == pytest.approx(GAP_MID, rel=1e-12)
    assert log_ratio == pytest.approx(LOG_RATIO_MID, abs=1e-11)


def test_bracket_error_strong():
    # the width itself sits ~5e-6 ulp of 1.0, so output rounding caps the
    # attainable relative agreement near 4e-6
    max_err, log_ratio = bracket_error(STRONG)
    assert max_err == pytest.approx(GAP_STRONG, rel=2e-5)
    assert log_ratio == pytest.approx(LOG_RATIO_STRONG, abs=3e-6)


def test_bracket_error_step_halving_stable():
    for p, ref in ((WEAK, GAP_WEAK), (STRONG, GAP_STRONG)):
        full, _ = bracket_error(p)
        half, _ = bracket_error(p, steps=DEFAULT_STEPS // 2)
        assert abs(half - full) <= 0.01 * full
        assert full == pytest.approx(ref, rel=2e-5)


def test_error_function_decreasing_and_maximal_at_zero():
    cap = derivative_bounds(WEAK).delta_cap
    upper = shoot(WEAK, 0.0)
    lower = shoot(WEAK, cap)
    err = upper.ys - lower.ys
    assert np.min(np.diff(err)) >= -1e-15
    assert err[-1] == np.max(err)
    assert err[0] <= 1e-15


def test_u_error_is_t_times_y_error():
    cap = derivative_bounds(WEAK).delta_cap
    upper = shoot(WEAK, 0.0)
    lower = shoot(WEAK, cap)
    u_err = WEAK.t * upper.ys - WEAK.t * lower.ys
    y_err = upper.ys - lower.ys
    # pointwise up to rounding of the products, exact in the maximum
    assert np.allclose(u_err, WEAK.t * y_err, rtol=1e-12, atol=1e-14)
    assert float(np.max(u_err)) == pytest.approx(
        WEAK.t * float(np.max(y_err)), rel=1e-12
    )


# ---------------------------------------------------------------------------
# resolving delta by bisection
# ---------------------------------------------------------------------------


def test_oracle_solve_weak():
    sol = oracle_solve(WEAK)
    assert abs(sol.delta_star - DELTA_STAR_WEAK) <= 5e-12
    assert abs(sol.trajectory.terminal_y0 - 1.0) <= 1e-12
    assert sol.trajectory.delta == sol.delta_star


def test_oracle_between_brackets_pointwise():
    for p in (WEAK, MID, STRONG):
        cap = derivative_bounds(p).delta_cap
        sol = oracle_solve(p)
        upper = shoot(p, 0.0)
        lower = shoot(p, cap)
        assert np.min(upper.ys - sol.trajectory.ys) >= 0.0
        assert np.min(sol.trajectory.ys - lower.ys) >= 0.0


def test_delta_star_within_cap_and_decay_bound():
    for p in (WEAK, MID):
        cap = derivative_bounds(p).delta_cap
        sol = oracle_solve(p)
        assert 0.0 <= sol.delta_star <= cap
        assert p.B >= 1.0 / 3.0
        assert sol.delta_star <= 100.0 * p.B**-2 * math.exp(-6.0 * p.B)


def test_oracle_short_circuits_when_already_converged():
    # terminal of the delta=0 run is within tolerance of 1, so no
    # bisection is needed
    sol = oracle_solve(STRONG)
    assert sol.delta_star == 0.0
    assert abs(sol.trajectory.terminal_y0 - 1.0) <= 1e-12


def test_oracle_short_circuits_on_underflowed_cap():
    p = ProblemParams(b=1e5, t=0.1)
    assert derivative_bounds(p).delta_cap == 0.0
    sol = oracle_solve(p)
    assert sol.delta_star == 0.0
    assert sol.trajectory.terminal_y0 == 1.0


def test_oracle_solve_caches_repeat_calls():
    a = oracle_solve(WEAK)
    b = oracle_solve(WEAK)
    assert a is b
    c = oracle_solve(WEAK, steps=10_000)
    assert c is not a


def test_oracle_rejects_bad_tolerance():
    with pytest.raises(DomainError):
        oracle_solve(WEAK, tol=0.0)


# ---------------------------------------------------------------------------
# default step plumbing
# ---------------------------------------------------------------------------


def test_default_steps_env_override():
    old = os.environ.get("HCR_DEFAULT_STEPS")
    try:
        os.environ["HCR_DEFAULT_STEPS"] = "321"
        assert default_steps() == 321
        res = shoot(WEAK, 0.05)
        assert res.steps == 321 and len(res.xs) == 322
        os.environ["HCR_DEFAULT_STEPS"] = "abc"
        with pytest.raises(DomainError):
            default_steps()
        os.environ["HCR_DEFAULT_STEPS"] = "0"
        with pytest.raises(DomainError):
            default_steps()
    finally:
        if old is None:
            os.environ.pop("HCR_DEFAULT_STEPS", None)
        else:
            os.environ["HCR_DEFAULT_STEPS"] = old
    assert default_steps() == DEFAULT_STEPS
