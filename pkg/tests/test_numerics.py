"""Tests for the saturation-safe kernels and the integrators.

Reference values were computed independently with mpmath at >= 60
significant digits and are frozen here as literals.
"""

import math

import numpy as np
import pytest

from hcrband.errors import BlowupError, DomainError, NoBracketError
from hcrband.numerics import (
    Complement,
    Grid,
    SaturatingArg,
    atanh_safe,
    bisect,
    rk4_integrate,
    tanh_sum,
)

# mpmath (dps=60..300) oracles
COMPL_TANH_40 = 3.609702775690830344624257e-35
COMPL_TANH_300 = 5.300793106008621632677359e-261
ATANH_HALF = 0.5493061443340548456976226
ATANH_COMPL_1E20 = 23.37242452022042949488603
COMPL_TANH_07 = 0.3956322228828365036913128
TANH_075 = 0.6351489523872873192144344


def test_complement_matches_mpmath_in_deep_saturation():
    assert SaturatingArg(40.0).complement == pytest.approx(COMPL_TANH_40, rel=1e-15)
    assert SaturatingArg(300.0).complement == pytest.approx(COMPL_TANH_300, rel=1e-15)
    # naive subtraction is exactly 0.0 here, the whole point of the class
    assert 1.0 - math.tanh(40.0) == 0.0


def test_complement_agrees_with_subtraction_where_both_work():
    assert SaturatingArg(0.7).complement == pytest.approx(COMPL_TANH_07, rel=1e-15)
    for x in [-3.0, -0.5, 0.0, 0.2, 1.0, 5.0, 15.0]:
        direct = 1.0 - math.tanh(x)
        assert SaturatingArg(x).complement == pytest.approx(direct, rel=1e-13)


def test_tanh_sum_value_and_complement():
    s = tanh_sum(0.3, 0.45)
    assert s.tanh == pytest.approx(TANH_075, rel=1e-15)
    big = tanh_sum(120.0, 180.0)
    assert big.tanh == 1.0  # saturated as a float, by design
    assert big.complement == pytest.approx(COMPL_TANH_300, rel=1e-15)


def test_atanh_safe_plain_values():
    assert atanh_safe(0.5) == pytest.approx(ATANH_HALF, rel=1e-15)
    assert atanh_safe(-0.5) == pytest.approx(-ATANH_HALF, rel=1e-15)
    assert atanh_safe(0.0) == 0.0
    with pytest.raises(DomainError):
        atanh_safe(1.0)
    with pytest.raises(DomainError):
        atanh_safe(-1.2)


def test_atanh_safe_complement_path():
    assert atanh_safe(Complement(1e-20)) == pytest.approx(ATANH_COMPL_1E20, rel=1e-15)
    with pytest.raises(DomainError):
        atanh_safe(Complement(0.0))
    with pytest.raises(DomainError):
        atanh_safe(Complement(2.0))


def test_atanh_safe_saturating_dispatch():
    # small argument goes through the direct branch
    assert atanh_safe(SaturatingArg(0.1)) == pytest.approx(0.1, rel=1e-13)
    # large argument recovers itself through the complement branch
    assert atanh_safe(SaturatingArg(300.0)) == pytest.approx(300.0, rel=1e-15)


def test_tanh_atanh_round_trip_across_magnitudes():
    for a in [1e-6, 0.5, 2.0, 10.0, 50.0, 120.0, 300.0]:
        back = atanh_safe(SaturatingArg(a))
        assert back == pytest.approx(a, rel=1e-12)


def test_grid_validation_and_uniform():
    g = Grid.uniform(11)
    assert g.count == 11
    assert g.points[0] == 0.0 and g.points[-1] == 1.0
    with pytest.raises(DomainError):
        Grid(np.array([0.0, 0.5, 0.9]))
    with pytest.raises(DomainError):
        Grid(np.array([0.0, 0.6, 0.4, 1.0]))
    with pytest.raises(DomainError):
        Grid.uniform(1)


def test_rk4_order_four_on_exponential():
    f = lambda x, y: y
    coarse = rk4_integrate(f, 0.0, 1.0, 1.0, 20).terminal
    fine = rk4_integrate(f, 0.0, 1.0, 1.0, 40).terminal
    e = 2.718281828459045235360287
    ratio = abs(coarse - e) / abs(fine - e)
    assert 12.0 <= ratio <= 20.0  # halving h divides the error by ~2^4


def test_rk4_backward_integration():
    # integrate y' = y backward from x=1, y=e; should land on y(0)=1
    f = lambda x, y: y
    r = rk4_integrate(f, 1.0, math.e, 0.0, 200)
    assert r.terminal == pytest.approx(1.0, rel=1e-10)
    assert r.xs[0] == 1.0 and r.xs[-1] == 0.0
    assert np.all(np.diff(r.xs) < 0)


def test_rk4_trajectory_shape_and_endpoint():
    f = lambda x, y: -2.0 * x * y
    r = rk4_integrate(f, 0.0, 1.0, 1.0, 64)
    assert len(r.xs) == 65 and len(r.ys) == 65
    assert r.xs[-1] == 1.0
    assert r.terminal == pytest.approx(math.exp(-1.0), rel=1e-8)
    assert r.ys[-1] == r.terminal


def test_rk4_blowup_raises():
    f = lambda x, y: y * y  # finite-time blowup at x = 1
    with pytest.raises(BlowupError):
        rk4_integrate(f, 0.0, 2.0, 1.0, 10000)


def test_rk4_rejects_degenerate_calls():
    f = lambda x, y: y
    with pytest.raises(DomainError):
        rk4_integrate(f, 0.0, 1.0, 1.0, 0)
    with pytest.raises(DomainError):
        rk4_integrate(f, 0.5, 1.0, 0.5, 10)


def test_bisect_finds_simple_root():
    root = bisect(lambda x: x * x - 2.0, 0.0, 2.0, tol=1e-15)
    assert root == pytest.approx(math.sqrt(2.0), abs=1e-14)


def test_bisect_accepts_infinite_endpoint_values():
    # pole on the left of the root; sign information is still usable
    g = lambda x: 1.0 / (x - 0.25) - 4.0 if x != 0.25 else math.inf
    root = bisect(g, 0.2500000001, 1.0, tol=1e-14)
    assert root == pytest.approx(0.5, abs=1e-12)


def test_bisect_no_bracket():
    with pytest.raises(NoBracketError):
        bisect(lambda x: x * x + 1.0, -1.0, 1.0)


def test_bisect_exact_endpoint_roots():
    assert bisect(lambda x: x, 0.0, 1.0) == 0.0
    assert bisect(lambda x: x - 1.0, 0.0, 1.0) == 1.0
