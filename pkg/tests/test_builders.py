"""Tests for the concrete member builders, bands, and layer diagnostics."""

import math

import numpy as np
import pytest

from hcrband.builders import (
    BoundaryLayerReport,
    DerivativeBounds,
    boundary_layer,
    build_band,
    build_global_lower,
    build_global_upper,
    build_partial_lower,
    build_partial_upper,
    derivative_bounds,
    max_band_width,
    q_global_upper,
    variation_ratio_limit,
    width_grid,
)
from hcrband.errors import DomainError, NoRootError, PreconditionError
from hcrband.model import (
    ProblemParams,
    closed_form_y,
    envelope_slope,
    eps_tilde_bounds,
    solution_slope,
)

# Frozen member parameters at b=500, t=0.1 (the layer showcase row):
Q_UPPER_500 = 0.9996498036677631
GL_LOWER_C_500 = 1.3333333333291968
PU_EPS_500 = 1.0004783282766783
PU_Q_LISTING_500 = 0.9994252323559869
PU_Q_TEXT_500 = 0.9996507333145451
PU_C_500 = 0.9995219004116987
PL_Q_500 = 0.9874002712637043
PL_C_500 = 1.0006464175856407

# Frozen derivative bounds at b=10, t=0.3:
DB_DELTA_CAP = 0.13445300947529606
DB_DELTA_EST = 0.04150978830621583
DB_CLOSED_CAP = 0.5393685686952029
DB_SLOPE1 = 20.75486556074128
DB_SLOPE1_GAP = 0.0034981978035065974


def test_q_global_upper_range():
    ts = np.linspace(1e-6, 1.0 - 1e-6, 500)
    qs = np.array([q_global_upper(float(t)) for t in ts])
    assert np.all(qs >= math.sqrt(0.9) - 1e-12)
    assert np.all(qs <= 1.0)
    # the t -> 1 limit of the radicand is 6/(5 * 4/3) = 9/10
    assert q_global_upper(1.0 - 1e-9) == pytest.approx(math.sqrt(0.9), rel=1e-6)
    with pytest.raises(DomainError):
        q_global_upper(0.0)
    with pytest.raises(DomainError):
        q_global_upper(1.0)


def test_global_upper_member():
    p = ProblemParams(b=500.0, t=0.1)
    spec = build_global_upper(p)
    assert spec.eps == 1.0
    assert spec.C == 1.0
    assert spec.q == pytest.approx(Q_UPPER_500, rel=1e-14)
    assert float(closed_form_y(1.0, spec)) == pytest.approx(p.T, rel=1e-14)
    assert float(closed_form_y(0.0, spec)) >= 1.0


def test_global_upper_tanh_identity():
    # with eps = C = 1 the member is a shifted coth in z = y^1.5:
    # y(x) = tanh(atanh(t^1.5) + 1.5 sqrt(2) (B/q) (1-x))^(-2/3)
    for b, t in ((10.0, 0.3), (500.0, 0.1), (5.0, 0.6)):
        p = ProblemParams(b=b, t=t)
        spec = build_global_upper(p)
        xs = np.linspace(0.0, 1.0, 101)
        ys = closed_form_y(xs, spec)
        args = math.atanh(t**1.5) + 1.5 * math.sqrt(2.0) * (p.B / spec.q) * (
            1.0 - xs
        )
        ref = np.tanh(args) ** (-2.0 / 3.0)
        assert np.max(np.abs(ys - ref) / ref) < 1e-12


def test_derivative_bounds_frozen():
    db = derivative_bounds(ProblemParams(b=10.0, t=0.3))
    assert isinstance(db, DerivativeBounds)
    assert db.delta_cap == pytest.approx(DB_DELTA_CAP, rel=1e-12)
    assert db.delta_estimate == pytest.approx(DB_DELTA_EST, rel=1e-12)
    assert db.delta_closed_cap == pytest.approx(DB_CLOSED_CAP, rel=1e-12)
    assert db.slope1_lower == pytest.approx(DB_SLOPE1, rel=1e-12)
    assert db.slope1_gap == pytest.approx(DB_SLOPE1_GAP, rel=1e-12)


def test_derivative_bounds_invariants():
    for b, t in ((10.0, 0.3), (55.0, 0.1), (30.0, 0.7), (500.0, 0.1), (3.0, 0.8)):
        p = ProblemParams(b=b, t=t)
        db = derivative_bounds(p)
        assert 0.0 <= db.delta_estimate <= db.delta_cap
        assert db.delta_cap <= db.delta_closed_cap
        if p.B >= 1.0 / 3.0:
            assert db.delta_cap <= 100.0 / p.B**2 * math.exp(-6.0 * p.B)
        assert db.slope1_gap >= 0.0


def test_global_lower_member():
    p = ProblemParams(b=500.0, t=0.1)
    spec = build_global_lower(p)
    assert spec.eps == 0.75
    assert spec.q == 1.1
    assert spec.C == pytest.approx(GL_LOWER_C_500, rel=1e-12)
    assert float(closed_form_y(1.0, spec)) == pytest.approx(p.T, rel=1e-14)
    assert float(closed_form_y(0.0, spec)) <= 1.0


def test_global_lower_weak_coupling():
    with pytest.raises(NoRootError):
        build_global_lower(ProblemParams(b=2.0, t=0.5))


def test_partial_upper_members():
    p = ProblemParams(b=500.0, t=0.1)
    listing = build_partial_upper(p, iteration_rule="listing")
    text = build_partial_upper(p, iteration_rule="text")
    assert listing.eps == pytest.approx(PU_EPS_500, rel=1e-14)
    assert text.eps == listing.eps
    assert listing.q == pytest.approx(PU_Q_LISTING_500, rel=1e-13)
    assert text.q == pytest.approx(PU_Q_TEXT_500, rel=1e-13)
    assert listing.C == pytest.approx(PU_C_500, rel=1e-12)
    assert text.C == pytest.approx(PU_C_500, rel=1e-12)
    with pytest.raises(PreconditionError):
        build_partial_upper(p, iteration_rule="maple")


def test_partial_lower_member():
    p = ProblemParams(b=500.0, t=0.1)
    spec = build_partial_lower(p)
    assert spec.eps == eps_tilde_bounds(0.1)[1]
    assert spec.q == pytest.approx(PL_Q_500, rel=1e-13)
    assert spec.C == pytest.approx(PL_C_500, rel=1e-12)


def test_partial_upper_tracks_global_upper():
    # inside the layer the partial upper should hug the global upper:
    # the refined member never strays past 5% of the band width
    p = ProblemParams(b=500.0, t=0.1)
    gu = build_global_upper(p)
    pu = build_partial_upper(p, iteration_rule="listing")
    pl = build_partial_lower(p)
    xs = np.linspace(0.0, 1.0, 2001)
    mask = closed_form_y(xs, pl) >= math.sqrt(p.T)
    gap = np.max(np.abs(closed_form_y(xs, gu)[mask] - closed_form_y(xs, pu)[mask]))
    band = np.max(closed_form_y(xs, gu)[mask] - closed_form_y(xs, pl)[mask])
    assert gap <= 0.05 * band


def test_band_assembly_and_scope():
    p = ProblemParams(b=500.0, t=0.1)
    gband = build_band(p, "global")
    assert gband.scope == "global"
    assert gband.x_valid_min == 0.0
    pband = build_band(p, "partial")
    assert 0.0 < pband.x_valid_min < 1.0
    stamp = float(closed_form_y(pband.x_valid_min, pband.lower))
    assert stamp == pytest.approx(math.sqrt(p.T), rel=1e-9)
    with pytest.raises(PreconditionError):
        build_band(p, "sideways")


def test_band_ordering_inside_validity():
    for b, t, scope in (
        (500.0, 0.1, "global"),
        (500.0, 0.1, "partial"),
        (700.0, 0.2, "global"),
        (700.0, 0.2, "partial"),
        (10.0, 0.3, "global"),
    ):
        band = build_band(ProblemParams(b=b, t=t), scope)
        xs = np.linspace(band.x_valid_min, 1.0, 1501)
        wid = band.width_y(xs)
        assert np.all(wid >= -1e-12), f"band inverted at b={b}, t={t}, {scope}"


def test_envelopes_nondecreasing_in_x():
    p = ProblemParams(b=500.0, t=0.1)
    members = [
        build_global_upper(p),
        build_global_lower(p),
        build_partial_upper(p),
        build_partial_lower(p),
    ]
    xs = np.linspace(0.0, 1.0, 3001)
    for spec in members:
        ys = closed_form_y(xs, spec)
        assert np.all(np.diff(ys) >= -1e-13 * np.abs(ys[1:]))


def test_layer_width_table_row():
    # the showcase row: max gap over the layer ~0.027 in y, ~0.0027 in u
    band = build_band(ProblemParams(b=500.0, t=0.1), "partial",
                      iteration_rule="listing")
    wy, wu, x_at = max_band_width(band)
    assert wy == pytest.approx(0.027, rel=0.15)
    assert wu == pytest.approx(0.0027, rel=0.15)
    assert x_at > 0.99


def test_width_grid_resolves_layer():
    band = build_band(ProblemParams(b=1e6, t=2e-4), "global")
    xs = width_grid(band)
    assert np.all(np.diff(xs) > 0.0)
    # the argmax region sits ~1.5e-6 from the hot face; the grid must
    # place many abscissas inside that last sliver
    assert np.sum(xs > 1.0 - 1e-5) > 50
    wy, wu, x_at = max_band_width(band)
    assert wy == pytest.approx(41.5001, rel=1e-3)
    assert 1.0 - x_at == pytest.approx(1.551e-6, rel=0.05)


def test_boundary_layer_report():
    rep = boundary_layer(ProblemParams(b=70.0, t=0.1))
    assert isinstance(rep, BoundaryLayerReport)
    assert rep.strength == pytest.approx(39.363892763324436, rel=1e-12)
    assert not rep.has_layer
    rep2 = boundary_layer(ProblemParams(b=500.0, t=0.1))
    assert rep2.strength == pytest.approx(281.1706625951745, rel=1e-12)
    assert rep2.has_layer
    assert rep2.xi == pytest.approx(math.sqrt(5.0) / 500.0, rel=1e-15)


def test_boundary_layer_criterion_equivalence():
    rng = np.random.default_rng(20260816)
    for _ in range(200):
        b = float(10.0 ** rng.uniform(0.5, 6.0))
        t = float(rng.uniform(0.01, 0.99))
        p = ProblemParams(b=b, t=t)
        rep = boundary_layer(p)
        assert rep.has_layer == (p.B * p.T**1.25 >= 50.0)
        assert rep.has_layer == (b * t**0.25 >= 50.0 * math.sqrt(5.0))


def test_variation_ratio_layer_share():
    # the ratio is a function of t alone and never drops below ~0.53,
    # so a boundary layer always carries most of the total variation
    assert variation_ratio_limit(0.1) == pytest.approx(0.5898713739887502, rel=1e-12)
    ts = np.linspace(1e-4, 1.0 - 1e-4, 2001)
    vals = np.array([variation_ratio_limit(float(t)) for t in ts])
    assert np.all(vals > 0.5)
    assert abs(float(np.min(vals)) - 0.53) <= 0.02
    with pytest.raises(DomainError):
        variation_ratio_limit(1.5)


def test_variation_ratio_is_b_free():
    for b in (70.0, 500.0, 3.3e5):
        rep = boundary_layer(ProblemParams(b=b, t=0.1))
        assert rep.variation_ratio == pytest.approx(0.5898713739887502, rel=1e-12)


def test_partial_slope_anchor_holds():
    # the matched q keeps the member slope on the safe side of the
    # solution slope at the half height
    p = ProblemParams(b=500.0, t=0.1)
    db = derivative_bounds(p)
    root_T = math.sqrt(p.T)
    up = build_partial_upper(p, iteration_rule="listing")
    lo = build_partial_lower(p)
    assert envelope_slope(root_T, up) <= solution_slope(root_T, p.B, 0.0)
    assert envelope_slope(root_T, lo) >= solution_slope(root_T, p.B, db.delta_cap)
