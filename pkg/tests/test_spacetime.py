import math

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from precollapse.constants import SPEED_OF_LIGHT as C
from precollapse.spacetime import (
    CollapseFront,
    Event,
    GeometryError,
    IntervalKind,
    InvalidBoost,
    Worldline,
    boost_event,
    classify_interval,
    coherent_region_contains,
    collapse_speed_bound,
    in_collapsed_region,
    interval,
    precollapse_apex,
    precollapse_duration,
    transform_velocity,
)

NS = 1e-9
A = Event(0.0, -1.5)
B = Event(0.0, 1.5)

times = st.floats(-1e-7, 1e-7, allow_nan=False)
coords = st.floats(-30.0, 30.0, allow_nan=False)
events = st.builds(Event, times, coords, coords, coords)
boosts = st.floats(-0.99 * C, 0.99 * C)


# -- boosts and velocities ---------------------------------------------------

def test_boost_origin_is_fixed():
    assert boost_event(Event(0.0), 0.7 * C) == Event(0.0)


def test_identity_boost():
    e = Event(1.0, 2.0, 3.0, 4.0)
    assert boost_event(e, 0.0) == e


def test_boost_hand_evaluated():
    e = boost_event(Event(0.0, 1.0), 0.6 * C)
    # gamma = 1.25, t' = -gamma * 0.6 / c
    assert e.t == pytest.approx(-2.5017307139861402e-09, rel=1e-12)
    assert e.x == pytest.approx(1.25, rel=1e-12)


@pytest.mark.parametrize("V", [C, -C, 1.5 * C])
def test_boost_rejects_superluminal_frames(V):
    with pytest.raises(InvalidBoost):
        boost_event(Event(0.0), V)
    with pytest.raises(InvalidBoost):
        transform_velocity(1.0, V)


def test_infinite_signal_becomes_finite_and_negative():
    assert transform_velocity(math.inf, 0.5 * C) == pytest.approx(-2 * C, rel=1e-12)
    assert transform_velocity(math.inf, 0.5 * C) == pytest.approx(-5.9958e8, rel=1e-4)
    assert transform_velocity(math.inf, 0.0) == math.inf


def test_light_speed_and_comoving():
    assert transform_velocity(C, 0.9 * C) == C
    assert transform_velocity(0.5 * C, 0.5 * C) == 0.0


def test_vanishing_denominator_gives_infinite_speed():
    assert transform_velocity(2 * C, 0.5 * C) == math.inf


@given(events, events, boosts)
def test_interval_is_boost_invariant(a, b, V):
    s0 = interval(a, b)
    s1 = interval(boost_event(a, V), boost_event(b, V))
    # differencing boosted coordinates loses bits relative to their absolute size
    scale = max(abs(C * e.t) + abs(e.x) + abs(e.y) + abs(e.z) for e in (a, b)) ** 2
    assert abs(s1 - s0) <= 1e-9 * max(scale, 1e-30)


@given(st.floats(0.01 * C, 0.999 * C), st.sampled_from([1, -1]), boosts)
def test_velocity_round_trip(speed, sign, V):
    v = sign * speed
    assert transform_velocity(transform_velocity(v, V), -V) == pytest.approx(v, rel=1e-9)


@given(st.floats(-0.999 * C, 0.999 * C), boosts)
def test_velocity_round_trip_slow_signals(v, V):
    # |v| << |V|: v survives only in the last bits of v' ~ -V
    back = transform_velocity(transform_velocity(v, V), -V)
    assert abs(back - v) <= 1e-9 * max(abs(v), abs(V))


@given(st.sampled_from([C, -C]), boosts)
def test_light_speed_is_fixed_under_boosts(v, V):
    assert abs(transform_velocity(v, V)) == pytest.approx(C, rel=1e-12)


# -- intervals and fronts ----------------------------------------------------

def test_classify_interval():
    assert classify_interval(A, A) is IntervalKind.LIGHTLIKE
    assert classify_interval(A, B) is IntervalKind.SPACELIKE
    assert classify_interval(Event(0.0), Event(10 * NS)) is IntervalKind.TIMELIKE
    assert classify_interval(Event(0.0), Event(1.0 / C, 1.0)) is IntervalKind.LIGHTLIKE


def test_front_membership():
    cone = CollapseFront(Event(0.0), C)
    assert in_collapsed_region(cone.apex, cone)
    assert not in_collapsed_region(Event(-10 * NS, 1.0), cone)
    assert in_collapsed_region(Event(-1 * NS, 1.0), cone)
    flat = CollapseFront(Event(0.0), math.inf)
    assert not in_collapsed_region(Event(-1 * NS, 1e6, -3.0, 7.0), flat)
    assert in_collapsed_region(Event(1 * NS, 1e6), flat)


def test_cone_boundary_counts_as_collapsed():
    cone = CollapseFront(Event(0.0), C)
    assert in_collapsed_region(Event(-1.0 / C, 1.0), cone)


def test_front_speed_must_not_be_subluminal():
    with pytest.raises(GeometryError):
        CollapseFront(Event(0.0), 0.5 * C)


def test_coherent_region_examples():
    assert not coherent_region_contains(Event(0.0, 0.0), A, B)
    assert coherent_region_contains(Event(-20 * NS), A, B)
    assert not coherent_region_contains(Event(-7 * NS, -1.5), A, B)


def test_coherent_region_needs_spacelike_detectors():
    with pytest.raises(GeometryError):
        coherent_region_contains(Event(-1.0), Event(0.0), Event(10 * NS))


@settings(max_examples=300)
@given(events, events, boosts)
def test_light_cone_membership_is_frame_independent(p, apex, V):
    d = math.dist(p.position, apex.position)
    gap = C * (apex.t - p.t)
    assume(abs(abs(gap) - d) > 1e-6 * max(d, 1e-3))  # stay off the boundary
    before = in_collapsed_region(p, CollapseFront(apex, C))
    after = in_collapsed_region(boost_event(p, V), CollapseFront(boost_event(apex, V), C))
    assert before == after


def test_instantaneous_front_is_frame_dependent():
    p = Event(-1 * NS, 3.0)
    apex = Event(0.0)
    assert not in_collapsed_region(p, CollapseFront(apex, math.inf))
    assert in_collapsed_region(boost_event(p, -0.5 * C), CollapseFront(boost_event(apex, -0.5 * C), math.inf))


speeds = st.one_of(st.floats(C, 20 * C), st.just(math.inf))


@given(st.builds(Event, st.floats(-4e-8, 0.0), st.floats(-3.0, 3.0), st.floats(-1, 1), st.floats(-1, 1)),
       speeds, speeds)
def test_coherent_region_grows_with_speed(p, s1, s2):
    lo, hi = sorted((s1, s2))
    if coherent_region_contains(p, A, B, lo):
        assert coherent_region_contains(p, A, B, hi)
    if coherent_region_contains(p, A, B, hi):
        assert coherent_region_contains(p, A, B, math.inf)


@given(st.builds(Event, st.floats(-4e-8, 4e-8), st.floats(-3.0, 3.0), st.floats(-1, 1), st.floats(-1, 1)),
       speeds)
def test_intersection_lies_in_each_past(p, s):
    if coherent_region_contains(p, A, B, s):
        assert not in_collapsed_region(p, CollapseFront(A, s))
        assert not in_collapsed_region(p, CollapseFront(B, s))


# -- pre-collapse --------------------------------------------------------------

def test_apex_three_metres():
    W = precollapse_apex(A, B)
    assert -W.t / NS == pytest.approx(5.00346142797228, abs=1e-9)
    assert (W.x, W.y, W.z) == (0.0, 0.0, 0.0)


def test_apex_scales_with_separation():
    W = precollapse_apex(Event(0.0, -3.0), Event(0.0, 3.0))
    assert -W.t / NS == pytest.approx(10.00692285594456, abs=1e-9)


def test_apex_degenerate_limit():
    a = Event(2.0, 1.0)
    W = precollapse_apex(a, Event(2.0, 1.0 + 1e-12))
    assert W.t == pytest.approx(2.0, abs=1e-20)
    assert W.x == pytest.approx(1.0)


def test_apex_rejects_non_simultaneous():
    with pytest.raises(GeometryError):
        precollapse_apex(Event(0.0, -1.5), Event(1 * NS, 1.5))


def test_twin_peak_window():
    w = Worldline(A)
    assert precollapse_duration(w, A, B) / NS == pytest.approx(10.00692285594456, abs=1e-9)


def test_midpoint_window():
    w = Worldline(Event(0.0))
    assert precollapse_duration(w, A, B) / NS == pytest.approx(5.00346142797228, abs=1e-9)


def test_instantaneous_collapse_has_no_window():
    assert precollapse_duration(Worldline(A, (0, 0, 3000.0)), A, B, math.inf) == 0.0


def test_finite_speed_window_is_distance_over_speed():
    assert precollapse_duration(Worldline(A), A, B, 2 * C) == pytest.approx(3.0 / (2 * C), rel=1e-12)


def _bisect_exit(w, s, lo=0.0, hi=1e-6, steps=200):
    """Oracle: bisect the membership predicate along the worldline."""
    inside = lambda tau: coherent_region_contains(w.at(A.t - tau), A, B, s)  # noqa: E731
    assert not inside(lo) and inside(hi)
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        if inside(mid):
            hi = mid
        else:
            lo = mid
        if hi - lo < 1e-18:
            break
    return 0.5 * (lo + hi)


@settings(max_examples=60, deadline=None)
@given(st.floats(-3e5, 3e5), st.floats(-3e5, 3e5), st.floats(0, 3e5), st.floats(C, 5 * C))
def test_window_matches_bisection_oracle(vx, vy, vz, s):
    w = Worldline(A, (vx, vy, vz))
    assert precollapse_duration(w, A, B, s) == pytest.approx(_bisect_exit(w, s), abs=1e-12)


def test_window_for_moving_beam_uses_exact_root():
    w = Worldline(A, (0.0, 0.0, 3000.0))
    exact = 3.0 / math.sqrt(C**2 - 3000.0**2)
    assert precollapse_duration(w, A, B) == pytest.approx(exact, rel=1e-14)


def test_collapse_speed_bound():
    assert collapse_speed_bound(3.0, 10 * NS) == pytest.approx(3e8, rel=1e-12)
    assert collapse_speed_bound(3.0, 10 * NS) == pytest.approx(C, rel=1e-3)
    assert collapse_speed_bound(3.0, 5 * NS) == pytest.approx(6e8, rel=1e-12)
    assert collapse_speed_bound(3.0, 5 * NS) == pytest.approx(2 * C, rel=1e-3)
    assert collapse_speed_bound(3.0, math.inf) == 0.0
    with pytest.raises(ValueError):
        collapse_speed_bound(0.0, 1.0)


def test_event_must_be_finite():
    with pytest.raises(GeometryError):
        Event(math.nan)
    with pytest.raises(GeometryError):
        Worldline(Event(0.0), (C, 0.0, 0.0))
