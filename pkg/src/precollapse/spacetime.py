"""Flat-spacetime kinematics for collapse fronts.

Events are lab-frame points ``(t, x, y, z)`` in SI units. Collapse speeds are
plain floats where ``math.inf`` stands for instantaneous collapse along a
constant-time hypersurface and ``SPEED_OF_LIGHT`` for collapse along the past
light cone. Anything in between is the family of fronts that tilt from the
cone towards the hypersurface.

Boundary convention: a point lying exactly on a front counts as collapsed, so
the coherent region (the intersection of both detectors' past regions) is an
open set.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from .constants import SPEED_OF_LIGHT as C

LIGHTLIKE_RTOL = 1e-9


class GeometryError(ValueError):
    """Raised for configurations the collapse geometry does not support."""


class InvalidBoost(GeometryError):
    pass


@dataclass(frozen=True)
class Event:
    t: float
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    def __post_init__(self):
        for name in ("t", "x", "y", "z"):
            if not math.isfinite(getattr(self, name)):
                raise GeometryError(f"event component {name} must be finite")

    @property
    def position(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)


@dataclass(frozen=True)
class CollapseFront:
    """Apex event plus collapse speed (m/s, ``>= c`` or ``math.inf``)."""

    apex: Event
    speed: float = C

    def __post_init__(self):
        if not (self.speed >= C):
            raise GeometryError(f"collapse speed must be >= c or inf, got {self.speed!r}")


@dataclass(frozen=True)
class Worldline:
    anchor: Event
    velocity: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        object.__setattr__(self, "velocity", tuple(float(v) for v in self.velocity))
        if len(self.velocity) != 3:
            raise GeometryError("worldline velocity must be a 3-vector")
        if math.hypot(*self.velocity) >= C:
            raise GeometryError("worldline speed must be below c")

    def at(self, t: float) -> Event:
        dt = t - self.anchor.t
        vx, vy, vz = self.velocity
        a = self.anchor
        return Event(t, a.x + vx * dt, a.y + vy * dt, a.z + vz * dt)


class IntervalKind(str, Enum):
    TIMELIKE = "timelike"
    SPACELIKE = "spacelike"
    LIGHTLIKE = "lightlike"


def _distance(a: Sequence[float], b: Sequence[float]) -> float:
    return math.dist(a, b)


def lorentz_factor(speed: float) -> float:
    beta = speed / C
    return 1.0 / math.sqrt((1.0 - beta) * (1.0 + beta))


def boost_event(e: Event, V: float) -> Event:
    """Lorentz boost along x with signed frame velocity ``V``."""
    if not abs(V) < C:
        raise InvalidBoost(f"boost speed |V| must be below c, got {V!r}")
    g = lorentz_factor(V)
    return Event(g * (e.t - V * e.x / C**2), g * (e.x - V * e.t), e.y, e.z)


def transform_velocity(v: float, V: float) -> float:
    """Relativistic velocity addition along x: ``(v - V) / (1 - vV/c^2)``.

    ``v`` may be ``math.inf`` (an instantaneous signal), which becomes the
    finite, oppositely signed ``-c^2/V`` in any moving frame. A vanishing
    denominator gives ``math.inf``.
    """
    if not abs(V) < C:
        raise InvalidBoost(f"boost speed |V| must be below c, got {V!r}")
    if math.isinf(v):
        if V == 0.0:
            return v
        return -C * (C / V)
    if V == 0.0:
        return v
    if abs(v) == C:
        # (v - V)/(1 - vV/c^2) == v exactly; avoid rounding in the ratio
        return v
    den = 1.0 - (v / C) * (V / C)
    if den == 0.0:
        return math.inf
    return (v - V) / den


def interval(a: Event, b: Event) -> float:
    """``c^2 dt^2 - |dx|^2`` (m^2); positive for timelike separations."""
    ct = C * (b.t - a.t)
    r2 = (b.x - a.x) ** 2 + (b.y - a.y) ** 2 + (b.z - a.z) ** 2
    return ct * ct - r2


def classify_interval(a: Event, b: Event) -> IntervalKind:
    ct2 = (C * (b.t - a.t)) ** 2
    r2 = (b.x - a.x) ** 2 + (b.y - a.y) ** 2 + (b.z - a.z) ** 2
    s2 = ct2 - r2
    if abs(s2) <= LIGHTLIKE_RTOL * max(ct2, r2):
        return IntervalKind.LIGHTLIKE
    return IntervalKind.TIMELIKE if s2 > 0 else IntervalKind.SPACELIKE


def _strictly_in_past(p: Event, front: CollapseFront) -> bool:
    lead = front.apex.t - p.t
    if math.isinf(front.speed):
        return lead > 0.0
    if lead <= 0.0:
        return False
    return front.speed * lead > _distance(p.position, front.apex.position)


def in_collapsed_region(p: Event, front: CollapseFront) -> bool:
    """True unless ``p`` lies strictly inside the front's past region."""
    return not _strictly_in_past(p, front)


def _require_spacelike(A: Event, B: Event) -> None:
    kind = classify_interval(A, B)
    if kind is not IntervalKind.SPACELIKE:
        raise GeometryError(f"detection events must be spacelike separated, got {kind.value}")


def coherent_region_contains(p: Event, A: Event, B: Event, s: float = C) -> bool:
    """Whether ``p`` is inside both detectors' past regions for speed ``s``."""
    _require_spacelike(A, B)
    return _strictly_in_past(p, CollapseFront(A, s)) and _strictly_in_past(p, CollapseFront(B, s))


def _require_simultaneous(A: Event, B: Event) -> float:
    D = _distance(A.position, B.position)
    if abs(A.t - B.t) > LIGHTLIKE_RTOL * D / C:
        raise GeometryError(
            "only simultaneous detection events are supported "
            f"(t_A={A.t!r}, t_B={B.t!r})"
        )
    return D


def precollapse_apex(A: Event, B: Event) -> Event:
    """Earliest point W of the region reached by both light-cone collapses."""
    D = _require_simultaneous(A, B)
    return Event(
        A.t - D / (2.0 * C),
        0.5 * (A.x + B.x),
        0.5 * (A.y + B.y),
        0.5 * (A.z + B.z),
    )


def _exit_lead(w: Worldline, t_det: float, target: Event, s: float) -> float:
    """Smallest lead ``tau >= 0`` beyond which the worldline is inside ``target``'s past.

    Solves ``s^2 tau^2 = |x_w(t_det - tau) - x_target|^2`` for its non-negative
    root. The quadratic opens upward (|v| < c <= s) and is <= 0 at tau = 0,
    so the root is unique.
    """
    p0 = w.at(t_det).position
    delta = [p0[i] - target.position[i] for i in range(3)]
    r2 = sum(d * d for d in delta)
    if r2 == 0.0:
        return 0.0
    # x_w(t_det - tau) - x_target = delta - v tau
    b = sum(w.velocity[i] * delta[i] for i in range(3))  # v . delta
    a = s * s - sum(v * v for v in w.velocity)
    disc = math.sqrt(b * b + a * r2)
    # roots of a tau^2 + 2 b tau - r2 = 0
    if b >= 0.0:
        return r2 / (b + disc)
    return (disc - b) / a


def precollapse_duration(w: Worldline, A: Event, B: Event, s: float = C) -> float:
    """Length of the final worldline segment that lies outside the coherent region.

    Measured back from the common detection time of ``A`` and ``B``. For a
    peak that ends in one detector this is governed by the other detector's
    front; for a worldline between the detectors both fronts matter and the
    later exit wins. Instantaneous collapse (``s = inf``) has no pre-collapse.
    """
    _require_simultaneous(A, B)
    _require_spacelike(A, B)
    CollapseFront(A, s)  # validates s
    if math.isinf(s):
        return 0.0
    return max(_exit_lead(w, A.t, A, s), _exit_lead(w, A.t, B, s))


def collapse_speed_bound(D: float, dt: float) -> float:
    """Largest collapse speed whose pre-collapse still reaches a probe ``dt`` before detection.

    A peak at distance ``D`` from the other detector is pre-collapsed at lead
    time ``dt`` iff ``D / s >= dt``.
    """
    if D <= 0.0 or dt <= 0.0:
        raise ValueError("separation and lead time must be positive")
    return D / dt
