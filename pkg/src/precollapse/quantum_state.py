"""Which-beam state of the atom as a 2x2 density matrix in the {L, R} basis."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING

from . import spacetime
from .constants import SPEED_OF_LIGHT as C

if TYPE_CHECKING:
    from .experiment.config import ExperimentConfig

TRACE_TOL = 1e-12


class Side(str, Enum):
    L = "L"
    R = "R"


class InvalidCollapse(ValueError):
    pass


@dataclass(frozen=True)
class DensityMatrix2:
    p_LL: float
    p_RR: float
    rho_LR: complex = 0j

    def __post_init__(self):
        object.__setattr__(self, "rho_LR", complex(self.rho_LR))
        if self.p_LL < 0 or self.p_RR < 0:
            raise ValueError("diagonal probabilities must be non-negative")
        if abs(self.p_LL + self.p_RR - 1.0) > TRACE_TOL:
            raise ValueError(f"trace must be 1, got {self.p_LL + self.p_RR!r}")
        if abs(self.rho_LR) ** 2 > self.p_LL * self.p_RR + TRACE_TOL:
            raise ValueError("coherence exceeds positivity bound |rho_LR|^2 <= p_LL p_RR")

    @property
    def coherence(self) -> float:
        return abs(self.rho_LR)

    @property
    def purity(self) -> float:
        return self.p_LL**2 + self.p_RR**2 + 2.0 * abs(self.rho_LR) ** 2

    def probability(self, side: Side) -> float:
        return self.p_LL if Side(side) is Side.L else self.p_RR

    def as_matrix(self):
        import numpy as np

        return np.array(
            [[self.p_LL, self.rho_LR], [self.rho_LR.conjugate(), self.p_RR]], dtype=complex
        )


@dataclass(frozen=True)
class Scenario:
    """Collapse scenario, identified by its collapse speed in m/s.

    ``inf`` is the conventional instantaneous collapse, ``c`` the light-cone
    collapse; anything strictly between is a finite-speed
    member of the family.
    """

    speed: float

    def __post_init__(self):
        object.__setattr__(self, "speed", float(self.speed))
        if not self.speed >= C:
            raise ValueError(f"collapse speed must be >= c, got {self.speed!r}")

    @classmethod
    def conventional(cls) -> "Scenario":
        return cls(math.inf)

    @classmethod
    def hellwig_kraus(cls) -> "Scenario":
        return cls(C)

    @classmethod
    def finite_speed(cls, s: float) -> "Scenario":
        if not (C < s < math.inf):
            raise ValueError("finite-speed scenario needs c < s < inf")
        return cls(s)

    @classmethod
    def parse(cls, text: str) -> "Scenario":
        key = text.strip().lower()
        if key == "conventional":
            return cls.conventional()
        if key in ("hk", "hellwig-kraus", "hellwig_kraus"):
            return cls.hellwig_kraus()
        if key.startswith("speed:"):
            s = float(key.split(":", 1)[1])
            if math.isinf(s):
                return cls.conventional()
            if s == C:
                return cls.hellwig_kraus()
            return cls.finite_speed(s)
        raise ValueError(f"unknown scenario {text!r} (use conventional, hk or speed:<m/s>)")

    @property
    def kind(self) -> str:
        if math.isinf(self.speed):
            return "conventional"
        if self.speed == C:
            return "hk"
        return "finite"

    @property
    def label(self) -> str:
        if self.kind == "finite":
            return f"speed:{self.speed!r}"
        return self.kind


def coherent_twin(relative_phase: float = 0.0) -> DensityMatrix2:
    return DensityMatrix2(0.5, 0.5, 0.5 * cmath.exp(1j * relative_phase))


def selective_collapse(rho: DensityMatrix2, side: Side) -> DensityMatrix2:
    """Project onto one beam. The global phase picked up from the detector is dropped."""
    side = Side(side)
    if rho.probability(side) <= 0.0:
        raise InvalidCollapse(f"cannot collapse onto side {side.value} with zero probability")
    return DensityMatrix2(1.0, 0.0) if side is Side.L else DensityMatrix2(0.0, 1.0)


def nonselective_collapse(rho: DensityMatrix2) -> DensityMatrix2:
    return DensityMatrix2(rho.p_LL, rho.p_RR, 0j)


def atom_worldline(config: "ExperimentConfig") -> spacetime.Worldline:
    """Left-beam peak: ends in detector A at t = 0, moving along the beam (z)."""
    A, _ = detection_events(config)
    return spacetime.Worldline(A, (0.0, 0.0, config.beam_speed))


def detection_events(config: "ExperimentConfig") -> tuple[spacetime.Event, spacetime.Event]:
    half = 0.5 * config.separation
    return spacetime.Event(0.0, -half), spacetime.Event(0.0, half)


def precollapse_window(scenario: Scenario, config: "ExperimentConfig") -> float:
    A, B = detection_events(config)
    return spacetime.precollapse_duration(atom_worldline(config), A, B, scenario.speed)


def state_at(
    scenario: Scenario,
    dt_before_detection: float,
    config: "ExperimentConfig",
    detected_side: Side,
) -> DensityMatrix2:
    """State of the atom ``dt_before_detection`` seconds (lab time) before it is detected."""
    if dt_before_detection < 0:
        raise ValueError("dt_before_detection must be >= 0")
    twin = coherent_twin(0.0)
    if dt_before_detection <= precollapse_window(scenario, config):
        return selective_collapse(twin, detected_side)
    return twin
