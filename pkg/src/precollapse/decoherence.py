"""Collision-driven phase randomization of a wavepacket inside the detector.

Each collision changes the kinetic energy by an amount of order the kinetic
energy itself; between collisions that mismatch accumulates a phase error
``KE * t / hbar``. Kicks are treated as independent zero-mean Gaussians whose
rms is that phase step.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .constants import HBAR, SODIUM_MASS

TWO_PI = 2.0 * math.pi


class NeverCollapses(ValueError):
    pass


@dataclass(frozen=True)
class CollisionEnvironment:
    atom_mass: float = SODIUM_MASS
    atom_speed: float = 500.0
    mean_free_path: float = 0.1e-9
    phase_threshold: float = TWO_PI

    def __post_init__(self):
        for name in ("atom_mass", "atom_speed", "mean_free_path", "phase_threshold"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    @property
    def kinetic_energy(self) -> float:
        return 0.5 * self.atom_mass * self.atom_speed**2

    @property
    def collision_interval(self) -> float:
        return self.mean_free_path / self.atom_speed


def phase_step(kinetic_energy: float, t_between_collisions: float) -> float:
    if kinetic_energy < 0 or t_between_collisions < 0:
        raise ValueError("inputs must be non-negative")
    return kinetic_energy * t_between_collisions / HBAR


def coherence_after(n_collisions: int, phase_step_rms: float) -> float:
    """Suppression factor of ``|rho_LR|`` after ``n`` Gaussian phase kicks."""
    if n_collisions < 0:
        raise ValueError("n_collisions must be >= 0")
    return max(0.0, math.exp(-0.5 * n_collisions * phase_step_rms**2))


def collisions_to_collapse(env: CollisionEnvironment) -> int:
    sigma = phase_step(env.kinetic_energy, env.collision_interval)
    if sigma == 0.0:
        raise NeverCollapses("zero phase step: the phase never randomizes")
    n = max(1, math.ceil((env.phase_threshold / sigma) ** 2))
    # guard the ceil against rounding just above an integer
    if n > 1 and math.sqrt(n - 1) * sigma >= env.phase_threshold:
        n -= 1
    return n


def time_to_collapse(env: CollisionEnvironment) -> float:
    """Time until the cumulative rms phase reaches the threshold (whole collisions)."""
    return collisions_to_collapse(env) * env.collision_interval
