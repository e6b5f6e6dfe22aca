"""Far-field angular patterns of the scattered photon.

Intensities are relative to the equatorial intensity of a single dipole.
Both emitters share the polarization axis set by the laser.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, NamedTuple, Sequence

import numpy as np


class DirectionSample(NamedTuple):
    theta: float
    phi: float
    intensity: float


@dataclass(frozen=True)
class EmitterPair:
    separation: tuple[float, float, float]
    axis: tuple[float, float, float] = (0.0, 1.0, 0.0)
    wavenumber: float = 2.0 * math.pi / 589e-9
    relative_phase: float = math.pi
    mode: str = "coherent"

    def __post_init__(self):
        if self.mode not in ("coherent", "incoherent"):
            raise ValueError("mode must be 'coherent' or 'incoherent'")
        if not self.wavenumber > 0:
            raise ValueError("wavenumber must be positive")
        a = np.asarray(self.axis, dtype=float)
        object.__setattr__(self, "axis", tuple((a / np.linalg.norm(a)).tolist()))
        object.__setattr__(self, "separation", tuple(float(v) for v in self.separation))


def single_dipole(n, axis: Sequence[float]):
    """``sin^2`` of the angle between direction(s) ``n`` (..., 3) and the dipole axis."""
    n = np.asarray(n, dtype=float)
    c = n @ np.asarray(axis, dtype=float)
    out = 1.0 - c * c
    return float(out) if out.ndim == 0 else out


def pair_pattern(pair: EmitterPair, n):
    """Pattern of the two-emitter array in direction(s) ``n``."""
    n = np.asarray(n, dtype=float)
    base = 2.0 * np.asarray(single_dipole(n, pair.axis))
    if pair.mode == "coherent":
        path = n @ np.asarray(pair.separation)
        base = base * (1.0 + np.cos(pair.wavenumber * path + pair.relative_phase))
    return float(base) if base.ndim == 0 else base


def directions(theta, phi) -> np.ndarray:
    theta, phi = np.broadcast_arrays(np.asarray(theta, float), np.asarray(phi, float))
    st = np.sin(theta)
    return np.stack([st * np.cos(phi), st * np.sin(phi), np.cos(theta)], axis=-1)


@dataclass(frozen=True)
class PatternScan:
    theta: np.ndarray  # (n_theta,)
    phi: np.ndarray  # (n_phi,)
    intensity: np.ndarray  # (n_theta, n_phi)

    def __iter__(self) -> Iterator[DirectionSample]:
        for i, th in enumerate(self.theta):
            for j, ph in enumerate(self.phi):
                yield DirectionSample(float(th), float(ph), float(self.intensity[i, j]))

    def __len__(self) -> int:
        return self.intensity.size


def pattern_scan(pair: EmitterPair, n_theta: int = 91, n_phi: int = 180) -> PatternScan:
    """Regular grid: polar angle over [0, pi] inclusive, azimuth over [0, 2pi)."""
    if n_theta < 2 or n_phi < 2:
        raise ValueError("need at least 2 grid points per axis")
    theta = np.linspace(0.0, math.pi, n_theta)
    phi = np.linspace(0.0, 2.0 * math.pi, n_phi, endpoint=False)
    dirs = directions(theta[:, None], phi[None, :])
    return PatternScan(theta, phi, np.asarray(pair_pattern(pair, dirs)))
