"""Laser-atom coupling for the twin-peak state.

The two beam terms of the transition amplitude differ only by the phase
``exp(i k.d)``; all atomic-structure factors are absorbed into ``p0``, the
excitation probability of a single (collapsed) wavepacket crossing the spot.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from .constants import NOMINAL_SPOT_WIDTH, NOMINAL_WAVELENGTH
from .quantum_state import DensityMatrix2

TWO_PI = 2.0 * math.pi
# tolerance on the half-wave count when classifying a separation
PARITY_TOL = 1e-6


class SaturationError(ValueError):
    """Excitation probability above 1: lower ``p0``."""


class Parity(str, Enum):
    ODD = "odd"
    EVEN = "even"
    DETUNED = "detuned"


def _unit(v: Sequence[float]) -> np.ndarray:
    a = np.asarray(v, dtype=float)
    n = np.linalg.norm(a)
    if a.shape != (3,) or n == 0:
        raise ValueError("expected a non-zero 3-vector")
    return a / n


@dataclass(frozen=True)
class LaserProbe:
    wavelength: float = NOMINAL_WAVELENGTH
    direction: tuple[float, float, float] = (1.0, 0.0, 0.0)
    polarization: tuple[float, float, float] = (0.0, 1.0, 0.0)
    focal_spot_width: float = NOMINAL_SPOT_WIDTH
    p0: float = 1.0

    def __post_init__(self):
        if not self.wavelength > 0:
            raise ValueError("wavelength must be positive")
        if not 0.0 <= self.p0 <= 1.0:
            raise ValueError("p0 must lie in [0, 1]")
        k_hat, e_hat = _unit(self.direction), _unit(self.polarization)
        if abs(float(k_hat @ e_hat)) > 1e-9:
            raise ValueError("polarization must be orthogonal to the propagation direction")
        object.__setattr__(self, "direction", tuple(k_hat.tolist()))
        object.__setattr__(self, "polarization", tuple(e_hat.tolist()))

    @property
    def wavenumber(self) -> float:
        return TWO_PI / self.wavelength

    @property
    def wavevector(self) -> np.ndarray:
        return self.wavenumber * np.asarray(self.direction)


@dataclass(frozen=True)
class SeparationTuning:
    separation: float
    half_waves: int
    phase: float
    parity: Parity
    adjustment: float = field(default=0.0)


def interference_phase(d: Sequence[float], probe: LaserProbe) -> float:
    """Laser phase difference ``k.d`` between the two beams, reduced to [0, 2pi)."""
    phi = float(probe.wavevector @ np.asarray(d, dtype=float))
    return phi % TWO_PI


def classify_separation(d: float, wavelength: float, tol: float = PARITY_TOL) -> SeparationTuning:
    """Parity of a projected separation measured in half-wavelengths.

    Within ``tol`` half-waves of an integer the phase is snapped to exactly
    0 or pi, so a tuned configuration gives an exact null.
    """
    q = 2.0 * d / wavelength
    n = round(q)
    if abs(q - n) <= tol:
        parity = Parity.ODD if n % 2 else Parity.EVEN
        return SeparationTuning(d, n, math.pi if n % 2 else 0.0, parity)
    return SeparationTuning(d, n, (math.pi * q) % TWO_PI, Parity.DETUNED)


def tune_separation(d_target: float, wavelength: float) -> SeparationTuning:
    """Nearest separation that is an odd number of half-wavelengths (ties go to the smaller)."""
    if d_target <= 0 or wavelength <= 0:
        raise ValueError("target separation and wavelength must be positive")
    half = 0.5 * wavelength
    q = d_target / half
    below = max(1, 2 * math.floor((q - 1.0) / 2.0) + 1)
    above = below + 2
    n = below if abs(q - below) <= abs(above - q) else above
    d = n * half
    return SeparationTuning(d, n, math.pi, Parity.ODD, abs(d - d_target))


def excitation_probability(rho: DensityMatrix2, phi: float, p0: float) -> float:
    """``p0 (1 + 2 Re(rho_LR e^{i phi}))``; exactly ``p0`` for a collapsed state."""
    if not 0.0 <= p0 <= 1.0:
        raise ValueError("p0 must lie in [0, 1]")
    P = p0 * (1.0 + 2.0 * (rho.rho_LR * cmath.exp(1j * phi)).real)
    if P > 1.0 + 1e-12:
        raise SaturationError(
            f"excitation probability {P:.6g} exceeds 1 under constructive interference; "
            "lower p0 (at most 0.5 for an untuned twin state)"
        )
    return P


def decay_probability(t_available: float, lifetime: float) -> float:
    if t_available < 0 or lifetime <= 0:
        raise ValueError("need t_available >= 0 and lifetime > 0")
    return -math.expm1(-t_available / lifetime)
