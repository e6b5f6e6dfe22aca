from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace
from typing import Optional

from .. import constants as const
from ..laser_probe import LaserProbe, SeparationTuning, classify_separation, tune_separation
from ..quantum_state import Scenario, precollapse_window


class ConfigError(ValueError):
    """Invalid configuration value; ``field`` names the offending parameter."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


def _nominal_separation() -> float:
    return tune_separation(const.NOMINAL_SEPARATION, const.NOMINAL_WAVELENGTH).separation


@dataclass(frozen=True)
class ExperimentConfig:
    """Parameters of the probe experiment; SI units throughout.

    ``laser_lead_time`` is the time from leaving the focal spot to detection.
    ``None`` places the spot so that its entry coincides with the start of the
    light-cone pre-collapse window.
    """

    beam_speed: float = const.NOMINAL_BEAM_SPEED
    separation: float = field(default_factory=_nominal_separation)
    wavelength: float = const.NOMINAL_WAVELENGTH
    laser_lead_time: Optional[float] = None
    focal_spot_width: float = const.NOMINAL_SPOT_WIDTH
    p0: float = 1.0
    lifetime: float = const.NOMINAL_LIFETIME
    detector_efficiency: float = 1.0
    dark_rate: float = 0.0
    n_atoms: int = 100_000
    flux: float = const.NOMINAL_FLUX
    scenario: Scenario = field(default_factory=Scenario.hellwig_kraus)
    master_seed: int = 0
    laser_angle: float = 0.0
    evaluate_at_spot_entry: bool = False

    def __post_init__(self):
        def check(name, ok, why):
            if not ok:
                raise ConfigError(name, f"{why} (got {getattr(self, name)!r})")

        for name in ("beam_speed", "separation", "wavelength", "focal_spot_width",
                     "lifetime", "flux", "p0", "detector_efficiency", "dark_rate", "laser_angle"):
            value = getattr(self, name)
            check(name, isinstance(value, (int, float)) and math.isfinite(value), "must be a finite number")
        check("beam_speed", 0 < self.beam_speed < const.SPEED_OF_LIGHT, "must lie in (0, c) m/s")
        check("separation", self.separation > 0, "must be > 0 m")
        check("wavelength", self.wavelength > 0, "must be > 0 m")
        check("focal_spot_width", self.focal_spot_width > 0, "must be > 0 m")
        check("lifetime", self.lifetime > 0, "must be > 0 s")
        check("flux", self.flux > 0, "must be > 0 atoms/s")
        check("p0", 0 <= self.p0 <= 1, "must lie in [0, 1]")
        check("detector_efficiency", 0 <= self.detector_efficiency <= 1, "must lie in [0, 1]")
        check("dark_rate", self.dark_rate >= 0, "must be >= 0 counts/s")
        check("laser_angle", abs(self.laser_angle) < math.pi / 2, "must lie in (-pi/2, pi/2) rad")
        check("n_atoms", isinstance(self.n_atoms, int) and self.n_atoms >= 1, "must be an integer >= 1")
        check("master_seed", isinstance(self.master_seed, int) and 0 <= self.master_seed < 2**64,
              "must be an integer in [0, 2^64)")
        if self.laser_lead_time is not None:
            check("laser_lead_time",
                  isinstance(self.laser_lead_time, (int, float)) and math.isfinite(self.laser_lead_time)
                  and self.laser_lead_time >= 0, "must be a finite number >= 0 s")
        if not isinstance(self.scenario, Scenario):
            raise ConfigError("scenario", f"expected a Scenario, got {self.scenario!r}")

    def replace(self, **changes) -> "ExperimentConfig":
        return replace(self, **changes)

    @classmethod
    def field_names(cls) -> list[str]:
        return [f.name for f in fields(cls)]

    # derived quantities

    @property
    def crossing_time(self) -> float:
        return self.focal_spot_width / self.beam_speed

    @property
    def lead_time(self) -> float:
        if self.laser_lead_time is not None:
            return self.laser_lead_time
        hk = precollapse_window(Scenario.hellwig_kraus(), self)
        return max(0.0, hk - self.crossing_time)

    @property
    def evaluation_lead(self) -> float:
        """Lead time at which the atom's coherence is evaluated (spot mid-point or entry)."""
        if self.evaluate_at_spot_entry:
            return self.lead_time + self.crossing_time
        return self.lead_time + 0.5 * self.crossing_time

    @property
    def decay_time_available(self) -> float:
        """Excitation happens mid-spot; the photon must leave before detection."""
        return self.lead_time + 0.5 * self.crossing_time

    @property
    def run_duration(self) -> float:
        return self.n_atoms / self.flux

    @property
    def expected_noise(self) -> float:
        return self.dark_rate * self.run_duration

    @property
    def probe(self) -> LaserProbe:
        a = self.laser_angle
        return LaserProbe(
            wavelength=self.wavelength,
            direction=(math.cos(a), math.sin(a), 0.0),
            polarization=(-math.sin(a), math.cos(a), 0.0),
            focal_spot_width=self.focal_spot_width,
            p0=self.p0,
        )

    @property
    def tuning(self) -> SeparationTuning:
        """Parity of the separation projected on the laser direction."""
        return classify_separation(self.separation * math.cos(self.laser_angle), self.wavelength)

    @property
    def laser_phase(self) -> float:
        return self.tuning.phase
