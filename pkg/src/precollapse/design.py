"""Design calculator: matter-wave optics, timing budget, beam limits, feasibility."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional

from . import constants as const
from .experiment.config import ExperimentConfig
from .laser_probe import decay_probability, tune_separation
from .quantum_state import Scenario, precollapse_window

# "small compared with the wavelength" taken as a factor of 10
PARALLELISM_MARGIN = 10.0


class EvanescentOrder(ValueError):
    pass


@dataclass(frozen=True)
class BeamSpec:
    mass: float = const.SODIUM_MASS
    speed: float = const.NOMINAL_BEAM_SPEED
    grating_period: float = 20e-9
    diffraction_order: int = 1
    arm_length: float = 1.0
    grating_pairs: int = 1

    def __post_init__(self):
        for name in ("mass", "speed", "grating_period", "arm_length"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.diffraction_order < 0 or self.grating_pairs < 0:
            raise ValueError("diffraction_order and grating_pairs must be >= 0")


@dataclass(frozen=True)
class TimingReport:
    crossing_time: float
    precollapse_window: float
    decay_time_available: float
    decay_efficiency: float
    lifetime: float
    shortfall_flag: bool


def de_broglie(mass: float, speed: float) -> float:
    if mass <= 0 or speed <= 0:
        raise ValueError("mass and speed must be positive")
    return const.PLANCK / (mass * speed)


def diffraction_angle(wavelength: float, period: float, order: int = 1) -> float:
    if order == 0:
        return 0.0
    ratio = order * wavelength / period
    if ratio >= 1.0:
        raise EvanescentOrder(f"order {order} is evanescent (n*lambda/period = {ratio:.3g} >= 1)")
    return math.asin(ratio)


def timing_budget(config: ExperimentConfig) -> TimingReport:
    """Light-cone timing of the probe: spot crossing vs. pre-collapse window vs. decay.

    The decay clock starts mid-spot on average, so the time available is the
    window minus half the crossing time.
    """
    crossing = config.crossing_time
    window = precollapse_window(Scenario.hellwig_kraus(), config)
    available = max(0.0, window - 0.5 * crossing)
    return TimingReport(
        crossing_time=crossing,
        precollapse_window=window,
        decay_time_available=available,
        decay_efficiency=decay_probability(available, config.lifetime),
        lifetime=config.lifetime,
        shortfall_flag=crossing + config.lifetime > window,
    )


def beam_current_limit(detection_time: float) -> float:
    """At most one atom per detection time, in atoms/s."""
    if detection_time <= 0:
        raise ValueError("detection_time must be positive")
    return 1.0 / detection_time


def parallelism_tolerance(spot_width: float, wavelength: float) -> float:
    """Beam divergence (rad) that changes the separation by lambda/10 across the spot."""
    if spot_width <= 0 or wavelength < 0:
        raise ValueError("spot width must be positive and wavelength non-negative")
    return (wavelength / PARALLELISM_MARGIN) / spot_width


def achievable_separation(spec: BeamSpec) -> float:
    lam = de_broglie(spec.mass, spec.speed)
    theta = diffraction_angle(lam, spec.grating_period, spec.diffraction_order)
    return spec.grating_pairs * 2.0 * spec.arm_length * math.tan(theta)


@dataclass(frozen=True)
class FeasibilityReport:
    de_broglie_wavelength: float
    diffraction_angle: float
    achievable_separation: float
    required_separation: float
    tuned_separation: float
    tuned_half_waves: int
    tuning_adjustment: float
    timing: TimingReport
    beam_current_limit: float
    flux: float
    flux_margin: float
    parallelism_tolerance: float
    parallelism_margin: float
    verdict: str
    notes: tuple[str, ...] = ()

    def as_dict(self) -> dict:
        d = asdict(self)
        d["notes"] = list(self.notes)
        return d


def feasibility_report(
    spec: BeamSpec,
    config: ExperimentConfig,
    detection_time: float = 1e-12,
) -> FeasibilityReport:
    lam = de_broglie(spec.mass, spec.speed)
    theta = diffraction_angle(lam, spec.grating_period, spec.diffraction_order)
    reach = achievable_separation(spec)
    tuning = tune_separation(config.separation, config.wavelength)
    timing = timing_budget(config)
    limit = beam_current_limit(detection_time)
    notes = []
    if reach < config.separation:
        verdict = "infeasible"
        notes.append(
            f"grating layout reaches {reach:.3g} m, short of the {config.separation:.3g} m separation"
        )
    elif config.flux > limit:
        verdict = "infeasible"
        notes.append("beam current exceeds one atom per detection time")
    elif timing.shortfall_flag:
        verdict = "feasible with reduced decay efficiency"
        notes.append(f"decay efficiency {timing.decay_efficiency:.3f} within the pre-collapse window")
    else:
        verdict = "feasible"
    notes.append(f"parallelism tolerance uses a {PARALLELISM_MARGIN:g}x margin below the wavelength")
    return FeasibilityReport(
        de_broglie_wavelength=lam,
        diffraction_angle=theta,
        achievable_separation=reach,
        required_separation=config.separation,
        tuned_separation=tuning.separation,
        tuned_half_waves=tuning.half_waves,
        tuning_adjustment=tuning.adjustment,
        timing=timing,
        beam_current_limit=limit,
        flux=config.flux,
        flux_margin=limit / config.flux,
        parallelism_tolerance=parallelism_tolerance(config.focal_spot_width, config.wavelength),
        parallelism_margin=PARALLELISM_MARGIN,
        verdict=verdict,
        notes=tuple(notes),
    )


def format_report(report: FeasibilityReport, spec: Optional[BeamSpec] = None) -> str:
    """Plain-text table of the report (times in ns)."""
    t = report.timing
    rows = [
        ("de Broglie wavelength", f"{report.de_broglie_wavelength:.4e} m"),
        ("diffraction angle", f"{report.diffraction_angle:.4e} rad"),
        ("achievable separation", f"{report.achievable_separation:.4g} m"),
        ("required separation", f"{report.required_separation:.10g} m"),
        ("tuned separation", f"{report.tuned_separation:.10g} m ({report.tuned_half_waves} half-waves)"),
        ("spot crossing time", f"{t.crossing_time * 1e9:.4f} ns"),
        ("pre-collapse window", f"{t.precollapse_window * 1e9:.4f} ns"),
        ("excited-state lifetime", f"{t.lifetime * 1e9:.4f} ns"),
        ("decay time available", f"{t.decay_time_available * 1e9:.4f} ns"),
        ("decay efficiency", f"{t.decay_efficiency:.4f}"),
        ("timing shortfall", "yes" if t.shortfall_flag else "no"),
        ("beam current limit", f"{report.beam_current_limit:.3e} atoms/s"),
        ("flux margin", f"{report.flux_margin:.3e}"),
        ("parallelism tolerance", f"{report.parallelism_tolerance:.4e} rad"),
        ("verdict", report.verdict),
    ]
    if spec is not None:
        rows.insert(0, ("beam", f"m={spec.mass:.4e} kg, v={spec.speed:g} m/s, "
                                f"period={spec.grating_period:g} m, order={spec.diffraction_order}"))
    width = max(len(k) for k, _ in rows)
    lines = [f"{k.ljust(width)}  {v}" for k, v in rows]
    lines += [f"note: {n}" for n in report.notes]
    return "\n".join(lines) + "\n"
