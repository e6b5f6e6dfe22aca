"""Null-test verdict and collapse-speed sweeps on top of the Monte Carlo engine."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np
from scipy import stats as sps

from ..quantum_state import Scenario
from ..spacetime import collapse_speed_bound
from .config import ExperimentConfig
from .engine import ExperimentStats, run


class Verdict(str, Enum):
    HK_CONFIRMED = "HK-confirmed"
    NULL = "null"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class NullTestResult:
    verdict: Verdict
    observed: int
    expected_noise: float
    p_value: float
    critical_count: Optional[int]
    power: float

    def as_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "observed_counts": self.observed,
            "expected_noise": self.expected_noise,
            "p_value": self.p_value,
            "critical_count": self.critical_count,
            "power": self.power,
        }


def _critical_count(mu: float, significance: float) -> int:
    """Smallest k with P(X >= k | mu) < significance."""
    k = int(sps.poisson.isf(significance, mu)) if mu > 0 else 0
    while sps.poisson.sf(k, mu) >= significance:
        k += 1
    while k > 0 and sps.poisson.sf(k - 1, mu) < significance:
        k -= 1
    return k + 1


def null_test(
    stats: ExperimentStats,
    expected_noise: Optional[float] = None,
    significance: float = 0.01,
    min_signal_rate: float = 1e-3,
    target_power: float = 0.8,
) -> NullTestResult:
    """One-sided Poisson test of the photon counts against the noise expectation.

    Any significant excess confirms light-cone collapse. Absence of an excess
    only counts as a null result when the run was large enough: the power to
    detect ``min_signal_rate`` photons per atom must reach ``target_power``.
    Otherwise the verdict is inconclusive.
    """
    if not 0 < significance < 1:
        raise ValueError("significance must lie in (0, 1)")
    mu = stats.expected_noise if expected_noise is None else float(expected_noise)
    if mu < 0:
        raise ValueError("expected noise must be >= 0")
    observed = stats.total_counts
    if stats.n_atoms == 0:
        return NullTestResult(Verdict.INCONCLUSIVE, observed, mu, 1.0, None, 0.0)
    p_value = float(sps.poisson.sf(observed - 1, mu)) if observed > 0 else 1.0
    if mu == 0.0:
        p_value = 0.0 if observed > 0 else 1.0
    k_crit = _critical_count(mu, significance)
    alt = mu + min_signal_rate * stats.n_atoms
    power = float(sps.poisson.sf(k_crit - 1, alt))
    if p_value < significance:
        verdict = Verdict.HK_CONFIRMED
    elif power >= target_power:
        verdict = Verdict.NULL
    else:
        verdict = Verdict.INCONCLUSIVE
    return NullTestResult(verdict, observed, mu, p_value, k_crit, power)


@dataclass(frozen=True)
class SweepTable:
    speeds: np.ndarray  # m/s, inf allowed
    lead_times: np.ndarray  # s
    evaluation_leads: np.ndarray  # s
    n_atoms: int
    n_photons: np.ndarray  # (n_speeds, n_leads)
    predicted_precollapse: np.ndarray  # (n_speeds, n_leads) bool, geometric oracle
    separation: float

    @property
    def rates(self) -> np.ndarray:
        return self.n_photons / self.n_atoms

    @property
    def speed_bounds(self) -> np.ndarray:
        return np.array([collapse_speed_bound(self.separation, t) for t in self.evaluation_leads])

    def rows(self):
        for i, s in enumerate(self.speeds):
            for j, lead in enumerate(self.lead_times):
                yield {
                    "speed": float(s),
                    "lead_time": float(lead),
                    "evaluation_lead": float(self.evaluation_leads[j]),
                    "speed_bound": float(self.speed_bounds[j]),
                    "n_atoms": self.n_atoms,
                    "n_photons": int(self.n_photons[i, j]),
                    "photon_rate": float(self.rates[i, j]),
                    "predicted_precollapse": bool(self.predicted_precollapse[i, j]),
                }


def scenario_sweep(
    base: ExperimentConfig,
    speeds: Sequence[float],
    leads: Sequence[float],
) -> SweepTable:
    """Photon counts over a (collapse speed, laser lead time) grid.

    Every cell reuses the base seed. The oracle column marks cells where the
    probe's evaluation point is pre-collapsed, i.e. ``s <= D / lead``.
    """
    if not len(speeds) or not len(leads):
        raise ValueError("speeds and leads must be non-empty")
    speeds = np.asarray(speeds, dtype=float)
    leads = np.asarray(leads, dtype=float)
    counts = np.zeros((speeds.size, leads.size), dtype=np.int64)
    predicted = np.zeros_like(counts, dtype=bool)
    eval_leads = np.empty(leads.size)
    for j, lead in enumerate(leads):
        cfg = base.replace(laser_lead_time=float(lead))
        eval_leads[j] = cfg.evaluation_lead
        bound = collapse_speed_bound(base.separation, cfg.evaluation_lead)
        for i, s in enumerate(speeds):
            counts[i, j] = run(cfg.replace(scenario=Scenario(float(s)))).stats.n_photons
            predicted[i, j] = bool(s <= bound)
    return SweepTable(speeds, leads, eval_leads, base.n_atoms, counts, predicted, base.separation)
