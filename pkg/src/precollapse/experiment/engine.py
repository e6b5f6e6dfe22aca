"""Monte Carlo simulation of the laser-probe null experiment."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .. import _accel
from ..laser_probe import decay_probability, excitation_probability
from ..quantum_state import (
    Side,
    coherent_twin,
    precollapse_window,
    selective_collapse,
)
from . import _rng
from ._kernels import DETECTED_R, EMITTED, EMITTED_R, EXCITED, PRECOLLAPSED, simulate_block
from .config import ExperimentConfig

CHUNK = 1 << 20
NOISE_STREAM = 0xDA2C


@dataclass(frozen=True)
class AtomOutcome:
    detected_side: Side
    excited: bool
    photon_emitted: bool
    emission_side: Optional[Side]
    emission_time_before_detection: Optional[float]


@dataclass(frozen=True)
class ExperimentStats:
    n_atoms: int
    n_photons: int
    n_excited: int
    side_counts: tuple[int, int]
    emission_side_counts: tuple[int, int]
    emission_side_matches: int
    noise_counts: int
    expected_noise: float

    @property
    def photon_rate(self) -> float:
        return self.n_photons / self.n_atoms if self.n_atoms else 0.0

    @property
    def photon_rate_se(self) -> float:
        """Binomial standard error of ``photon_rate``."""
        if not self.n_atoms:
            return 0.0
        p = self.photon_rate
        return math.sqrt(p * (1.0 - p) / self.n_atoms)

    @property
    def total_counts(self) -> int:
        return self.n_photons + self.noise_counts

    def as_dict(self) -> dict:
        return {
            "n_atoms": self.n_atoms,
            "n_photons": self.n_photons,
            "n_excited": self.n_excited,
            "photon_rate": self.photon_rate,
            "photon_rate_se": self.photon_rate_se,
            "side_counts": {"L": self.side_counts[0], "R": self.side_counts[1]},
            "emission_side_counts": {"L": self.emission_side_counts[0], "R": self.emission_side_counts[1]},
            "emission_side_matches": self.emission_side_matches,
            "noise_counts": self.noise_counts,
            "expected_noise": self.expected_noise,
            "total_counts": self.total_counts,
        }


@dataclass(frozen=True)
class RunResult:
    stats: ExperimentStats
    codes: Optional[np.ndarray]  # per-atom outcome codes, when traces were requested
    config: ExperimentConfig

    def outcomes_table(self) -> dict[str, np.ndarray]:
        if self.codes is None:
            raise ValueError("run was made without traces")
        return decode(self.codes, self.config)


@dataclass(frozen=True)
class _Plan:
    key: np.uint64
    geom_collapsed: bool
    efficiency: float
    p_coherent: float
    p_collapsed: float
    p_decay: float


def _plan(config: ExperimentConfig) -> _Plan:
    twin = coherent_twin(0.0)
    phi = config.laser_phase
    window = precollapse_window(config.scenario, config)
    return _Plan(
        key=_rng.seed_key(config.master_seed),
        geom_collapsed=config.evaluation_lead <= window,
        efficiency=config.detector_efficiency,
        p_coherent=excitation_probability(twin, phi, config.p0),
        p_collapsed=excitation_probability(selective_collapse(twin, Side.L), phi, config.p0),
        p_decay=decay_probability(config.decay_time_available, config.lifetime),
    )


def simulate_atom(config: ExperimentConfig, atom_index: int) -> AtomOutcome:
    """Reference single-atom path, driven by the atom's counter-based stream.

    Goes through the density-matrix and laser-coupling functions directly;
    ``run`` must agree with it atom by atom.
    """
    key = int(_rng.seed_key(config.master_seed))

    def u(k):
        return _rng.uniform_scalar(key, atom_index, k)

    side = Side.R if u(_rng.DRAW_SIDE) >= 0.5 else Side.L
    window = precollapse_window(config.scenario, config)
    twin = coherent_twin(0.0)
    # a failed non-detection voids the pre-collapse and the atom stays coherent
    if config.evaluation_lead <= window and u(_rng.DRAW_EFFICIENCY) < config.detector_efficiency:
        rho = selective_collapse(twin, side)
    else:
        rho = twin
    P = excitation_probability(rho, config.laser_phase, config.p0)
    if not u(_rng.DRAW_EXCITE) < P:
        return AtomOutcome(side, False, False, None, None)
    budget = config.decay_time_available
    ud = u(_rng.DRAW_DECAY)
    if not ud < decay_probability(budget, config.lifetime):
        return AtomOutcome(side, True, False, None, None)
    if rho.coherence == 0.0:
        emit = side
    else:
        emit = Side.R if u(_rng.DRAW_EMIT_SIDE) >= 0.5 else Side.L
    return AtomOutcome(side, True, True, emit, _emission_lead(ud, budget, config.lifetime))


def _emission_lead(u_decay, budget, lifetime):
    t_decay = -lifetime * np.log1p(-np.asarray(u_decay, dtype=float))
    out = np.maximum(budget - t_decay, 0.0)
    return float(out) if out.ndim == 0 else out


def _noise_counts(config: ExperimentConfig) -> int:
    mu = config.expected_noise
    if mu == 0.0:
        return 0
    gen = np.random.Generator(np.random.Philox(key=[config.master_seed, NOISE_STREAM]))
    return int(gen.poisson(mu))


def run(config: ExperimentConfig, traces: bool = False, backend: Optional[str] = None) -> RunResult:
    """Simulate ``config.n_atoms`` atoms and aggregate.

    Atoms are processed in fixed chunks; with the numpy backend chunks are
    spread over ``PRECOLLAPSE_SIM_THREADS`` workers, with numba the kernel
    itself is parallel. Counts are integers, so the result does not depend on
    the schedule.
    """
    plan = _plan(config)
    backend = backend or _accel.backend_name()
    threads = _accel.thread_count()
    N = config.n_atoms
    starts = range(0, N, CHUNK)

    def block(start):
        return simulate_block(plan.key, start, min(CHUNK, N - start), plan.geom_collapsed,
                              plan.efficiency, plan.p_coherent, plan.p_collapsed,
                              plan.p_decay, backend=backend, threads=threads)

    def tally(codes):
        right = (codes & DETECTED_R) != 0
        emitted = (codes & EMITTED) != 0
        emit_r = (codes & EMITTED_R) != 0
        return np.array([
            np.count_nonzero(right),
            np.count_nonzero(codes & EXCITED),
            np.count_nonzero(emitted),
            np.count_nonzero(emit_r),
            np.count_nonzero(emitted & (emit_r == right)),
        ], dtype=np.int64)

    totals = np.zeros(5, dtype=np.int64)
    kept = []
    if backend == "numpy" and threads > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            blocks = list(pool.map(block, starts))
    else:
        blocks = (block(s) for s in starts)
    for codes in blocks:
        totals += tally(codes)
        if traces:
            kept.append(codes)

    n_right, n_excited, n_emit, n_emit_r, matches = (int(v) for v in totals)
    stats = ExperimentStats(
        n_atoms=N,
        n_photons=n_emit,
        n_excited=n_excited,
        side_counts=(N - n_right, n_right),
        emission_side_counts=(n_emit - n_emit_r, n_emit_r),
        emission_side_matches=matches,
        noise_counts=_noise_counts(config),
        expected_noise=config.expected_noise,
    )
    codes = np.concatenate(kept) if traces else None
    return RunResult(stats, codes, config)


def decode(codes: np.ndarray, config: ExperimentConfig) -> dict[str, np.ndarray]:
    """Per-atom trace columns from outcome codes."""
    n = codes.shape[0]
    emitted = (codes & EMITTED) != 0
    emission_time = np.full(n, np.nan)
    idx = np.flatnonzero(emitted)
    if idx.size:
        key = _rng.seed_key(config.master_seed)
        ud = _rng.uniforms(key, idx.astype(np.uint64), _rng.DRAW_DECAY)
        emission_time[idx] = _emission_lead(ud, config.decay_time_available, config.lifetime)
    return {
        "atom_index": np.arange(n, dtype=np.int64),
        "detected_right": (codes & DETECTED_R) != 0,
        "excited": (codes & EXCITED) != 0,
        "photon_emitted": emitted,
        "emission_right": (codes & EMITTED_R) != 0,
        "precollapsed": (codes & PRECOLLAPSED) != 0,
        "emission_time": emission_time,
    }
