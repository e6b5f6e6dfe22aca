"""Flat ``key = value`` run configuration with units in the key names.

Blank lines and ``#`` comments are ignored. Every key is optional; missing
keys take the nominal sodium-beam values. ``dump_config`` writes the
canonical form that ``parse_config_text`` reads back unchanged.
"""
from __future__ import annotations

import hashlib
import logging
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable

from .constants import SPEED_OF_LIGHT
from .decoherence import CollisionEnvironment
from .design import BeamSpec
from .experiment.config import ConfigError, ExperimentConfig
from .laser_probe import Parity, tune_separation
from .quantum_state import Scenario

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class PatternOptions:
    mode: str = "coherent"
    relative_phase: float | None = None  # None: the laser phase difference of the config
    n_theta: int = 91
    n_phi: int = 180


@dataclass(frozen=True)
class RunConfig:
    experiment: ExperimentConfig = field(default_factory=ExperimentConfig)
    beam: BeamSpec = field(default_factory=BeamSpec)
    collisions: CollisionEnvironment = field(default_factory=CollisionEnvironment)
    pattern: PatternOptions = field(default_factory=PatternOptions)
    sweep_speeds: tuple[float, ...] = (
        SPEED_OF_LIGHT, 1.25 * SPEED_OF_LIGHT, 2 * SPEED_OF_LIGHT, 4 * SPEED_OF_LIGHT, math.inf,
    )
    sweep_lead_times: tuple[float, ...] = (1e-9, 3e-9, 6e-9, 9e-9, 12e-9)
    significance: float = 0.01
    min_signal_rate: float = 1e-3
    detection_time: float = 1e-12
    autotune: bool = False

    def apply_overrides(self, *, seed=None, scenario=None, atoms=None, autotune=False) -> "RunConfig":
        exp = self.experiment
        changes = {}
        if seed is not None:
            changes["master_seed"] = _int_range("master_seed", seed, 0, 2**64 - 1)
        if scenario is not None:
            changes["scenario"] = _scenario("scenario", scenario)
        if atoms is not None:
            changes["n_atoms"] = _int_range("atom_count", atoms, 1, None)
        rc = replace(self, experiment=_rebuild(exp, changes))
        if autotune:
            rc = _autotune(replace(rc, autotune=True))
        return rc


# -- value parsers ---------------------------------------------------------

def _float(key: str, text) -> float:
    try:
        v = float(text)
    except (TypeError, ValueError):
        raise ConfigError(key, f"expected a number, got {text!r}") from None
    return v


def _int_range(key: str, text, lo, hi) -> int:
    try:
        v = int(str(text).strip(), 0)
    except ValueError:
        raise ConfigError(key, f"expected an integer, got {text!r}") from None
    if v < lo or (hi is not None and v > hi):
        raise ConfigError(key, f"must lie in [{lo}, {hi if hi is not None else 'inf'}], got {v}")
    return v


def _bool(key: str, text) -> bool:
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(key, f"expected true/false, got {text!r}")


def _scenario(key: str, text) -> Scenario:
    try:
        return Scenario.parse(str(text))
    except ValueError as exc:
        raise ConfigError(key, str(exc)) from None


def _speed_token(key: str, tok: str) -> float:
    tok = tok.strip().lower()
    if tok in ("inf", "infinity", "conventional"):
        return math.inf
    if tok.endswith("c"):
        return _float(key, tok[:-1] or "1") * SPEED_OF_LIGHT
    return _float(key, tok)


def _speed_list(key: str, text) -> tuple[float, ...]:
    speeds = tuple(_speed_token(key, t) for t in str(text).split(",") if t.strip())
    if not speeds:
        raise ConfigError(key, "needs at least one speed")
    for s in speeds:
        if not s >= SPEED_OF_LIGHT:
            raise ConfigError(key, f"collapse speeds must be >= c (got {s!r} m/s)")
    return speeds


def _time_list(key: str, text) -> tuple[float, ...]:
    values = tuple(_float(key, t) for t in str(text).split(",") if t.strip())
    if not values or any(not (math.isfinite(v) and v >= 0) for v in values):
        raise ConfigError(key, "needs a comma list of finite times >= 0 s")
    return values


def _lead(key: str, text):
    if str(text).strip().lower() == "auto":
        return None
    return _float(key, text)


def _fmt_float(v: float) -> str:
    return repr(float(v))


def _fmt_speeds(vs) -> str:
    return ",".join("inf" if math.isinf(v) else repr(float(v)) for v in vs)


# key -> (section, attribute, parser, formatter)
_Spec = tuple[str, str, Callable, Callable]
KEYS: dict[str, _Spec] = {
    "beam_speed_m_per_s": ("experiment", "beam_speed", _float, _fmt_float),
    "separation_m": ("experiment", "separation", _float, _fmt_float),
    "laser_wavelength_m": ("experiment", "wavelength", _float, _fmt_float),
    "laser_lead_time_s": ("experiment", "laser_lead_time", _lead,
                          lambda v: "auto" if v is None else repr(float(v))),
    "focal_spot_width_m": ("experiment", "focal_spot_width", _float, _fmt_float),
    "peak_excitation_p0": ("experiment", "p0", _float, _fmt_float),
    "lifetime_s": ("experiment", "lifetime", _float, _fmt_float),
    "detector_efficiency": ("experiment", "detector_efficiency", _float, _fmt_float),
    "dark_rate_per_s": ("experiment", "dark_rate", _float, _fmt_float),
    "atom_count": ("experiment", "n_atoms", lambda k, t: _int_range(k, t, 1, None), str),
    "flux_atoms_per_s": ("experiment", "flux", _float, _fmt_float),
    "scenario": ("experiment", "scenario", _scenario, lambda s: s.label),
    "master_seed": ("experiment", "master_seed", lambda k, t: _int_range(k, t, 0, 2**64 - 1), str),
    "laser_angle_rad": ("experiment", "laser_angle", _float, _fmt_float),
    "evaluate_at_spot_entry": ("experiment", "evaluate_at_spot_entry", _bool, lambda b: str(b).lower()),
    "atom_mass_kg": ("beam", "mass", _float, _fmt_float),
    "grating_period_m": ("beam", "grating_period", _float, _fmt_float),
    "diffraction_order": ("beam", "diffraction_order", lambda k, t: _int_range(k, t, 0, None), str),
    "arm_length_m": ("beam", "arm_length", _float, _fmt_float),
    "grating_pairs": ("beam", "grating_pairs", lambda k, t: _int_range(k, t, 0, None), str),
    "collision_atom_speed_m_per_s": ("collisions", "atom_speed", _float, _fmt_float),
    "collision_mean_free_path_m": ("collisions", "mean_free_path", _float, _fmt_float),
    "phase_threshold_rad": ("collisions", "phase_threshold", _float, _fmt_float),
    "pattern_mode": ("pattern", "mode", lambda k, t: str(t).strip().lower(), str),
    "pattern_relative_phase_rad": ("pattern", "relative_phase", _lead,
                                   lambda v: "auto" if v is None else repr(float(v))),
    "pattern_n_theta": ("pattern", "n_theta", lambda k, t: _int_range(k, t, 2, None), str),
    "pattern_n_phi": ("pattern", "n_phi", lambda k, t: _int_range(k, t, 2, None), str),
    "sweep_speeds_m_per_s": ("run", "sweep_speeds", _speed_list, _fmt_speeds),
    "sweep_lead_times_s": ("run", "sweep_lead_times", _time_list,
                           lambda vs: ",".join(repr(float(v)) for v in vs)),
    "significance": ("run", "significance", _float, _fmt_float),
    "min_signal_rate_per_atom": ("run", "min_signal_rate", _float, _fmt_float),
    "detection_time_s": ("run", "detection_time", _float, _fmt_float),
    "autotune": ("run", "autotune", _bool, lambda b: str(b).lower()),
}


def _rebuild(obj, changes: dict):
    if not changes:
        return obj
    try:
        return replace(obj, **changes)
    except ConfigError:
        raise
    except ValueError as exc:
        # component validators raise plain ValueErrors naming the attribute
        attr = next(iter(changes)) if len(changes) == 1 else type(obj).__name__
        raise ConfigError(attr, str(exc)) from None


def _autotune(rc: RunConfig) -> RunConfig:
    exp = rc.experiment
    if exp.tuning.parity is Parity.ODD:
        return rc
    tuned = tune_separation(exp.separation * math.cos(exp.laser_angle), exp.wavelength)
    new_sep = tuned.separation / math.cos(exp.laser_angle)
    log.info("autotune: separation %.12g m -> %.12g m (%d half-waves, adjustment %.3g m)",
             exp.separation, new_sep, tuned.half_waves, abs(new_sep - exp.separation))
    return replace(rc, experiment=exp.replace(separation=new_sep))


def parse_config_text(text: str) -> RunConfig:
    sections: dict[str, dict] = {"experiment": {}, "beam": {}, "collisions": {}, "pattern": {}, "run": {}}
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", f"expected 'key = value', got {raw.strip()!r}")
        key, value = (p.strip() for p in line.split("=", 1))
        if key not in KEYS:
            raise ConfigError(key, f"unknown key (line {lineno})")
        if key in seen:
            raise ConfigError(key, f"duplicate key (line {lineno})")
        seen.add(key)
        section, attr, parse, _ = KEYS[key]
        sections[section][attr] = parse(key, value)

    def build(section, cls_default, key_of):
        try:
            return replace(cls_default, **sections[section])
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(key_of, str(exc)) from None

    base = RunConfig()
    # beam speed is shared by the beam spec and the experiment
    beam_changes = dict(sections["beam"])
    if "beam_speed" in sections["experiment"]:
        beam_changes["speed"] = sections["experiment"]["beam_speed"]
    collision_changes = dict(sections["collisions"])
    if "mass" in sections["beam"]:
        collision_changes["atom_mass"] = sections["beam"]["mass"]
    sections["beam"], sections["collisions"] = beam_changes, collision_changes
    pattern = build("pattern", base.pattern, "pattern")
    if pattern.mode not in ("coherent", "incoherent"):
        raise ConfigError("pattern_mode", f"must be coherent or incoherent, got {pattern.mode!r}")
    rc = RunConfig(
        experiment=build("experiment", base.experiment, "experiment"),
        beam=build("beam", base.beam, "beam"),
        collisions=build("collisions", base.collisions, "collisions"),
        pattern=pattern,
        **{**{k: getattr(base, k) for k in ("sweep_speeds", "sweep_lead_times", "significance",
                                             "min_signal_rate", "detection_time", "autotune")},
           **sections["run"]},
    )
    if not 0 < rc.significance < 1:
        raise ConfigError("significance", "must lie in (0, 1)")
    if not 0 < rc.min_signal_rate <= 1:
        raise ConfigError("min_signal_rate_per_atom", "must lie in (0, 1]")
    if not (math.isfinite(rc.detection_time) and rc.detection_time > 0):
        raise ConfigError("detection_time_s", "must be a positive finite time")
    if rc.autotune:
        rc = _autotune(rc)
    return rc


def parse_config(path) -> RunConfig:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError("config", f"cannot read {p}: {exc.strerror}") from None
    return parse_config_text(text)


def dump_config(rc: RunConfig) -> str:
    lines = []
    for key in sorted(KEYS):
        section, attr, _, fmt = KEYS[key]
        owner = rc if section == "run" else getattr(rc, section)
        lines.append(f"{key} = {fmt(getattr(owner, attr))}")
    return "\n".join(lines) + "\n"


def config_hash(rc: RunConfig) -> str:
    return hashlib.sha256(dump_config(rc).encode()).hexdigest()
