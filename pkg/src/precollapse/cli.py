"""``precollapse`` command line.

Each subcommand writes JSON and CSV data files plus ``manifest.json`` into
the output directory. Exit codes: 0 ok, 2 invalid configuration, 3 runtime
failure, 64 unknown subcommand.
"""
from __future__ import annotations

import argparse
import csv
import datetime as _dt
import json
import logging
import math
import sys
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from . import __version__, _accel
from .configfile import RunConfig, config_hash, dump_config, parse_config, parse_config_text
from .constants import SPEED_OF_LIGHT
from .decoherence import coherence_after, collisions_to_collapse, phase_step, time_to_collapse
from .design import feasibility_report, format_report, timing_budget
from .experiment import ConfigError, null_test, run, scenario_sweep
from .experiment.engine import decode
from .quantum_state import Scenario, atom_worldline, detection_events
from .radiation import EmitterPair, pattern_scan
from .spacetime import Event, Worldline, precollapse_apex, precollapse_duration

log = logging.getLogger("precollapse")

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME, EXIT_USAGE = 0, 2, 3, 64


def fmt(x) -> str:
    """CSV cell: 17 significant digits for floats, 0/1 for flags, blank for missing."""
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        if not math.isfinite(x):
            raise ValueError(f"refusing to write non-finite value {x!r}")
        return f"{float(x):.17g}"
    return str(x)


class Outputs:
    def __init__(self, root: Path):
        self.root = root
        self.files: list[str] = []
        root.mkdir(parents=True, exist_ok=True)

    def csv(self, name: str, header: Sequence[str], rows: Iterable[Sequence]) -> None:
        with open(self.root / name, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([fmt(v) for v in row])
        self.files.append(name)

    def json(self, name: str, obj) -> None:
        with open(self.root / name, "w") as fh:
            json.dump(obj, fh, indent=2, sort_keys=True, allow_nan=False)
            fh.write("\n")
        self.files.append(name)

    def text(self, name: str, body: str) -> None:
        (self.root / name).write_text(body)
        self.files.append(name)


def _speed_json(s: float):
    return None if math.isinf(s) else s


# -- subcommands -------------------------------------------------------------

def cmd_simulate(rc: RunConfig, out: Outputs, args) -> dict:
    cfg = rc.experiment
    result = run(cfg, traces=args.traces)
    st = result.stats
    verdict = null_test(st, significance=rc.significance, min_signal_rate=rc.min_signal_rate)
    timing = timing_budget(cfg)
    summary = {
        "scenario": cfg.scenario.label,
        "collapse_speed_m_per_s": _speed_json(cfg.scenario.speed),
        "backend": _accel.backend_name(),
        "stats": st.as_dict(),
        "null_test": verdict.as_dict(),
        "laser_phase_rad": cfg.laser_phase,
        "separation_parity": cfg.tuning.parity.value,
        "evaluation_lead_s": cfg.evaluation_lead,
        "decay_time_available_s": cfg.decay_time_available,
        "analytic_hk_decay_efficiency": timing.decay_efficiency,
    }
    out.json("simulate.json", summary)
    header = ["scenario", "n_atoms", "n_photons", "photon_rate", "photon_rate_se", "side_L", "side_R",
              "emission_L", "emission_R", "noise_counts", "expected_noise", "verdict", "p_value"]
    out.csv("simulate.csv", header, [[
        cfg.scenario.label, st.n_atoms, st.n_photons, st.photon_rate, st.photon_rate_se,
        st.side_counts[0], st.side_counts[1], st.emission_side_counts[0], st.emission_side_counts[1],
        st.noise_counts, st.expected_noise, verdict.verdict.value, verdict.p_value,
    ]])
    if args.traces:
        t = decode(result.codes, cfg)
        side = np.where(t["detected_right"], "R", "L")
        emit = np.where(t["photon_emitted"], np.where(t["emission_right"], "R", "L"), "")
        t_ns = t["emission_time"] * 1e9
        rows = (
            [i, side[i], t["excited"][i], t["photon_emitted"][i], emit[i] or None,
             None if np.isnan(t_ns[i]) else t_ns[i]]
            for i in range(len(side))
        )
        out.csv("atoms.csv", ["atom_index", "detected_side", "excited", "photon_emitted",
                              "emission_side", "emission_time_ns"], rows)
    print(f"{cfg.scenario.label}: {st.n_photons} photons from {st.n_atoms} atoms "
          f"(rate {st.photon_rate:.5f} +/- {st.photon_rate_se:.5f}); verdict {verdict.verdict.value}")
    return summary


def cmd_sweep(rc: RunConfig, out: Outputs, args) -> dict:
    table = scenario_sweep(rc.experiment, rc.sweep_speeds, rc.sweep_lead_times)
    header = ["scenario", "speed_m_per_s", "speed_over_c", "lead_time_s", "lead_time_ns",
              "evaluation_lead_ns", "speed_bound_m_per_s", "n_atoms", "n_photons", "photon_rate",
              "predicted_precollapse"]
    rows, records = [], []
    for r in table.rows():
        s = r["speed"]
        label = Scenario(s).label
        rows.append([label, None if math.isinf(s) else s, None if math.isinf(s) else s / SPEED_OF_LIGHT,
                     r["lead_time"], r["lead_time"] * 1e9, r["evaluation_lead"] * 1e9, r["speed_bound"],
                     r["n_atoms"], r["n_photons"], r["photon_rate"], r["predicted_precollapse"]])
        records.append({**r, "speed": _speed_json(s), "scenario": label})
    out.csv("sweep.csv", header, rows)
    summary = {"cells": records,
               "agrees_with_geometry": bool(np.all((table.n_photons > 0) == table.predicted_precollapse))}
    out.json("sweep.json", summary)
    print(f"sweep: {len(records)} cells, geometry agreement {summary['agrees_with_geometry']}")
    return summary


def cmd_pattern(rc: RunConfig, out: Outputs, args) -> dict:
    cfg, opts = rc.experiment, rc.pattern
    probe = cfg.probe
    delta = cfg.laser_phase if opts.relative_phase is None else opts.relative_phase
    pair = EmitterPair(separation=(cfg.separation, 0.0, 0.0), axis=probe.polarization,
                       wavenumber=probe.wavenumber, relative_phase=delta, mode=opts.mode)
    scan = pattern_scan(pair, opts.n_theta, opts.n_phi)
    out.csv("pattern.csv", ["theta_rad", "phi_rad", "intensity"],
            ([s.theta, s.phi, s.intensity] for s in scan))
    summary = {"mode": opts.mode, "relative_phase_rad": delta, "n_theta": opts.n_theta,
               "n_phi": opts.n_phi, "max_intensity": float(scan.intensity.max()),
               "mean_intensity": float(scan.intensity.mean())}
    out.json("pattern.json", summary)
    print(f"pattern: {len(scan)} directions, max intensity {summary['max_intensity']:.4g}")
    return summary


def cmd_design(rc: RunConfig, out: Outputs, args) -> dict:
    report = feasibility_report(rc.beam, rc.experiment, rc.detection_time)
    d = report.as_dict()
    out.json("design.json", d)
    flat = [(k, v) for k, v in d.items() if isinstance(v, (int, float)) and not isinstance(v, bool)]
    flat += [(f"timing.{k}", v) for k, v in d["timing"].items()]
    out.csv("design.csv", ["quantity", "value"], flat)
    table = format_report(report, rc.beam)
    out.text("design.txt", table)
    sys.stdout.write(table)
    return d


def cmd_geometry(rc: RunConfig, out: Outputs, args) -> dict:
    cfg = rc.experiment
    A, B = detection_events(cfg)
    W = precollapse_apex(A, B)
    hk = precollapse_duration(atom_worldline(cfg), A, B, SPEED_OF_LIGHT)
    mid = precollapse_duration(Worldline(Event(0.0), (0.0, 0.0, cfg.beam_speed)), A, B, SPEED_OF_LIGHT)
    rows = [("apex_lead_time", A.t - W.t), ("twin_peak_window_hk", hk), ("midpoint_window_hk", mid)]
    speed = cfg.scenario.speed
    if cfg.scenario.kind == "finite":
        rows.append(("twin_peak_window_scenario",
                     precollapse_duration(atom_worldline(cfg), A, B, speed)))
    out.csv("geometry.csv", ["quantity", "value_s", "value_ns"], [(k, v, v * 1e9) for k, v in rows])
    summary = {"separation_m": cfg.separation, "apex": {"t": W.t, "x": W.x, "y": W.y, "z": W.z},
               **{f"{k}_s": v for k, v in rows}}
    out.json("geometry.json", summary)
    for k, v in rows:
        print(f"{k:28s} {v * 1e9:.6f} ns")
    return summary


def cmd_decohere(rc: RunConfig, out: Outputs, args) -> dict:
    env = rc.collisions
    sigma = phase_step(env.kinetic_energy, env.collision_interval)
    n = collisions_to_collapse(env)
    t = time_to_collapse(env)
    summary = {
        "kinetic_energy_j": env.kinetic_energy,
        "collision_interval_s": env.collision_interval,
        "phase_step_rad": sigma,
        "phase_threshold_rad": env.phase_threshold,
        "collisions_to_collapse": n,
        "time_to_collapse_s": t,
        "time_to_collapse_ns": t * 1e9,
        "residual_coherence": coherence_after(n, sigma),
    }
    out.json("decohere.json", summary)
    out.csv("decohere.csv", ["quantity", "value"], list(summary.items()))
    print(f"phase step {sigma:.3f} rad/collision; collapse after {n} collision(s) = {t * 1e9:.3g} ns")
    return summary


COMMANDS: dict[str, tuple[Callable, str]] = {
    "simulate": (cmd_simulate, "Monte Carlo run of the probe experiment plus the null-test verdict"),
    "sweep": (cmd_sweep, "photon rates over a collapse-speed x laser-lead-time grid"),
    "pattern": (cmd_pattern, "angular pattern of the scattered photons (CSV)"),
    "design": (cmd_design, "experiment feasibility report"),
    "geometry": (cmd_geometry, "pre-collapse apex and window table"),
    "decohere": (cmd_decohere, "collision phase-randomization time in the detector"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="key = value configuration file")
    common.add_argument("--out", type=Path, default=Path("out"), help="output directory (default: out)")
    common.add_argument("--seed", type=int, help="override master_seed")
    common.add_argument("--scenario", help="conventional | hk | speed:<m/s>")
    common.add_argument("--atoms", type=int, help="override atom_count")
    common.add_argument("--autotune", action="store_true",
                        help="snap the separation to an odd number of half-wavelengths")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="precollapse", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=help_text)
        if name == "simulate":
            p.add_argument("--traces", action="store_true", help="also write per-atom atoms.csv")
    return parser


def load(args) -> RunConfig:
    rc = parse_config(args.config) if args.config else parse_config_text("")
    return rc.apply_overrides(seed=args.seed, scenario=args.scenario, atoms=args.atoms,
                              autotune=args.autotune)


def _now() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    first = next((a for a in argv if not a.startswith("-")), None)
    if first is not None and first not in COMMANDS:
        parser.print_usage(sys.stderr)
        print(f"precollapse: unknown subcommand {first!r}", file=sys.stderr)
        return EXIT_USAGE
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")

    started = _now()
    try:
        rc = load(args)
    except ConfigError as exc:
        print(f"precollapse: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = Outputs(args.out)
    try:
        out.text("config.txt", dump_config(rc))
        COMMANDS[args.command][0](rc, out, args)
    except ConfigError as exc:
        print(f"precollapse: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - reported as a runtime failure
        log.debug("runtime failure", exc_info=True)
        print(f"precollapse: {args.command} failed: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    manifest = {
        "command": args.command,
        "config_hash": config_hash(rc),
        "master_seed": rc.experiment.master_seed,
        "tool_version": __version__,
        "backend": _accel.backend_name(),
        "started_at": started,
        "finished_at": _now(),
        "outputs": out.files,
    }
    with open(out.root / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
