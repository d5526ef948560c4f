"""Command-line surface: simulate, analyze, sweep, eraser.

Exit codes: 0 success, 2 configuration problem (bad file, bad key, bad
value, unknown preset), 3 runtime failure (missing or malformed event
log, unwritable output, no analyzable field).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .analysis import (
    FringeHistogram,
    compute_metrics,
    histogram,
    overlap_distinguishability,
    visibility,
)
from .config import ConfigError, ExperimentConfig, build_preset, parse_config
from .experiments import fringe_window, run_experiment
from .io import (
    SWEEP_HEADER,
    read_events_csv,
    write_events_csv,
    write_histogram_csv,
    write_histogram_pgm,
    write_metrics_csv,
)
from .measurement import coincidence_modulate
from .wavefield import single_slit_intensity


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fringelab",
        description="Event-level simulator for two-slit and interferometer benches with which-way readout.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run an experiment and write an events CSV")
    sim.add_argument("--config", help="config file (key = value lines)")
    sim.add_argument("--preset", help="preset scenario name")
    sim.add_argument("--events", type=int, required=True, help="number of particles to send")
    sim.add_argument("--seed", type=int, required=True, help="random stream seed")
    sim.add_argument("--out", required=True, help="output events CSV path")

    ana = sub.add_parser("analyze", help="histogram an events CSV and compute fringe metrics")
    ana.add_argument("--events", required=True, help="events CSV from simulate")
    ana.add_argument("--bins", type=int, default=128, help="histogram bins (default 128)")
    ana.add_argument("--out-hist", required=True, help="output histogram CSV path")
    ana.add_argument("--out-metrics", required=True, help="output metrics CSV path")
    ana.add_argument("--pgm", help="optional 1-row grayscale PGM rendering of the histogram")

    sw = sub.add_parser("sweep", help="rerun one config while stepping a single key")
    sw.add_argument("--config", required=True, help="base config file")
    sw.add_argument("--param", required=True, help="dotted config key to step")
    sw.add_argument("--from", dest="start", type=float, required=True, help="first value")
    sw.add_argument("--to", dest="stop", type=float, required=True, help="last value")
    sw.add_argument("--steps", type=int, required=True, help="number of values")
    sw.add_argument("--events", type=int, required=True, help="events per step")
    sw.add_argument("--seed", type=int, required=True, help="seed reused for every step")
    sw.add_argument("--out", required=True, help="output sweep CSV path")

    er = sub.add_parser("eraser", help="coincidence-modulate a recorded events CSV")
    er.add_argument("--events", required=True, help="events CSV from simulate")
    er.add_argument("--gamma", type=float, required=True, help="modulation weight in [-1, 1]")
    er.add_argument("--bins", type=int, default=128, help="histogram bins (default 128)")
    er.add_argument("--out", required=True, help="output modulated histogram CSV path")
    return parser


def _load_config_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc


def _resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    if not args.config and not args.preset:
        raise ConfigError("provide --config and/or --preset")
    if args.config:
        config = parse_config(_load_config_text(args.config))
        if args.preset and args.preset != config.scenario:
            raise ConfigError(
                f"--preset {args.preset} does not match the config's scenario {config.scenario}"
            )
        return config
    return build_preset(args.preset)


def _auto_field(log) -> str:
    if any(e.screen_x is not None for e in log.events):
        return "screen_x"
    if any(e.scatter_xy is not None for e in log.events):
        return "scatter_projection"
    raise ValueError("event log holds only port records; nothing to histogram")


def _field_range(log, field: str) -> tuple[float, float]:
    if field == "screen_x":
        values = [e.screen_x for e in log.events if e.screen_x is not None]
    else:
        values = [e.scatter_xy[0] for e in log.events if e.scatter_xy is not None]
    if not values:
        raise ValueError(f"event log has no {field} records")
    lo, hi = min(values), max(values)
    if not lo < hi:
        raise ValueError("all recorded positions coincide; cannot bin")
    return lo, hi


def _cmd_simulate(args: argparse.Namespace) -> int:
    config = _resolve_config(args)
    log = run_experiment(config, args.events, args.seed)
    write_events_csv(log, args.out)
    print(f"{config.scenario}: wrote {len(log)} events to {args.out}")
    return 0


def _cmd_analyze(args: argparse.Namespace) -> int:
    log = read_events_csv(args.events)
    field = _auto_field(log)
    h = histogram(log, field, args.bins, _field_range(log, field))
    metrics = compute_metrics(h, log)
    write_histogram_csv(h, args.out_hist)
    write_metrics_csv(metrics, args.out_metrics)
    if args.pgm:
        write_histogram_pgm(h, args.pgm)
    v = metrics.visibility
    print(f"{field}: {int(h.total)} events in {h.n_bins} bins ({h.n_dropped} outside range)")
    print(f"visibility: {v.value if v.present else v.flag}")
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    text = _load_config_text(args.config)
    if args.steps < 1:
        raise ConfigError("steps must be at least 1")
    lines = [SWEEP_HEADER]
    for value in np.linspace(args.start, args.stop, args.steps).tolist():
        config = parse_config(text, overrides={args.param: repr(value)})
        log = run_experiment(config, args.events, args.seed)
        field = _auto_field(log)
        window = fringe_window(config) if field == "screen_x" else None
        if window is not None:
            n_bins, value_range = window
        else:
            n_bins, value_range = 128, _field_range(log, field)
        h = histogram(log, field, n_bins, value_range)
        v = visibility(h)
        d = overlap_distinguishability(config.detector_overlap)
        lhs = v.value * v.value + d * d if v.present else None
        cells = [repr(value), repr(v.value) if v.present else "", repr(d), repr(lhs) if lhs is not None else ""]
        lines.append(",".join(cells))
    Path(args.out).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    print(f"swept {args.param} over {args.steps} steps; wrote {args.out}")
    return 0


def _cmd_eraser(args: argparse.Namespace) -> int:
    log = read_events_csv(args.events)
    if not log.events:
        raise ValueError("event log is empty")
    joint = histogram(log, "screen_x", args.bins, _field_range(log, "screen_x"))
    config = build_preset(log.events[0].experiment)
    centers = joint.bin_centers()
    profile1 = np.asarray(single_slit_intensity(config.geometry, config.beam, 1, centers))
    profile2 = np.asarray(single_slit_intensity(config.geometry, config.beam, 2, centers))
    scale = joint.total / (profile1.sum() + profile2.sum())
    single1 = FringeHistogram(joint.bin_edges, profile1 * scale)
    single2 = FringeHistogram(joint.bin_edges, profile2 * scale)
    modulated = coincidence_modulate(joint, single1, single2, args.gamma)
    write_histogram_csv(modulated, args.out)
    v_before = visibility(joint)
    v_after = visibility(modulated)
    print(f"joint visibility: {v_before.value if v_before.present else v_before.flag}")
    print(f"modulated visibility (gamma={args.gamma}): {v_after.value if v_after.present else v_after.flag}")
    return 0


_COMMANDS = {
    "simulate": _cmd_simulate,
    "analyze": _cmd_analyze,
    "sweep": _cmd_sweep,
    "eraser": _cmd_eraser,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"fringelab: config error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"fringelab: error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
