"""Command-line surface: simulate, process, evaluate, sweep, plot.

Exit codes: 0 success, 1 usage/configuration error, 2 data error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import scene_sim
from .config import PipelineConfig, chimp_config, human_config
from .errors import (
    DataIntegrityError,
    DegenerateInputError,
    EmptyComparisonError,
)
from .evaluation import best_sweep_point, cutoff_sweep, load_reference_beats, rms_error
from .io_formats import (
    read_ibi_csv,
    read_radar_cube,
    write_beat_times_csv,
    write_displacement_csv,
    write_ibi_csv,
    write_json,
    write_radar_cube,
    write_sweep_csv,
)
from .pipeline import process_cube
from .scene_sim import SceneSpec, PhysioModel, default_geometry
from .spectral_cutoff import CHIMP_BAND, HUMAN_BAND, SpeciesBand
from .topology_ibi import GateThresholds

__all__ = ["cli", "main"]

_PRESETS = {
    "human-default": (scene_sim.human_default_scene, human_config),
    "chimp-default": (scene_sim.chimp_default_scene, chimp_config),
}


def _scene_from_json(path) -> SceneSpec:
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    physio = PhysioModel(**data.pop("physio", {}))
    clutter = [
        (float(r), float(a), complex(amp[0], amp[1]))
        for r, a, amp in data.pop("clutter", [])
    ]
    return SceneSpec(physio=physio, clutter=clutter, **data)


def _parse_band(text: str) -> SpeciesBand:
    if text == "human":
        return HUMAN_BAND
    if text in ("chimp", "chimpanzee"):
        return CHIMP_BAND
    try:
        lo, hi = (float(v) for v in text.split(","))
    except ValueError:
        raise ValueError(f"band must be 'human', 'chimpanzee' or 'lo,hi', got {text!r}")
    return SpeciesBand("custom", lo, hi)


def _load_config(args) -> PipelineConfig:
    if getattr(args, "config", None):
        with open(args.config, "r", encoding="utf-8") as fh:
            cfg = PipelineConfig.from_dict(json.load(fh))
    elif getattr(args, "preset", None) == "chimp-default":
        cfg = chimp_config()
    else:
        cfg = human_config()
    for flag, attr in [
        ("band", "species_band"),
        ("c0", "c0"),
        ("m0", "m0"),
        ("order", "filter_order"),
        ("psd_bw", "psd_smoothing_bw_hz"),
        ("sigma", "detrend_sigma_s"),
        ("horizon", "horizon_s"),
        ("lowpass", "noise_lowpass_hz"),
    ]:
        value = getattr(args, flag, None)
        if value is not None:
            if flag == "band":
                value = _parse_band(value)
            setattr(cfg, attr, value)
    if getattr(args, "no_lowpass", False):
        cfg.noise_lowpass_hz = None
    return cfg


def _cmd_simulate(args) -> int:
    if args.scene:
        scene = _scene_from_json(args.scene)
    else:
        make_scene, _ = _PRESETS[args.preset]
        scene = make_scene()
    if args.snr is not None:
        scene.noise_snr_db = None if args.snr == float("inf") else args.snr
    if args.duration is not None:
        scene.duration = args.duration
    geom = default_geometry()
    truth = scene_sim.synth_displacement(
        scene.physio, scene.slow_time_fs, scene.n_samples / scene.slow_time_fs
    )
    cube = scene_sim.synth_radar_cube(scene, geom, seed=args.seed)
    write_radar_cube(args.output, cube, n_tx=geom.n_tx, n_rx=geom.n_rx)
    truth_path = args.truth or args.output + ".truth.csv"
    write_beat_times_csv(truth_path, truth.pulse_onsets)
    print(f"wrote {args.output} ({cube.n_t} frames) and {truth_path} "
          f"({len(truth.pulse_onsets)} beats)")
    return 0


def _stem(path: str) -> str:
    base = os.path.basename(path)
    return base[: -len(".rc")] if base.endswith(".rc") else os.path.splitext(base)[0]


def _cmd_process(args) -> int:
    cfg = _load_config(args)
    cube = read_radar_cube(args.cube)
    result = process_cube(cube, cfg)
    out_dir = args.out_dir or "."
    os.makedirs(out_dir, exist_ok=True)
    stem = os.path.join(out_dir, _stem(args.cube))
    disp_path = args.displacement or stem + ".displacement.csv"
    cut_path = args.cutoff or stem + ".cutoff.json"
    ibi_path = args.ibi or stem + ".ibi.csv"
    write_displacement_csv(disp_path, result.displacement)
    write_json(cut_path, result.selection.to_dict())
    write_ibi_csv(ibi_path, result.ibi)
    if args.psd:
        lines = ["freq_hz,power_m2_per_hz"]
        for f, p in zip(result.psd.freqs, result.psd.power):
            lines.append(f"{f:.9g},{p:.9g}")
        from .io_formats import atomic_write_text

        atomic_write_text(args.psd, "\n".join(lines) + "\n")
    print(
        f"target at {result.location.range:.3f} m / "
        f"{np.rad2deg(result.location.angle):.1f} deg; "
        f"f_c = {result.selection.f_c:.3f} Hz "
        f"(f_h2 = {result.selection.f_h2:.3f} Hz); "
        f"{len(result.ibi)} interval estimates, coverage {result.ibi.coverage:.1%}"
    )
    return 0


def _cmd_evaluate(args) -> int:
    est = read_ibi_csv(args.ibi)
    ref = load_reference_beats(args.reference)
    report = rms_error(est, ref)
    data = report.to_dict()
    if args.output:
        write_json(args.output, data)
    print(json.dumps({k: data[k] for k in ("rms_error_s", "n_compared", "coverage")}))
    return 0


def _parse_grid(text: str) -> np.ndarray:
    try:
        start, stop, step = (float(v) for v in text.split(":"))
    except ValueError:
        raise ValueError(f"grid must be start:stop:step, got {text!r}")
    n = int(round((stop - start) / step))
    return np.round(start + step * np.arange(n + 1), 12)


def _cmd_sweep(args) -> int:
    cfg = _load_config(args)
    cube = read_radar_cube(args.cube)
    ref = load_reference_beats(args.reference)
    result = process_cube(cube, cfg)
    grid = _parse_grid(args.grid)
    points = cutoff_sweep(
        result.displacement,
        ref,
        grid,
        GateThresholds(c0=cfg.c0, m0=cfg.m0),
        cfg.ibi_bounds(),
        filter_order=cfg.filter_order,
        noise_lowpass_hz=cfg.noise_lowpass_hz,
        min_swing_frac=cfg.min_swing_frac,
        topo_window=cfg.topo_window,
        corr_seg_len=cfg.corr_seg_len_s,
    )
    write_sweep_csv(args.output, points)
    try:
        best = best_sweep_point(points, min_coverage=args.min_coverage)
        print(
            f"selected f_c = {result.selection.f_c:.3f} Hz; sweep best "
            f"f_c = {best.f_c:.3f} Hz (rms {best.rms_error * 1e3:.2f} ms)"
        )
    except EmptyComparisonError:
        print("sweep produced no defined errors")
    return 0


def _cmd_plot(args) -> int:
    from .plotting import plot_columns

    annotate = None
    if args.annotate_cutoff:
        with open(args.annotate_cutoff, "r", encoding="utf-8") as fh:
            annotate = json.load(fh)
    plot_columns(
        args.input,
        args.output,
        x=args.x,
        y=args.y,
        style=args.style,
        annotate_cutoff=annotate,
        logy=args.logy,
        title=args.title,
    )
    print(f"wrote {args.output}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="radar-ibi",
        description="Noncontact heartbeat inter-beat-interval estimation from radar slow-time data",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="synthesize a radar cube plus ground-truth beats")
    p.add_argument("--preset", choices=sorted(_PRESETS), default="human-default")
    p.add_argument("--scene", help="scene JSON overriding the preset")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--snr", type=float, default=None, help="noise SNR in dB (inf disables noise)")
    p.add_argument("--duration", type=float, default=None)
    p.add_argument("-o", "--output", required=True, help="cube file to write")
    p.add_argument("--truth", default=None, help="beat-times sidecar (default <output>.truth.csv)")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("process", help="cube -> displacement + cutoff + IBI estimates")
    p.add_argument("cube")
    p.add_argument("-c", "--config", help="pipeline config JSON")
    p.add_argument("--preset", choices=sorted(_PRESETS), default=None,
                   help="base config preset when no config file is given")
    p.add_argument("--band", help="species band: human, chimpanzee, or 'lo,hi' in Hz")
    p.add_argument("--c0", type=float, default=None)
    p.add_argument("--m0", type=float, default=None)
    p.add_argument("--order", type=int, default=None)
    p.add_argument("--psd-bw", dest="psd_bw", type=float, default=None)
    p.add_argument("--sigma", type=float, default=None)
    p.add_argument("--horizon", type=float, default=None)
    p.add_argument("--lowpass", type=float, default=None)
    p.add_argument("--no-lowpass", action="store_true")
    p.add_argument("--out-dir", default=None)
    p.add_argument("--displacement", default=None)
    p.add_argument("--cutoff", default=None)
    p.add_argument("--ibi", default=None)
    p.add_argument("--psd", default=None, help="optionally dump the smoothed PSD as CSV")
    p.set_defaults(func=_cmd_process)

    p = sub.add_parser("evaluate", help="compare an IBI CSV against reference beat times")
    p.add_argument("ibi")
    p.add_argument("reference")
    p.add_argument("-o", "--output", default=None, help="report JSON path")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("sweep", help="RMS error versus forced high-pass cutoff")
    p.add_argument("cube")
    p.add_argument("reference")
    p.add_argument("-c", "--config", help="pipeline config JSON")
    p.add_argument("--preset", choices=sorted(_PRESETS), default=None)
    p.add_argument("--band", default=None)
    p.add_argument("--c0", type=float, default=None)
    p.add_argument("--m0", type=float, default=None)
    p.add_argument("--order", type=int, default=None)
    p.add_argument("--grid", default="0.5:3.0:0.1")
    p.add_argument("--min-coverage", type=float, default=0.0)
    p.add_argument("-o", "--output", required=True, help="sweep CSV path")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("plot", help="render a produced CSV as a standalone SVG")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--x", default=None)
    p.add_argument("--y", default=None)
    p.add_argument("--style", choices=["line", "scatter"], default="line")
    p.add_argument("--logy", action="store_true")
    p.add_argument("--title", default=None)
    p.add_argument("--annotate-cutoff", default=None, help="cutoff JSON for vertical markers")
    p.set_defaults(func=_cmd_plot)

    return parser


def cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return args.func(args)
    except (DataIntegrityError, EmptyComparisonError, DegenerateInputError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
