"""End-to-end processing: radar cube in, gated IBI estimates out.

Chain: Taylor-weighted beamforming -> static-clutter removal -> localization
-> phase displacement -> Gaussian detrend -> PSD cutoff selection ->
zero-phase filtering -> feature topology -> gated intervals.
"""

from __future__ import annotations

from dataclasses import dataclass

from .config import PipelineConfig
from .displacement import (
    DetrendConfig,
    DisplacementTrace,
    extract_phase_displacement,
    gaussian_detrend,
)
from .imaging import (
    RadarCube,
    TargetLocation,
    beamform,
    locate_target,
    make_beamformer_weights,
    remove_static_clutter,
)
from .spectral_cutoff import (
    CutoffSelection,
    FilterSpec,
    Psd,
    apply_filter,
    estimate_psd,
    select_cutoff,
)
from .topology_ibi import (
    FeatureSequence,
    GateThresholds,
    IbiSeries,
    estimate_ibi,
    extract_features,
)

__all__ = ["ProcessResult", "process_cube", "filter_for_topology", "run_topology"]


@dataclass
class ProcessResult:
    """Everything the processing chain produced, for reporting and export."""

    location: TargetLocation
    displacement: DisplacementTrace  # detrended d(t)
    psd: Psd
    selection: CutoffSelection
    filtered: DisplacementTrace
    features: FeatureSequence
    ibi: IbiSeries


def filter_for_topology(
    trace: DisplacementTrace,
    spec: FilterSpec,
    noise_lowpass_hz: float | None,
) -> DisplacementTrace:
    """Apply the selected filter plus the anti-noise low-pass guard.

    Difference-based feature extraction is driven by the highest frequencies
    present; wideband phase noise above the usable heartbeat harmonics would
    dominate it, so the pipeline always smooths with a fixed low-pass far
    above the cutoff-selection region. Pass None to disable.
    """
    out = apply_filter(trace, spec)
    if noise_lowpass_hz is not None and noise_lowpass_hz < trace.fs / 2:
        from scipy import signal as _sig

        sos = _sig.butter(4, noise_lowpass_hz, btype="lowpass", fs=trace.fs, output="sos")
        smoothed = _sig.sosfiltfilt(sos, out.samples)
        out = DisplacementTrace(
            samples=smoothed, fs=out.fs, t0=out.t0, detrended=out.detrended
        )
    return out


def run_topology(
    filtered: DisplacementTrace, cfg: PipelineConfig
) -> tuple[FeatureSequence, IbiSeries]:
    seq = extract_features(filtered, cfg.min_swing_frac)
    series = estimate_ibi(
        filtered,
        seq,
        GateThresholds(c0=cfg.c0, m0=cfg.m0),
        cfg.ibi_bounds(),
        window=cfg.topo_window,
        seg_len=cfg.corr_seg_len_s,
    )
    return seq, series


def process_cube(cube: RadarCube, cfg: PipelineConfig | None = None) -> ProcessResult:
    """Run the full chain on a cube with the given configuration."""
    cfg = cfg or PipelineConfig()
    horizon = cfg.horizon_s if cfg.horizon_s is not None else cube.duration
    horizon = min(horizon, cube.duration)

    weights = make_beamformer_weights(
        cube.n_channels,
        sidelobe_db=cfg.taylor_sidelobe_db,
        nbar=cfg.taylor_nbar,
        angle_span_deg=cfg.angle_span_deg,
        angle_step_deg=cfg.angle_step_deg,
    )
    image = beamform(cube, weights)
    image = remove_static_clutter(image, horizon)
    location = locate_target(image, horizon, cfg.localization_window)

    raw = extract_phase_displacement(image, location)
    detrended = gaussian_detrend(
        raw, DetrendConfig(sigma=cfg.detrend_sigma_s, truncation=cfg.detrend_truncation)
    )

    psd = estimate_psd(detrended, cfg.psd_smoothing_bw_hz)
    selection = select_cutoff(psd, cfg.species_band)
    spec = FilterSpec(kind="high-pass", cutoffs=(selection.f_c,), order=cfg.filter_order)
    filtered = filter_for_topology(detrended, spec, cfg.noise_lowpass_hz)
    seq, series = run_topology(filtered, cfg)

    return ProcessResult(
        location=location,
        displacement=detrended,
        psd=psd,
        selection=selection,
        filtered=filtered,
        features=seq,
        ibi=series,
    )
