"""Accuracy evaluation against reference beat times.

The reference interval function is a zero-order hold between consecutive
beats; estimates are compared at their midpoint times and summarized by the
RMS error over the defined (non-missing) estimates only.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .displacement import DisplacementTrace
from .errors import DataIntegrityError, EmptyComparisonError
from .spectral_cutoff import FilterSpec, apply_filter
from .topology_ibi import GateThresholds, IbiSeries, estimate_ibi, extract_features

__all__ = [
    "ReferenceIbi",
    "EvalReport",
    "SweepPoint",
    "rms_error",
    "cutoff_sweep",
    "load_reference_beats",
    "best_sweep_point",
]


@dataclass
class ReferenceIbi:
    """Reference beat (R-peak / pulse-onset) times and derived intervals."""

    beat_times: np.ndarray

    def __post_init__(self):
        self.beat_times = np.asarray(self.beat_times, dtype=float)
        if len(self.beat_times) < 2:
            raise ValueError("reference needs at least two beats")
        if not np.all(np.diff(self.beat_times) > 0):
            raise ValueError("beat times must be strictly increasing")

    def intervals(self) -> np.ndarray:
        return np.diff(self.beat_times)

    def midpoints(self) -> np.ndarray:
        return 0.5 * (self.beat_times[:-1] + self.beat_times[1:])

    def interval_at(self, t: np.ndarray) -> np.ndarray:
        """Step interpolation: the interval defined by the surrounding beats.

        Times outside [first beat, last beat) return NaN (undefined).
        """
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(self.beat_times, t, side="right") - 1
        ivs = self.intervals()
        out = np.full(t.shape, np.nan)
        ok = (idx >= 0) & (idx < len(ivs))
        out[ok] = ivs[idx[ok]]
        return out


@dataclass
class EvalReport:
    rms_error: float
    n_compared: int
    coverage: float
    per_entry_errors: np.ndarray = field(default_factory=lambda: np.empty(0))

    def to_dict(self) -> dict:
        return {
            "rms_error_s": self.rms_error,
            "n_compared": self.n_compared,
            "coverage": self.coverage,
            "per_entry_errors_s": [float(e) for e in self.per_entry_errors],
        }


@dataclass
class SweepPoint:
    f_c: float
    rms_error: float  # NaN when the cutoff produced no comparable estimates
    coverage: float


def rms_error(est: IbiSeries, ref: ReferenceIbi) -> EvalReport:
    """RMS difference between estimated and reference intervals.

    The reference is evaluated at each estimate's midpoint time; estimates
    outside the reference span are excluded, mirroring the sparsity of the
    gated estimate itself.
    """
    times = est.times()
    ref_iv = ref.interval_at(times)
    ok = np.isfinite(ref_iv)
    if not ok.any():
        raise EmptyComparisonError("no estimate midpoints inside the reference span")
    errors = est.intervals()[ok] - ref_iv[ok]
    coverage = est.coverage
    if not np.isfinite(coverage):
        # series loaded from file without a record length: measure the union
        # of covered spans against the reference span instead
        span = ref.beat_times[-1] - ref.beat_times[0]
        covered = _union_length(times[ok], est.intervals()[ok])
        coverage = covered / span if span > 0 else 0.0
    return EvalReport(
        rms_error=float(np.sqrt(np.mean(errors**2))),
        n_compared=int(ok.sum()),
        coverage=float(coverage),
        per_entry_errors=errors,
    )


def _union_length(mids: np.ndarray, intervals: np.ndarray) -> float:
    spans = sorted(zip(mids - intervals / 2, mids + intervals / 2))
    total = 0.0
    cur_s = cur_e = None
    for s, e in spans:
        if cur_s is None:
            cur_s, cur_e = s, e
        elif s <= cur_e:
            cur_e = max(cur_e, e)
        else:
            total += cur_e - cur_s
            cur_s, cur_e = s, e
    if cur_s is not None:
        total += cur_e - cur_s
    return total


def cutoff_sweep(
    trace: DisplacementTrace,
    ref: ReferenceIbi,
    f_grid,
    thresholds: GateThresholds,
    ibi_bounds: tuple,
    filter_order: int = 8,
    noise_lowpass_hz: float | None = 12.0,
    min_swing_frac: float = 0.1,
    topo_window: int = 9,
    corr_seg_len: float = 0.6,
) -> list[SweepPoint]:
    """RMS error and coverage as a function of a forced high-pass cutoff.

    Each grid point runs filter -> feature extraction -> gated estimation ->
    RMS comparison. Cutoffs that fail (no trough interaction needed here, but
    e.g. empty comparisons) yield NaN error and are skipped by argmin.
    """
    from .pipeline import filter_for_topology  # local import avoids a cycle

    out = []
    for f_c in np.asarray(f_grid, dtype=float):
        if not (0 < f_c < trace.fs / 2):
            raise ValueError(f"cutoff {f_c} Hz outside (0, {trace.fs / 2}) Hz")
        spec = FilterSpec(kind="high-pass", cutoffs=(f_c,), order=filter_order)
        filtered = filter_for_topology(trace, spec, noise_lowpass_hz)
        seq = extract_features(filtered, min_swing_frac)
        series = estimate_ibi(
            filtered, seq, thresholds, ibi_bounds, window=topo_window, seg_len=corr_seg_len
        )
        try:
            report = rms_error(series, ref)
            out.append(SweepPoint(float(f_c), report.rms_error, report.coverage))
        except EmptyComparisonError:
            out.append(SweepPoint(float(f_c), float("nan"), series.coverage))
    return out


def best_sweep_point(points: list, min_coverage: float = 0.0) -> SweepPoint:
    """Lowest-error sweep point among those with defined error and coverage.

    Near-empty series can produce tiny RMS values over a handful of lucky
    entries; ``min_coverage`` lets callers demand a comparable estimate
    density before a point competes for the minimum.
    """
    valid = [p for p in points if np.isfinite(p.rms_error) and p.coverage >= min_coverage]
    if not valid:
        raise EmptyComparisonError("no sweep point produced a defined error")
    return min(valid, key=lambda p: p.rms_error)


def load_reference_beats(path, fmt: str = "csv") -> ReferenceIbi:
    """Read beat times (one per line, seconds) from a CSV/sidecar file."""
    if fmt != "csv":
        raise ValueError(f"unknown reference format {fmt!r}")
    times = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            try:
                value = float(text)
            except ValueError as exc:
                raise DataIntegrityError(
                    f"{path}: line {lineno}: not a beat time: {text!r}"
                ) from exc
            if times and value <= times[-1]:
                raise DataIntegrityError(
                    f"{path}: line {lineno}: beat times must increase "
                    f"({value} after {times[-1]})"
                )
            times.append(value)
    if len(times) < 2:
        raise DataIntegrityError(f"{path}: fewer than two beat times")
    return ReferenceIbi(beat_times=np.asarray(times))
