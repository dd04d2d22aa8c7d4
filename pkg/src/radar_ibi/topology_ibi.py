"""Waveform-topology inter-beat-interval estimation.

Six feature-point classes (peak, trough, four inflection kinds) are extracted
from the filtered displacement waveform. Candidate feature pairs are scored by
the repeatability of their surrounding kind sequence (topological similarity)
and by the correlation of the local waveform segments; pairs passing both
gates emit one interval estimate each.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .displacement import DisplacementTrace
from .errors import DegenerateInputError, FeatureWindowError

__all__ = [
    "FeatureKind",
    "FeaturePoint",
    "FeatureSequence",
    "PairScore",
    "GateThresholds",
    "IbiEntry",
    "IbiSeries",
    "extract_features",
    "topo_similarity",
    "local_corr",
    "estimate_ibi",
    "ibi_bounds_for_band",
]


class FeatureKind(enum.IntEnum):
    PEAK = 0
    TROUGH = 1
    INFL_RISE_ACCEL = 2  # rising segment, curvature turns upward
    INFL_RISE_DECEL = 3  # rising segment, curvature turns downward
    INFL_FALL_ACCEL = 4  # falling segment, descent steepens
    INFL_FALL_DECEL = 5  # falling segment, descent flattens


@dataclass
class FeaturePoint:
    time: float
    kind: FeatureKind
    amplitude: float


@dataclass
class FeatureSequence:
    """Time-ordered feature points extracted from one trace."""

    points: list
    source_fs: float

    def __post_init__(self):
        times = [p.time for p in self.points]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("feature times must be strictly increasing")

    def __len__(self) -> int:
        return len(self.points)

    def times(self) -> np.ndarray:
        return np.array([p.time for p in self.points])

    def kinds(self) -> np.ndarray:
        return np.array([int(p.kind) for p in self.points], dtype=np.int8)


@dataclass
class PairScore:
    m: int
    n: int
    topo_similarity: float
    local_corr: float

    def __post_init__(self):
        if not self.is_unindexed() and self.n <= self.m:
            raise ValueError("pair requires n > m")
        if not (np.isfinite(self.topo_similarity) and np.isfinite(self.local_corr)):
            raise ValueError("scores must be finite")

    def is_unindexed(self) -> bool:
        return self.m < 0 and self.n < 0

    @classmethod
    def unindexed(cls, topo_similarity: float, local_corr: float) -> "PairScore":
        """Score whose generating feature indices are unknown (file import)."""
        return cls(m=-1, n=-1, topo_similarity=topo_similarity, local_corr=local_corr)


@dataclass
class GateThresholds:
    """Acceptance thresholds: raising either trades coverage for accuracy."""

    c0: float = 0.95
    m0: float = 0.8

    def __post_init__(self):
        if not (-1.0 <= self.c0 <= 1.0):
            raise ValueError("c0 must lie in [-1, 1]")
        if not (0.0 <= self.m0 <= 1.0):
            raise ValueError("m0 must lie in [0, 1]")


@dataclass
class IbiEntry:
    time: float
    interval: float
    score: PairScore


@dataclass
class IbiSeries:
    """Sparse gated interval estimates; entry time is the pair midpoint."""

    entries: list
    coverage: float = field(default=np.nan)

    def times(self) -> np.ndarray:
        return np.array([e.time for e in self.entries])

    def intervals(self) -> np.ndarray:
        return np.array([e.interval for e in self.entries])

    def __len__(self) -> int:
        return len(self.entries)


def alternating_extrema(x: np.ndarray, delta: float) -> list:
    """Alternating local maxima/minima with vertical swing >= delta.

    Classic hysteresis walk: an extremum is confirmed once the signal has
    retreated from it by delta, which suppresses sub-delta noise wiggles.
    Returns [(index, is_max), ...] in time order.
    """
    out = []
    direction = 0
    min_i = max_i = 0
    min_v = max_v = x[0]
    for i in range(1, len(x)):
        v = x[i]
        if direction > 0:
            if v > max_v:
                max_i, max_v = i, v
            elif max_v - v >= delta:
                out.append((max_i, True))
                direction = -1
                min_i, min_v = i, v
        elif direction < 0:
            if v < min_v:
                min_i, min_v = i, v
            elif v - min_v >= delta:
                out.append((min_i, False))
                direction = 1
                max_i, max_v = i, v
        else:
            if v > max_v:
                max_i, max_v = i, v
            if v < min_v:
                min_i, min_v = i, v
            if max_v - v >= delta:
                out.append((max_i, True))
                direction = -1
                min_i, min_v = i, v
            elif v - min_v >= delta:
                out.append((min_i, False))
                direction = 1
                max_i, max_v = i, v
    return out


def _parabolic_refine(x: np.ndarray, i: int) -> tuple[float, float]:
    """Sub-sample vertex (index, value) of the parabola through i-1, i, i+1."""
    if i <= 0 or i >= len(x) - 1:
        return float(i), float(x[i])
    a, b, c = x[i - 1], x[i], x[i + 1]
    den = a - 2.0 * b + c
    if den == 0.0:
        return float(i), float(b)
    shift = 0.5 * (a - c) / den
    shift = float(np.clip(shift, -0.5, 0.5))
    return i + shift, float(b - 0.25 * (a - c) * shift)


def _robust_span(x: np.ndarray) -> float:
    lo, hi = np.percentile(x, [2.0, 98.0])
    return float(hi - lo)


def extract_features(
    trace: DisplacementTrace,
    min_swing_frac: float = 0.1,
) -> FeatureSequence:
    """Extract the six feature classes with sub-sample timestamps.

    Peaks and troughs come from an alternating-extrema walk whose swing
    threshold is ``min_swing_frac`` of the trace's robust (2nd-98th
    percentile) span; this keeps sign-change features while rejecting
    noise-scale wiggles that would otherwise flood the sequence. Inside each
    monotone segment between consecutive extrema, inflections are the
    significant extrema of the centered first difference: the slope maximum
    of a rising segment marks where the rise stops accelerating, an interior
    slope minimum marks a shoulder where it re-accelerates (and mirrored for
    falling segments). Timestamps are refined by parabolic interpolation;
    a constant trace yields an empty sequence.
    """
    x = trace.samples
    fs = trace.fs
    if trace.n < 3:
        raise ValueError("need at least 3 samples to extract features")
    span = _robust_span(x)
    if span == 0.0:
        return FeatureSequence(points=[], source_fs=fs)
    delta = min_swing_frac * span

    extrema = alternating_extrema(x, delta)
    if not extrema:
        return FeatureSequence(points=[], source_fs=fs)

    # centered first difference, used both for inflection detection and kinds
    d1 = np.empty_like(x)
    d1[1:-1] = 0.5 * (x[2:] - x[:-2])
    d1[0] = x[1] - x[0]
    d1[-1] = x[-1] - x[-2]
    delta1 = min_swing_frac * _robust_span(d1)

    feats: list[FeaturePoint] = []
    for i, is_max in extrema:
        fi, amp = _parabolic_refine(x, i)
        kind = FeatureKind.PEAK if is_max else FeatureKind.TROUGH
        feats.append(FeaturePoint(time=trace.t0 + fi / fs, kind=kind, amplitude=amp))

    # monotone segments between extrema, plus the partial edge segments
    bounds = [0] + [i for i, _ in extrema] + [len(x) - 1]
    seg_is_max = [None] + [m for _, m in extrema] + [None]
    for s in range(len(bounds) - 1):
        i0, i1 = bounds[s], bounds[s + 1]
        if i1 - i0 < 3:
            continue
        left, right = seg_is_max[s], seg_is_max[s + 1]
        if right is True or left is False:
            rising = True
        elif right is False or left is True:
            rising = False
        else:
            continue
        edge_segment = left is None or right is None
        seg = d1[i0 : i1 + 1]
        cand = [(j, mx) for j, mx in alternating_extrema(seg, delta1) if 0 < j < len(seg) - 1]
        if not cand and not edge_segment:
            # every full monotone segment contains at least the primary
            # slope extremum; recover it when the walk threshold missed it
            j = int(np.argmax(seg)) if rising else int(np.argmin(seg))
            if 0 < j < len(seg) - 1:
                cand = [(j, rising)]
        for j, is_max in cand:
            fj, _ = _parabolic_refine(seg, j)
            pos = i0 + fj
            if rising:
                kind = FeatureKind.INFL_RISE_DECEL if is_max else FeatureKind.INFL_RISE_ACCEL
            else:
                kind = FeatureKind.INFL_FALL_ACCEL if is_max else FeatureKind.INFL_FALL_DECEL
            amp = float(np.interp(pos, np.arange(len(x)), x))
            feats.append(FeaturePoint(time=trace.t0 + pos / fs, kind=kind, amplitude=amp))

    feats.sort(key=lambda p: p.time)
    deduped: list[FeaturePoint] = []
    for p in feats:
        if deduped and p.time <= deduped[-1].time:
            continue
        deduped.append(p)
    return FeatureSequence(points=deduped, source_fs=fs)


def _window_bounds(window: int) -> tuple[int, int]:
    return (window - 1) // 2, window // 2


def topo_similarity(seq: FeatureSequence, m: int, n: int, window: int = 9) -> float:
    """Fraction of matching kinds between the windows centered at m and n.

    Both windows span ``window`` consecutive feature points; a window that
    runs past either end of the sequence raises FeatureWindowError.
    """
    if window < 1:
        raise ValueError("window must be >= 1")
    half_l, half_r = _window_bounds(window)
    kinds = seq.kinds()
    for idx in (m, n):
        if idx - half_l < 0 or idx + half_r >= len(kinds):
            raise FeatureWindowError(
                f"window of {window} feature points does not fit around index {idx}"
            )
    a = kinds[m - half_l : m + half_r + 1]
    b = kinds[n - half_l : n + half_r + 1]
    return float(np.mean(a == b))


def _segment(trace: DisplacementTrace, center: float, seg_len: float) -> np.ndarray:
    """Waveform segment [center - seg_len/2, center + seg_len/2], resampled
    on a common grid by linear interpolation at the exact (sub-sample)
    offsets."""
    half = seg_len / 2.0
    if center - half < trace.t0 or center + half > trace.t0 + (trace.n - 1) / trace.fs:
        raise FeatureWindowError(
            f"segment of {seg_len} s around t={center:.3f} s leaves the record"
        )
    n_pts = int(round(seg_len * trace.fs)) + 1
    offs = np.linspace(-half, half, n_pts)
    pos = (center + offs - trace.t0) * trace.fs
    base = np.floor(pos).astype(int)
    base = np.clip(base, 0, trace.n - 2)
    frac = pos - base
    return trace.samples[base] * (1.0 - frac) + trace.samples[base + 1] * frac


def local_corr(trace: DisplacementTrace, t_m: float, t_n: float, seg_len: float = 0.6) -> float:
    """Pearson correlation of the waveform segments centered at t_m and t_n."""
    a = _segment(trace, t_m, seg_len)
    b = _segment(trace, t_n, seg_len)
    sa, sb = a.std(), b.std()
    if sa == 0.0 or sb == 0.0:
        raise DegenerateInputError("zero-variance segment; correlation undefined")
    return float(np.corrcoef(a, b)[0, 1])


def ibi_bounds_for_band(f_lo: float, f_hi: float, widen: float = 0.2) -> tuple[float, float]:
    """Plausible interval range: reciprocal heart-rate band widened +-widen."""
    return ((1.0 - widen) / f_hi, (1.0 + widen) / f_lo)


def estimate_ibi(
    trace: DisplacementTrace,
    seq: FeatureSequence,
    thresholds: GateThresholds,
    ibi_bounds: tuple,
    window: int = 9,
    seg_len: float = 0.6,
) -> IbiSeries:
    """Gated interval estimates from same-kind feature-point pairs.

    For each feature m, the partner n is the later same-kind feature whose
    separation lies inside ``ibi_bounds`` and maximizes the topological
    similarity (ties broken by the larger local correlation). The pair emits
    an entry at the midpoint time iff both scores pass their thresholds, so
    at most one entry per m. Coverage is the fraction of the record covered
    by the union of the emitted [t_m, t_n] spans.
    """
    lo, hi = ibi_bounds
    if not (0 < lo < hi):
        raise ValueError("ibi_bounds must satisfy 0 < lo < hi")
    n_feat = len(seq)
    entries: list[IbiEntry] = []
    if n_feat == 0:
        return IbiSeries(entries=entries, coverage=0.0)
    times = seq.times()
    kinds = seq.kinds()
    half_l, half_r = _window_bounds(window)

    for m in range(n_feat):
        if m - half_l < 0 or m + half_r >= n_feat:
            continue
        t_m = times[m]
        win_m = kinds[m - half_l : m + half_r + 1]
        best_sim = -1.0
        tied: list[int] = []
        for n in range(m + 1, n_feat):
            dt = times[n] - t_m
            if dt < lo:
                continue
            if dt > hi:
                break
            if kinds[n] != kinds[m]:
                continue
            if n + half_r >= n_feat:
                continue
            # same comparison topo_similarity performs, on the cached arrays
            sim = float(np.mean(win_m == kinds[n - half_l : n + half_r + 1]))
            if sim > best_sim + 1e-12:
                best_sim = sim
                tied = [n]
            elif abs(sim - best_sim) <= 1e-12:
                tied.append(n)
        if not tied:
            continue
        best_n = None
        best_c = -np.inf
        for n in tied:
            try:
                c = local_corr(trace, t_m, times[n], seg_len)
            except (DegenerateInputError, FeatureWindowError):
                continue
            if c > best_c:
                best_c, best_n = c, n
        if best_n is None:
            continue
        if best_c >= thresholds.c0 and best_sim >= thresholds.m0:
            t_n = times[best_n]
            entries.append(
                IbiEntry(
                    time=0.5 * (t_m + t_n),
                    interval=t_n - t_m,
                    score=PairScore(
                        m=m, n=best_n, topo_similarity=best_sim, local_corr=best_c
                    ),
                )
            )

    entries.sort(key=lambda e: e.time)
    coverage = _union_coverage(entries, trace)
    return IbiSeries(entries=entries, coverage=coverage)


def _union_coverage(entries: list, trace: DisplacementTrace) -> float:
    """Length of the union of [mid - tau/2, mid + tau/2] spans / record length."""
    if not entries:
        return 0.0
    spans = sorted((e.time - e.interval / 2.0, e.time + e.interval / 2.0) for e in entries)
    t_lo, t_hi = trace.t0, trace.t0 + trace.duration
    total = 0.0
    cur_s, cur_e = None, None
    for s, e in spans:
        s, e = max(s, t_lo), min(e, t_hi)
        if e <= s:
            continue
        if cur_s is None:
            cur_s, cur_e = s, e
        elif s <= cur_e:
            cur_e = max(cur_e, e)
        else:
            total += cur_e - cur_s
            cur_s, cur_e = s, e
    if cur_s is not None:
        total += cur_e - cur_s
    return total / trace.duration
