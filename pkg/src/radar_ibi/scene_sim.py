"""Physics-based scene simulator.

Generates ground-truth chest displacement (respiration + heartbeat pulse
train + slow posture drift) and the corresponding multi-channel slow-time
radar cube, so every downstream stage can be verified against known truth.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .displacement import DisplacementTrace
from .imaging import RadarCube

__all__ = [
    "PhysioModel",
    "ArrayGeometry",
    "SceneSpec",
    "GroundTruthTrace",
    "synth_displacement",
    "synth_radar_cube",
    "ibi_ramp",
    "default_geometry",
    "human_default_scene",
    "chimp_default_scene",
]

# sinc-shaped range point-spread, mimicking FFT range processing
LEAKAGE_HALFWIDTH_BINS = 2


@dataclass
class PhysioModel:
    """Parametric chest-motion model.

    Respiration is ``resp_amp * sin(2*pi*resp_freq*t)**resp_shape_exponent``;
    odd exponents > 1 enrich the respiratory harmonics so they genuinely
    compete with the heartbeat fundamental. The heartbeat is a train of
    raised-cosine pulses whose onsets are spaced by ``heart_ibi_series``
    (a constant interval or an explicit interval sequence, seconds).
    ``drift_rate`` adds a slow linear position drift (posture settling);
    without it a perfectly periodic chest signal acquires an unrealistically
    large complex DC component that real recordings do not show.
    """

    resp_freq: float = 0.25
    resp_amp: float = 4e-3
    resp_shape_exponent: int = 3
    heart_ibi_series: float | list | np.ndarray = 60.0 / 70.0
    heart_amp: float = 0.2e-3
    heart_pulse_width: float = 0.12
    drift_rate: float = 0.0

    def __post_init__(self):
        if self.resp_freq <= 0:
            raise ValueError("resp_freq must be positive")
        if self.resp_amp < 0 or self.heart_amp < 0:
            raise ValueError("amplitudes must be nonnegative")
        if self.resp_shape_exponent < 1:
            raise ValueError("resp_shape_exponent must be >= 1")
        if self.heart_pulse_width <= 0:
            raise ValueError("heart_pulse_width must be positive")
        ivs = np.atleast_1d(np.asarray(self.heart_ibi_series, dtype=float))
        if np.any(ivs <= 0):
            raise ValueError("all heartbeat intervals must be positive")

    def intervals(self) -> np.ndarray:
        return np.atleast_1d(np.asarray(self.heart_ibi_series, dtype=float))


@dataclass
class ArrayGeometry:
    """MIMO virtual linear array: n_tx * n_rx elements at lambda/2 spacing."""

    n_tx: int = 3
    n_rx: int = 4
    wavelength: float = 3.8e-3
    virtual_spacing: float | None = None

    def __post_init__(self):
        if self.n_tx < 1 or self.n_rx < 1:
            raise ValueError("element counts must be >= 1")
        if self.wavelength <= 0:
            raise ValueError("wavelength must be positive")
        if self.virtual_spacing is None:
            self.virtual_spacing = self.wavelength / 2
        if not np.isclose(self.virtual_spacing, self.wavelength / 2):
            raise ValueError("virtual element spacing must equal wavelength/2")

    @property
    def n_virtual(self) -> int:
        return self.n_tx * self.n_rx


@dataclass
class SceneSpec:
    """Complete description of a simulated measurement."""

    target_range: float = 0.7
    target_angle: float = 0.0
    physio: PhysioModel = field(default_factory=PhysioModel)
    clutter: list = field(default_factory=list)  # (range_m, angle_rad, complex amp)
    noise_snr_db: float | None = 30.0
    duration: float = 120.0
    slow_time_fs: float = 100.0
    range_bins: int = 24
    range_resolution: float = 0.043

    def __post_init__(self):
        if self.duration <= 0 or self.slow_time_fs <= 0:
            raise ValueError("duration and slow_time_fs must be positive")
        if self.n_samples < 2:
            raise ValueError("scene must span at least 2 slow-time samples")
        if self.range_bins < 1 or self.range_resolution <= 0:
            raise ValueError("range grid must be non-empty with positive resolution")
        win = self.range_bins * self.range_resolution
        if not (0 <= self.target_range < win):
            raise ValueError(
                f"target_range {self.target_range} m outside range window [0, {win}) m"
            )

    @property
    def n_samples(self) -> int:
        # non-integer duration*fs is rounded to the nearest sample count;
        # the realized record spans n_samples / slow_time_fs seconds
        return int(round(self.duration * self.slow_time_fs))

    def range_axis(self) -> np.ndarray:
        return np.arange(self.range_bins) * self.range_resolution


@dataclass
class GroundTruthTrace(DisplacementTrace):
    """Displacement trace that also records the exact heartbeat onsets."""

    pulse_onsets: np.ndarray = field(default_factory=lambda: np.empty(0))

    def true_ibi(self) -> np.ndarray:
        """Ground-truth interval list, exactly the onset differences."""
        return np.diff(self.pulse_onsets)


def _pulse_onsets(intervals: np.ndarray, duration: float) -> np.ndarray:
    """Onset times: cumulative interval sums strictly inside (0, duration).

    A constant interval c therefore yields floor(duration / c) onsets at
    c, 2c, ... (when duration is not an exact multiple of c). An explicit
    interval list is consumed once, then extended by repeating its last
    value until the record is covered.
    """
    onsets = []
    t = 0.0
    i = 0
    while True:
        t += intervals[min(i, len(intervals) - 1)]
        if t >= duration:
            break
        onsets.append(t)
        i += 1
    return np.asarray(onsets)


def synth_displacement(physio: PhysioModel, fs: float, duration: float) -> GroundTruthTrace:
    """Ground-truth displacement: respiration + heartbeat pulses + drift.

    Each heartbeat is a raised-cosine (Hann) bump of width
    ``physio.heart_pulse_width`` starting at its onset time.
    """
    if fs <= 0:
        raise ValueError("fs must be positive")
    if duration <= 0:
        raise ValueError("duration must be positive")
    n = int(round(duration * fs))
    if n < 1:
        raise ValueError("duration too short for the sampling rate")
    t = np.arange(n) / fs
    d = physio.resp_amp * np.sin(2 * np.pi * physio.resp_freq * t) ** physio.resp_shape_exponent
    d = d + physio.drift_rate * t
    onsets = _pulse_onsets(physio.intervals(), n / fs)
    w = physio.heart_pulse_width
    for onset in onsets:
        i0 = int(np.ceil(onset * fs))
        i1 = min(int(np.floor((onset + w) * fs)), n - 1)
        if i1 < i0:
            continue
        u = (np.arange(i0, i1 + 1) / fs - onset) / w
        d[i0 : i1 + 1] += physio.heart_amp * np.sin(np.pi * u) ** 2
    return GroundTruthTrace(samples=d, fs=fs, t0=0.0, detrended=False, pulse_onsets=onsets)


def ibi_ramp(start: float, stop: float, duration: float) -> np.ndarray:
    """Interval sequence ramping linearly from start to stop across duration."""
    if start <= 0 or stop <= 0:
        raise ValueError("intervals must be positive")
    ivs = []
    t = 0.0
    while t < duration:
        frac = min(t / duration, 1.0)
        iv = start + (stop - start) * frac
        ivs.append(iv)
        t += iv
    return np.asarray(ivs)


def _leakage_weights(scatter_range: float, scene: SceneSpec) -> tuple[np.ndarray, np.ndarray]:
    """Range bins reached by a scatterer and their sinc point-spread weights."""
    axis = scene.range_axis()
    center = int(np.argmin(np.abs(axis - scatter_range)))
    lo = max(0, center - LEAKAGE_HALFWIDTH_BINS)
    hi = min(scene.range_bins - 1, center + LEAKAGE_HALFWIDTH_BINS)
    bins = np.arange(lo, hi + 1)
    weights = np.sinc((scatter_range - axis[bins]) / scene.range_resolution)
    return bins, weights


def synth_radar_cube(scene: SceneSpec, geom: ArrayGeometry, seed: int = 0) -> RadarCube:
    """Forward model: displacement -> multi-channel slow-time radar cube.

    The target contributes, at each leaked range bin, a unit-reflectivity
    phasor exp(j * 4*pi*(target_range + d(t)) / lambda) steered across the
    virtual channels by exp(j * pi * n * sin(target_angle)), n = 0..N-1.
    Static clutter adds time-invariant terms; complex white Gaussian noise is
    scaled so the target-bin SNR matches ``scene.noise_snr_db``.
    """
    n = scene.n_samples
    fs = scene.slow_time_fs
    truth = synth_displacement(scene.physio, fs, n / fs)
    lam = geom.wavelength
    n_ch = geom.n_virtual
    ch = np.arange(n_ch)

    cube = np.zeros((n, scene.range_bins, n_ch), dtype=np.complex128)
    steer_t = np.exp(1j * np.pi * ch * np.sin(scene.target_angle))
    phasor = np.exp(1j * 4 * np.pi * (scene.target_range + truth.samples) / lam)
    bins, weights = _leakage_weights(scene.target_range, scene)
    for b, wgt in zip(bins, weights):
        cube[:, b, :] += wgt * phasor[:, None] * steer_t[None, :]

    for c_range, c_angle, c_amp in scene.clutter:
        if not (0 <= c_range < scene.range_bins * scene.range_resolution):
            raise ValueError(f"clutter at {c_range} m outside the range window")
        steer_c = np.exp(1j * np.pi * ch * np.sin(c_angle))
        static = complex(c_amp) * np.exp(1j * 4 * np.pi * c_range / lam)
        c_bins, c_weights = _leakage_weights(c_range, scene)
        for b, wgt in zip(c_bins, c_weights):
            cube[:, b, :] += wgt * static * steer_c[None, :]

    if scene.noise_snr_db is not None:
        target_bin = int(np.argmin(np.abs(scene.range_axis() - scene.target_range)))
        sig_power = float(
            np.sinc((scene.target_range - scene.range_axis()[target_bin]) / scene.range_resolution)
            ** 2
        )
        noise_power = sig_power / 10.0 ** (scene.noise_snr_db / 10.0)
        rng = np.random.default_rng(seed)
        scale = np.sqrt(noise_power / 2.0)
        cube += scale * (
            rng.standard_normal(cube.shape) + 1j * rng.standard_normal(cube.shape)
        )

    return RadarCube(
        samples=cube.astype(np.complex64),
        slow_time_fs=fs,
        range_axis=scene.range_axis(),
        wavelength=lam,
    )


def default_geometry() -> ArrayGeometry:
    """3 TX x 4 RX virtual array at 79 GHz (lambda = 3.8 mm)."""
    return ArrayGeometry(n_tx=3, n_rx=4, wavelength=3.8e-3)


def human_default_scene(noise_snr_db: float | None = 30.0, duration: float = 120.0) -> SceneSpec:
    """Supine human at 0.7 m: 0.25 Hz / 4 mm breathing, 70 bpm / 0.2 mm heartbeat."""
    return SceneSpec(
        target_range=0.7,
        target_angle=0.0,
        physio=PhysioModel(
            resp_freq=0.25,
            resp_amp=4e-3,
            resp_shape_exponent=3,
            heart_ibi_series=60.0 / 70.0,
            heart_amp=0.2e-3,
            heart_pulse_width=0.12,
            drift_rate=5e-5,
        ),
        clutter=[],
        noise_snr_db=noise_snr_db,
        duration=duration,
        slow_time_fs=100.0,
        range_bins=24,
        range_resolution=0.043,
    )


def chimp_default_scene(noise_snr_db: float | None = 30.0, duration: float = 60.0) -> SceneSpec:
    """Anesthetized chimpanzee variant: 145.56 Hz slow time, 100 bpm."""
    scene = human_default_scene(noise_snr_db=noise_snr_db, duration=duration)
    scene.physio.heart_ibi_series = 0.6
    scene.slow_time_fs = 145.56
    return scene
