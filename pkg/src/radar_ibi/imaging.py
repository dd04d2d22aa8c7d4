"""Range-angle imaging of multi-channel slow-time radar signals.

The chain implemented here: Taylor-tapered delay-and-sum beamforming of the
virtual-array signal into a complex radar image, static-clutter suppression by
slow-time mean removal, and energy-based localization of the breathing target.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import windows

__all__ = [
    "RadarCube",
    "BeamformerWeights",
    "RadarImage",
    "TargetLocation",
    "taylor_weights",
    "make_beamformer_weights",
    "beamform",
    "remove_static_clutter",
    "locate_target",
]


@dataclass
class RadarCube:
    """Complex slow-time x range x virtual-channel signal array.

    samples: complex array of shape (n_t, n_range, n_channels).
    slow_time_fs: frame rate of the slow-time axis in Hz.
    range_axis: strictly increasing range-bin centers in meters.
    wavelength: carrier wavelength in meters.
    """

    samples: np.ndarray
    slow_time_fs: float
    range_axis: np.ndarray
    wavelength: float

    def __post_init__(self):
        self.samples = np.asarray(self.samples)
        self.range_axis = np.asarray(self.range_axis, dtype=float)
        if self.samples.ndim != 3:
            raise ValueError("samples must be a 3-D (time, range, channel) array")
        if self.samples.shape[2] < 1:
            raise ValueError("cube needs at least one channel")
        if self.range_axis.ndim != 1 or len(self.range_axis) != self.samples.shape[1]:
            raise ValueError("range_axis length must match the range extent")
        if len(self.range_axis) > 1 and not np.all(np.diff(self.range_axis) > 0):
            raise ValueError("range_axis must be strictly increasing")
        if self.slow_time_fs <= 0:
            raise ValueError("slow_time_fs must be positive")
        if self.wavelength <= 0:
            raise ValueError("wavelength must be positive")

    @property
    def n_t(self) -> int:
        return self.samples.shape[0]

    @property
    def n_channels(self) -> int:
        return self.samples.shape[2]

    @property
    def duration(self) -> float:
        return self.n_t / self.slow_time_fs


@dataclass
class BeamformerWeights:
    """Amplitude taper plus the angle grid it will be steered over."""

    taylor_weights: np.ndarray
    angle_grid: np.ndarray

    def __post_init__(self):
        self.taylor_weights = np.asarray(self.taylor_weights, dtype=float)
        self.angle_grid = np.asarray(self.angle_grid, dtype=float)
        if np.any(self.taylor_weights <= 0):
            raise ValueError("taper weights must be positive")
        if not np.allclose(self.taylor_weights, self.taylor_weights[::-1]):
            raise ValueError("taper must be symmetric about the array center")
        if np.any(np.abs(self.angle_grid) >= np.pi / 2):
            raise ValueError("angle grid must lie inside (-pi/2, pi/2)")


@dataclass
class RadarImage:
    """Complex radar image indexed (slow time, range, angle)."""

    values: np.ndarray
    slow_time_fs: float
    range_axis: np.ndarray
    angle_grid: np.ndarray
    wavelength: float
    clutter_removed: bool = False

    def __post_init__(self):
        if self.values.ndim != 3:
            raise ValueError("image values must be 3-D (time, range, angle)")
        if self.values.shape[1] != len(self.range_axis):
            raise ValueError("range extent inconsistent with range_axis")
        if self.values.shape[2] != len(self.angle_grid):
            raise ValueError("angle extent inconsistent with angle_grid")

    @property
    def n_t(self) -> int:
        return self.values.shape[0]

    @property
    def duration(self) -> float:
        return self.n_t / self.slow_time_fs


@dataclass
class TargetLocation:
    """Grid cell holding the subject, chosen by time-integrated power."""

    range: float
    angle: float
    power: float
    range_idx: int = field(default=-1)
    angle_idx: int = field(default=-1)


def taylor_weights(n_elements: int, sidelobe_db: float = 25.0, nbar: int = 4) -> np.ndarray:
    """Taylor amplitude taper, normalized so the largest weight is 1.

    Parameters
    ----------
    n_elements : int
        Number of (virtual) array elements.
    sidelobe_db : float
        Design sidelobe suppression in dB (positive number).
    nbar : int
        Number of near-in sidelobes held at the design level. Must satisfy
        the standard consistency bound nbar >= 2*A^2 + 0.5 with
        A = arccosh(10**(sidelobe_db/20)) / pi.
    """
    if n_elements < 1:
        raise ValueError("n_elements must be >= 1")
    if sidelobe_db <= 0:
        raise ValueError("sidelobe_db must be positive")
    a = np.arccosh(10.0 ** (sidelobe_db / 20.0)) / np.pi
    if nbar < 2 * a**2 + 0.5:
        raise ValueError(
            f"nbar={nbar} inconsistent with {sidelobe_db} dB sidelobes "
            f"(requires nbar >= {2 * a**2 + 0.5:.2f})"
        )
    if n_elements == 1:
        return np.ones(1)
    return windows.taylor(n_elements, nbar=nbar, sll=sidelobe_db, norm=True)


def make_beamformer_weights(
    n_elements: int,
    sidelobe_db: float = 25.0,
    nbar: int = 4,
    angle_span_deg: float = 60.0,
    angle_step_deg: float = 1.0,
) -> BeamformerWeights:
    """Default taper plus a uniform angle grid of +-angle_span_deg."""
    n_steps = int(round(angle_span_deg / angle_step_deg))
    grid = np.deg2rad(np.arange(-n_steps, n_steps + 1) * angle_step_deg)
    return BeamformerWeights(taylor_weights(n_elements, sidelobe_db, nbar), grid)


def steering_matrix(weights: BeamformerWeights) -> np.ndarray:
    """Complex weight matrix, shape (n_angles, n_channels).

    Row k holds w_n(theta_k) = alpha_n * exp(j*pi*n*sin(theta_k)) with the
    channel index n counted from 0 and lambda/2 virtual spacing assumed.
    """
    n = np.arange(len(weights.taylor_weights))
    phase = np.pi * np.outer(np.sin(weights.angle_grid), n)
    return weights.taylor_weights[None, :] * np.exp(1j * phase)


def beamform(cube: RadarCube, weights: BeamformerWeights) -> RadarImage:
    """Delay-and-sum the cube over channels for every angle on the grid.

    The output cell is sum_n conj(w_n(theta)) * s_n(t, r): conjugation sits on
    the weight vector. Output dtype follows the cube (complex64 cubes give a
    complex64 image, keeping the full default scene within memory budget).
    """
    n_ch = cube.n_channels
    if len(weights.taylor_weights) != n_ch:
        raise ValueError(
            f"weight length {len(weights.taylor_weights)} != channel count {n_ch}"
        )
    w = steering_matrix(weights)
    out_dtype = np.result_type(cube.samples.dtype, np.complex64)
    wc = np.conj(w).T.astype(out_dtype)
    n_t, n_r, _ = cube.samples.shape
    flat = cube.samples.reshape(-1, n_ch)
    values = (flat @ wc).reshape(n_t, n_r, len(weights.angle_grid))
    return RadarImage(
        values=values,
        slow_time_fs=cube.slow_time_fs,
        range_axis=cube.range_axis,
        angle_grid=weights.angle_grid,
        wavelength=cube.wavelength,
        clutter_removed=False,
    )


def _horizon_samples(horizon: float, fs: float, n_t: int) -> int:
    """Sample count for a time horizon, validated against the record."""
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    n = int(round(horizon * fs))
    if n < 1:
        raise ValueError("horizon shorter than one slow-time sample")
    if n > n_t:
        raise ValueError(
            f"horizon {horizon} s exceeds record length {n_t / fs} s"
        )
    return n


def remove_static_clutter(image: RadarImage, horizon: float) -> RadarImage:
    """Subtract the per-cell slow-time mean computed over [0, horizon].

    The integral mean of the continuous formulation is realized as the
    discrete average of the samples inside the horizon.
    """
    n = _horizon_samples(horizon, image.slow_time_fs, image.n_t)
    mean = image.values[:n].mean(axis=0, keepdims=True)
    return RadarImage(
        values=image.values - mean.astype(image.values.dtype),
        slow_time_fs=image.slow_time_fs,
        range_axis=image.range_axis,
        angle_grid=image.angle_grid,
        wavelength=image.wavelength,
        clutter_removed=True,
    )


def integrated_power_map(image: RadarImage, horizon: float) -> np.ndarray:
    """Time-integrated |I|^2 per (range, angle) cell over [0, horizon]."""
    n = _horizon_samples(horizon, image.slow_time_fs, image.n_t)
    power = np.zeros(image.values.shape[1:], dtype=np.float64)
    # chunked so a float32 image never materializes a same-size temporary
    step = max(1, 2_000_000 // max(1, image.values[0].size))
    for i in range(0, n, step):
        chunk = image.values[i : min(i + step, n)]
        power += np.einsum("trk,trk->rk", chunk, chunk.conj()).real
    return power


def locate_target(
    image: RadarImage,
    horizon: float,
    search_window=None,
) -> TargetLocation:
    """Pick the (range, angle) cell maximizing time-integrated power.

    search_window, when given, is ((r_min, r_max), (angle_min, angle_max))
    in meters/radians; either pair may be None to leave that axis open.
    Exact power ties break toward smaller range, then smaller |angle|.
    """
    if not image.clutter_removed:
        warnings.warn(
            "locating a target on an image with static clutter still present",
            stacklevel=2,
        )
    power = integrated_power_map(image, horizon)
    mask = np.ones_like(power, dtype=bool)
    if search_window is not None:
        r_b, a_b = search_window
        if r_b is not None:
            mask &= (image.range_axis >= r_b[0])[:, None] & (
                image.range_axis <= r_b[1]
            )[:, None]
        if a_b is not None:
            mask &= (image.angle_grid >= a_b[0])[None, :] & (
                image.angle_grid <= a_b[1]
            )[None, :]
    if not mask.any():
        raise ValueError("search window selects no grid cells")
    masked = np.where(mask, power, -np.inf)
    best = masked.max()
    ties = np.argwhere(masked == best)
    # smaller range first, then smaller |angle|, then deterministic index
    order = sorted(
        (int(r), int(k)) for r, k in ties
    )
    order.sort(key=lambda rk: (rk[0], abs(image.angle_grid[rk[1]]), rk[1]))
    r_idx, a_idx = order[0]
    return TargetLocation(
        range=float(image.range_axis[r_idx]),
        angle=float(image.angle_grid[a_idx]),
        power=float(best),
        range_idx=r_idx,
        angle_idx=a_idx,
    )
