"""File formats: radar-cube container, CSV traces, JSON reports.

The cube container is a single JSON header line followed by a raw
little-endian float32 payload with (real, imag) interleaved, ordered
slow-time-major, then range, then channel. All writers are atomic (temp file
plus rename) so partially written outputs never parse.
"""

from __future__ import annotations

import json
import os
import tempfile

import numpy as np

from .errors import DataIntegrityError
from .displacement import DisplacementTrace
from .imaging import RadarCube
from .topology_ibi import IbiEntry, IbiSeries, PairScore

__all__ = [
    "SCHEMA_VERSION",
    "write_radar_cube",
    "read_radar_cube",
    "write_displacement_csv",
    "read_displacement_csv",
    "write_beat_times_csv",
    "write_ibi_csv",
    "read_ibi_csv",
    "write_sweep_csv",
    "write_json",
    "atomic_write_bytes",
    "atomic_write_text",
]

SCHEMA_VERSION = 1


def _atomic_replace(path, writer):
    """Write via a temp file in the target directory, then rename into place."""
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "wb") as fh:
            writer(fh)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_bytes(path, data: bytes):
    _atomic_replace(path, lambda fh: fh.write(data))


def atomic_write_text(path, text: str):
    atomic_write_bytes(path, text.encode("utf-8"))


def write_radar_cube(path, cube: RadarCube, n_tx: int | None = None, n_rx: int | None = None):
    """Serialize a cube. The (n_tx, n_rx) split defaults to (1, n_channels)."""
    n_ch = cube.n_channels
    if n_tx is None and n_rx is None:
        n_tx, n_rx = 1, n_ch
    if n_tx * n_rx != n_ch:
        raise ValueError(f"n_tx*n_rx = {n_tx * n_rx} does not match {n_ch} channels")
    header = {
        "schema_version": SCHEMA_VERSION,
        "n_t": cube.n_t,
        "n_tx": int(n_tx),
        "n_rx": int(n_rx),
        "n_virtual": n_ch,
        "wavelength_m": cube.wavelength,
        "slow_time_fs_hz": cube.slow_time_fs,
        "range_axis_m": [float(r) for r in cube.range_axis],
        "duration_s": cube.n_t / cube.slow_time_fs,
    }
    payload = np.ascontiguousarray(cube.samples, dtype="<c8")

    def writer(fh):
        fh.write(json.dumps(header, sort_keys=True).encode("utf-8"))
        fh.write(b"\n")
        fh.write(payload.tobytes())

    _atomic_replace(path, writer)


def read_radar_cube(path) -> RadarCube:
    """Read a cube container; structural problems raise DataIntegrityError."""
    with open(path, "rb") as fh:
        header_line = fh.readline()
        blob = fh.read()
    try:
        header = json.loads(header_line.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise DataIntegrityError(f"{path}: unreadable cube header") from exc
    version = header.get("schema_version")
    if version != SCHEMA_VERSION:
        raise DataIntegrityError(f"{path}: unsupported schema_version {version!r}")
    try:
        n_t = int(header["n_t"])
        n_tx = int(header["n_tx"])
        n_rx = int(header["n_rx"])
        n_virtual = int(header["n_virtual"])
        wavelength = float(header["wavelength_m"])
        fs = float(header["slow_time_fs_hz"])
        range_axis = np.asarray(header["range_axis_m"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise DataIntegrityError(f"{path}: malformed cube header: {exc}") from exc
    if n_virtual != n_tx * n_rx:
        raise DataIntegrityError(
            f"{path}: header n_virtual={n_virtual} != n_tx*n_rx={n_tx * n_rx}"
        )
    n_r = len(range_axis)
    expected = 2 * 4 * n_t * n_r * n_virtual
    if len(blob) != expected:
        raise DataIntegrityError(
            f"{path}: payload is {len(blob)} bytes, expected {expected} "
            f"(n_t={n_t}, n_range={n_r}, n_virtual={n_virtual})"
        )
    samples = np.frombuffer(blob, dtype="<c8").reshape(n_t, n_r, n_virtual)
    duration = header.get("duration_s")
    if duration is not None and abs(duration - n_t / fs) > 1.5 / fs:
        raise DataIntegrityError(
            f"{path}: header duration {duration} s inconsistent with {n_t} samples at {fs} Hz"
        )
    return RadarCube(
        samples=samples.copy(), slow_time_fs=fs, range_axis=range_axis, wavelength=wavelength
    )


def write_displacement_csv(path, trace: DisplacementTrace):
    lines = ["time_s,displacement_m"]
    for t, d in zip(trace.times(), trace.samples):
        lines.append(f"{t:.9g},{d:.9g}")
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_displacement_csv(path, detrended: bool = True) -> DisplacementTrace:
    times, values = [], []
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != "time_s,displacement_m":
            raise DataIntegrityError(f"{path}: unexpected displacement header {header!r}")
        for lineno, line in enumerate(fh, start=2):
            text = line.strip()
            if not text:
                continue
            parts = text.split(",")
            if len(parts) != 2:
                raise DataIntegrityError(f"{path}: line {lineno}: expected 2 columns")
            times.append(float(parts[0]))
            values.append(float(parts[1]))
    if len(times) < 2:
        raise DataIntegrityError(f"{path}: displacement trace too short")
    dt = np.diff(times)
    if not np.allclose(dt, dt[0], rtol=1e-6, atol=1e-9):
        raise DataIntegrityError(f"{path}: non-uniform sampling")
    return DisplacementTrace(
        samples=np.asarray(values), fs=1.0 / dt[0], t0=times[0], detrended=detrended
    )


def write_beat_times_csv(path, beat_times):
    lines = [f"{t:.6f}" for t in beat_times]
    atomic_write_text(path, "\n".join(lines) + "\n")


def write_ibi_csv(path, series: IbiSeries):
    lines = ["time_s,ibi_s,topo_similarity,local_corr"]
    for e in series.entries:
        lines.append(
            f"{e.time:.6f},{e.interval:.6f},{e.score.topo_similarity:.6f},{e.score.local_corr:.6f}"
        )
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_ibi_csv(path) -> IbiSeries:
    entries = []
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != "time_s,ibi_s,topo_similarity,local_corr":
            raise DataIntegrityError(f"{path}: unexpected IBI header {header!r}")
        for lineno, line in enumerate(fh, start=2):
            text = line.strip()
            if not text:
                continue
            parts = text.split(",")
            if len(parts) != 4:
                raise DataIntegrityError(f"{path}: line {lineno}: expected 4 columns")
            try:
                t, iv, sim, corr = (float(p) for p in parts)
            except ValueError as exc:
                raise DataIntegrityError(f"{path}: line {lineno}: {exc}") from exc
            if iv <= 0:
                raise DataIntegrityError(f"{path}: line {lineno}: interval must be positive")
            entries.append(
                IbiEntry(time=t, interval=iv, score=PairScore.unindexed(sim, corr))
            )
    # record length unknown here; evaluation recomputes coverage vs the reference
    return IbiSeries(entries=entries, coverage=float("nan"))


def write_sweep_csv(path, points):
    lines = ["f_c_hz,rms_error_s,coverage"]
    for p in points:
        err = f"{p.rms_error:.6f}" if np.isfinite(p.rms_error) else "nan"
        lines.append(f"{p.f_c:.6g},{err},{p.coverage:.6f}")
    atomic_write_text(path, "\n".join(lines) + "\n")


def write_json(path, data: dict):
    atomic_write_text(path, json.dumps(data, indent=2, sort_keys=True) + "\n")
