"""Shared fixtures: expensive simulated scenes are built once per session."""

import numpy as np
import pytest

import radar_ibi as ri


@pytest.fixture(scope="session")
def human_scene():
    return ri.human_default_scene()


@pytest.fixture(scope="session")
def human_truth(human_scene):
    return ri.synth_displacement(
        human_scene.physio, human_scene.slow_time_fs, human_scene.duration
    )


@pytest.fixture(scope="session")
def human_cube(human_scene):
    return ri.synth_radar_cube(human_scene, ri.default_geometry(), seed=7)


@pytest.fixture(scope="session")
def human_result(human_cube):
    return ri.process_cube(human_cube, ri.human_config())


@pytest.fixture(scope="session")
def noisy_filtered_trace():
    """Fixed noisy cardiac trace for gating/threshold tests (no radar loop)."""
    physio = ri.PhysioModel(
        resp_amp=0.0, heart_ibi_series=60.0 / 70.0, heart_amp=0.2e-3, heart_pulse_width=0.12
    )
    truth = ri.synth_displacement(physio, fs=100.0, duration=60.0)
    rng = np.random.default_rng(42)
    noisy = truth.samples + 4e-6 * rng.standard_normal(truth.n)
    trace = ri.DisplacementTrace(samples=noisy, fs=100.0, detrended=True)
    from radar_ibi.pipeline import filter_for_topology

    spec = ri.FilterSpec(kind="high-pass", cutoffs=(2.0,), order=8)
    filtered = filter_for_topology(trace, spec, 12.0)
    return filtered, truth
