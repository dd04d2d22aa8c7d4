import numpy as np
import pytest

import radar_ibi as ri
from radar_ibi.imaging import integrated_power_map, steering_matrix


def array_factor_db(weights, n_grid=40001):
    """Independent beampattern oracle: |sum_n w_n e^{j pi n u}| on a fine grid."""
    u = np.linspace(-1.0, 1.0, n_grid)
    af = np.abs(np.exp(1j * np.pi * np.outer(u, np.arange(len(weights)))) @ weights)
    return u, 20.0 * np.log10(af / af.max())


def make_cube(samples, fs=100.0, wavelength=3.8e-3):
    samples = np.asarray(samples)
    return ri.RadarCube(
        samples=samples,
        slow_time_fs=fs,
        range_axis=np.arange(samples.shape[1]) * 0.043,
        wavelength=wavelength,
    )


class TestTaylorWeights:
    def test_single_element(self):
        assert ri.taylor_weights(1) == pytest.approx([1.0])

    def test_symmetry_and_normalization(self):
        w = ri.taylor_weights(12, 25.0, 4)
        assert w[0] == pytest.approx(w[11])
        np.testing.assert_allclose(w, w[::-1])
        assert w.max() == pytest.approx(1.0)
        assert np.all(w > 0)

    def test_sidelobes_at_design_level(self):
        # 12-point sampling of the continuous taper realizes -24.94 dB
        w = ri.taylor_weights(12, 25.0, 4)
        u, af_db = array_factor_db(w)
        interior = np.arange(1, len(u) - 1)
        peaks = interior[(af_db[interior] > af_db[interior - 1]) & (af_db[interior] >= af_db[interior + 1])]
        sidelobes = af_db[peaks][af_db[peaks] < -1.0]
        assert sidelobes.max() <= -24.8

    def test_inconsistent_nbar_rejected(self):
        # 40 dB suppression needs nbar >= 2*A^2+0.5 = 6.2
        with pytest.raises(ValueError):
            ri.taylor_weights(12, 40.0, 4)

    def test_bad_counts(self):
        with pytest.raises(ValueError):
            ri.taylor_weights(0)


class TestBeamform:
    def test_single_channel_identity(self):
        rng = np.random.default_rng(0)
        s = rng.standard_normal((50, 3, 1)) + 1j * rng.standard_normal((50, 3, 1))
        cube = make_cube(s)
        w = ri.BeamformerWeights(np.ones(1), np.array([0.3]))
        img = ri.beamform(cube, w)
        # n = 0 steering phase is zero for any angle: output equals input
        np.testing.assert_allclose(img.values[:, :, 0], s[:, :, 0], rtol=1e-12)

    def test_two_element_closed_form(self):
        # channel phases (0, pi sin theta1) cohere exactly at theta1
        theta1 = np.deg2rad(17.0)
        alpha = np.array([0.8, 1.0])
        s = np.exp(1j * np.pi * np.arange(2) * np.sin(theta1))[None, None, :] * np.ones((4, 1, 1))
        cube = make_cube(s.astype(np.complex128))
        img = ri.beamform(cube, ri.BeamformerWeights(alpha, np.array([theta1])))
        expected = alpha.sum()
        np.testing.assert_allclose(np.abs(img.values[:, 0, 0]), expected, rtol=1e-9)

    def test_broadside_target_peaks_at_zero(self, human_cube):
        w = ri.make_beamformer_weights(12)
        img = ri.beamform(human_cube, w)
        img = ri.remove_static_clutter(img, img.duration)
        power = integrated_power_map(img, img.duration)
        _, a_idx = np.unravel_index(np.argmax(power), power.shape)
        assert img.angle_grid[a_idx] == pytest.approx(0.0, abs=1e-12)

    def test_linearity(self):
        rng = np.random.default_rng(3)
        shape = (20, 4, 12)
        s1 = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        s2 = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        a, b = 2.0 - 1.0j, -0.3 + 0.7j
        w = ri.make_beamformer_weights(12)
        lhs = ri.beamform(make_cube(a * s1 + b * s2), w).values
        rhs = a * ri.beamform(make_cube(s1), w).values + b * ri.beamform(make_cube(s2), w).values
        np.testing.assert_allclose(lhs, rhs, rtol=1e-9)

    def test_matched_steering_power(self):
        # beamformed power at the matched angle = (sum alpha)^2 * channel power
        theta = np.deg2rad(-23.0)
        alpha = ri.taylor_weights(12)
        rng = np.random.default_rng(5)
        x = rng.standard_normal(64) + 1j * rng.standard_normal(64)
        steer = np.exp(1j * np.pi * np.arange(12) * np.sin(theta))
        s = x[:, None, None] * steer[None, None, :]
        img = ri.beamform(make_cube(s), ri.BeamformerWeights(alpha, np.array([theta])))
        power = np.abs(img.values[:, 0, 0]) ** 2
        np.testing.assert_allclose(power, alpha.sum() ** 2 * np.abs(x) ** 2, rtol=1e-9)

    def test_dimension_mismatch(self):
        cube = make_cube(np.ones((5, 2, 3), complex))
        with pytest.raises(ValueError):
            ri.beamform(cube, ri.BeamformerWeights(np.ones(2), np.array([0.0])))


class TestClutterRemoval:
    def _image(self, values, fs=100.0):
        values = np.asarray(values)
        return ri.RadarImage(
            values=values,
            slow_time_fs=fs,
            range_axis=np.arange(values.shape[1]) * 0.043,
            angle_grid=np.linspace(-0.5, 0.5, values.shape[2]),
            wavelength=3.8e-3,
            clutter_removed=False,
        )

    def test_constant_image_zeroed(self):
        img = self._image(np.full((40, 3, 2), 1.5 - 0.5j))
        out = ri.remove_static_clutter(img, img.duration)
        np.testing.assert_array_equal(out.values, np.zeros_like(img.values))
        assert out.clutter_removed

    def test_static_plus_sinusoid(self):
        # integer number of periods: mean removal leaves exactly the sinusoid
        fs, n = 100.0, 400
        t = np.arange(n) / fs
        tone = np.exp(2j * np.pi * 2.0 * t)  # 8 full periods
        vals = (5.0 + tone)[:, None, None] * np.ones((1, 2, 2))
        img = self._image(vals, fs)
        out = ri.remove_static_clutter(img, img.duration)
        np.testing.assert_allclose(out.values, tone[:, None, None] * np.ones((1, 2, 2)), atol=1e-12)

    def test_idempotent_at_full_duration(self):
        rng = np.random.default_rng(8)
        img = self._image(rng.standard_normal((64, 2, 3)) + 1j * rng.standard_normal((64, 2, 3)))
        once = ri.remove_static_clutter(img, img.duration)
        twice = ri.remove_static_clutter(once, once.duration)
        np.testing.assert_allclose(twice.values, once.values, atol=1e-14)

    def test_horizon_validation(self):
        img = self._image(np.ones((10, 2, 2), complex))
        with pytest.raises(ValueError):
            ri.remove_static_clutter(img, img.duration * 2)
        with pytest.raises(ValueError):
            ri.remove_static_clutter(img, 0.0)

    def test_strong_clutter_suppressed(self):
        # clutter amplitude 10x target: after removal the moving target cell
        # holds the argmax of time variance
        scene = ri.human_default_scene(noise_snr_db=None, duration=30.0)
        scene.clutter = [(0.43, np.deg2rad(20.0), 10.0 + 0.0j)]
        cube = ri.synth_radar_cube(scene, ri.default_geometry(), seed=0)
        img = ri.beamform(cube, ri.make_beamformer_weights(12))
        out = ri.remove_static_clutter(img, img.duration)
        power = integrated_power_map(out, out.duration)
        r_idx, a_idx = np.unravel_index(np.argmax(power), power.shape)
        assert out.range_axis[r_idx] == pytest.approx(0.7, abs=scene.range_resolution / 2)
        assert out.angle_grid[a_idx] == pytest.approx(0.0, abs=1e-12)


class TestLocateTarget:
    def test_noiseless_target_exact_bin(self):
        scene = ri.human_default_scene(noise_snr_db=None, duration=20.0)
        cube = ri.synth_radar_cube(scene, ri.default_geometry(), seed=0)
        img = ri.remove_static_clutter(ri.beamform(cube, ri.make_beamformer_weights(12)), 20.0)
        loc = ri.locate_target(img, 20.0)
        expected_bin = int(np.argmin(np.abs(img.range_axis - 0.7)))
        assert loc.range_idx == expected_bin
        assert loc.angle == pytest.approx(0.0, abs=1e-12)

    def test_stronger_of_two_targets_wins(self):
        # two physio sources via superposition of single-target cubes
        geom = ri.default_geometry()
        strong = ri.human_default_scene(noise_snr_db=None, duration=20.0)
        weak = ri.human_default_scene(noise_snr_db=None, duration=20.0)
        weak.target_range = 0.43
        weak.target_angle = np.deg2rad(25.0)
        weak.physio.resp_amp /= 10.0
        weak.physio.heart_amp /= 10.0
        weak.physio.drift_rate = 0.0
        strong.physio.drift_rate = 0.0
        c1 = ri.synth_radar_cube(strong, geom, seed=0)
        c2 = ri.synth_radar_cube(weak, geom, seed=0)
        cube = ri.RadarCube(
            samples=c1.samples + c2.samples,
            slow_time_fs=c1.slow_time_fs,
            range_axis=c1.range_axis,
            wavelength=c1.wavelength,
        )
        img = ri.remove_static_clutter(ri.beamform(cube, ri.make_beamformer_weights(12)), 20.0)
        loc = ri.locate_target(img, 20.0)
        assert loc.range == pytest.approx(0.7, abs=strong.range_resolution / 2)
        assert loc.angle == pytest.approx(0.0, abs=1e-12)

    def test_window_restricts_search(self):
        scene = ri.human_default_scene(noise_snr_db=None, duration=20.0)
        cube = ri.synth_radar_cube(scene, ri.default_geometry(), seed=0)
        img = ri.remove_static_clutter(ri.beamform(cube, ri.make_beamformer_weights(12)), 20.0)
        # window excluding the true target range
        loc = ri.locate_target(img, 20.0, search_window=((0.0, 0.4), None))
        assert loc.range <= 0.4

    def test_empty_window_rejected(self):
        scene = ri.human_default_scene(noise_snr_db=None, duration=10.0)
        cube = ri.synth_radar_cube(scene, ri.default_geometry(), seed=0)
        img = ri.remove_static_clutter(ri.beamform(cube, ri.make_beamformer_weights(12)), 10.0)
        with pytest.raises(ValueError):
            ri.locate_target(img, 10.0, search_window=((5.0, 6.0), None))

    def test_scalar_invariance(self):
        scene = ri.human_default_scene(noise_snr_db=None, duration=10.0)
        cube = ri.synth_radar_cube(scene, ri.default_geometry(), seed=0)
        img = ri.remove_static_clutter(ri.beamform(cube, ri.make_beamformer_weights(12)), 10.0)
        loc1 = ri.locate_target(img, 10.0)
        scaled = ri.RadarImage(
            values=img.values * (0.03 - 4.0j),
            slow_time_fs=img.slow_time_fs,
            range_axis=img.range_axis,
            angle_grid=img.angle_grid,
            wavelength=img.wavelength,
            clutter_removed=True,
        )
        loc2 = ri.locate_target(scaled, 10.0)
        assert (loc1.range_idx, loc1.angle_idx) == (loc2.range_idx, loc2.angle_idx)

    def test_warns_without_clutter_removal(self):
        img = ri.RadarImage(
            values=np.ones((10, 2, 2), complex),
            slow_time_fs=10.0,
            range_axis=np.array([0.0, 0.043]),
            angle_grid=np.array([-0.1, 0.1]),
            wavelength=3.8e-3,
            clutter_removed=False,
        )
        with pytest.warns(UserWarning):
            ri.locate_target(img, 1.0)
