import numpy as np
import pytest

from leafbench.corruptions import (
    BLUR_KINDS,
    DETERMINISTIC_KINDS,
    CorruptionSpec,
    apply_blur,
    apply_corruption,
    apply_digital,
    apply_noise,
    apply_photometric,
    apply_weather,
    zoom_ladder,
)
from leafbench.image import make_rng, quantize
from leafbench.severity import CORRUPTION_KINDS, SEVERITIES

from conftest import random_image


def psnr(a, b):
    mse = np.mean((a.astype(np.float64) - b.astype(np.float64)) ** 2)
    return 10.0 * np.log10(1.0 / mse) if mse > 0 else np.inf


class TestDispatch:
    @pytest.mark.parametrize("kind", CORRUPTION_KINDS)
    def test_every_kind_and_severity_runs(self, kind, table, probes):
        img = probes[0]
        for sev in SEVERITIES:
            spec = CorruptionSpec.from_table(table, kind, sev)
            out = apply_corruption(img, spec, make_rng(7))
            assert out.shape == img.shape
            assert out.dtype == np.float32
            assert np.isfinite(out).all()
            assert out.min() >= 0.0 and out.max() <= 1.0

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError):
            CorruptionSpec(kind="vignette", severity=1)

    def test_bad_severity_rejected(self):
        with pytest.raises(ValueError):
            CorruptionSpec(kind="fog", severity=0)
        with pytest.raises(ValueError):
            CorruptionSpec(kind="fog", severity=6)

    def test_stochastic_kind_needs_rng(self, table):
        spec = CorruptionSpec.from_table(table, "gaussian_noise", 1)
        with pytest.raises(ValueError, match="RNG"):
            apply_corruption(random_image(0), spec)

    @pytest.mark.parametrize("kind", CORRUPTION_KINDS)
    def test_deterministic_under_fixed_seed(self, kind, table, probes):
        spec = CorruptionSpec.from_table(table, kind, 3)
        a = apply_corruption(probes[1], spec, make_rng(99))
        b = apply_corruption(probes[1], spec, make_rng(99))
        np.testing.assert_array_equal(quantize(a), quantize(b))

    @pytest.mark.parametrize("kind", sorted(DETERMINISTIC_KINDS))
    def test_deterministic_kinds_ignore_seed(self, kind, table, probes):
        spec = CorruptionSpec.from_table(table, kind, 4)
        a = apply_corruption(probes[2], spec, make_rng(1))
        b = apply_corruption(probes[2], spec, make_rng(2))
        np.testing.assert_array_equal(a, b)


class TestIdentityFixedPoints:
    def test_constant_image_under_every_blur(self, table):
        img = np.full((24, 24, 3), 0.5, dtype=np.float32)
        for kind in BLUR_KINDS:
            for sev in (1, 5):
                spec = CorruptionSpec.from_table(table, kind, sev)
                out = apply_corruption(img, spec, make_rng(3))
                np.testing.assert_allclose(out, 0.5, atol=1e-6, err_msg=kind)

    def test_zero_sigma_noise(self):
        img = random_image(4)
        out = apply_noise(img, "gaussian_noise", {"sigma": 0.0}, make_rng(0))
        np.testing.assert_allclose(out, img, atol=1e-6)
        out = apply_noise(img, "speckle_noise", {"sigma": 0.0}, make_rng(0))
        np.testing.assert_allclose(out, img, atol=1e-6)

    def test_unit_pixelate(self):
        img = random_image(5)
        out = apply_digital(img, "pixelate", {"shrink_fraction": 1.0})
        np.testing.assert_allclose(out, img, atol=1e-6)

    def test_zero_displacement_elastic(self):
        img = random_image(6, 20, 20)
        params = {"amplitude_frac": 0.0, "smooth_frac": 0.02, "affine_frac": 0.0}
        out = apply_digital(img, "elastic", params, make_rng(0))
        np.testing.assert_allclose(out, img, atol=1e-6)

    def test_zero_strength_fog(self):
        img = random_image(7)
        out = apply_weather(img, "fog", {"haze_strength": 0.0, "wibble_decay": 2.0}, make_rng(0))
        np.testing.assert_allclose(out, img, atol=1e-6)

    def test_unit_zoom_ladder(self):
        img = random_image(8)
        out = apply_blur(img, "zoom_blur", {"factors": [1.0]})
        np.testing.assert_allclose(out, img, atol=1e-6)

    def test_contrast_fixes_constant(self):
        img = np.full((10, 10, 3), 0.31, dtype=np.float32)
        for c in (0.05, 0.5, 3.0):
            out = apply_photometric(img, "contrast", {"factor": c})
            np.testing.assert_allclose(out, img, atol=1e-6)

    def test_saturate_fixes_gray(self):
        img = np.full((6, 6, 3), 0.42, dtype=np.float32)
        out = apply_photometric(img, "saturate", {"factor": 5.0, "offset": 0.0})
        np.testing.assert_allclose(out, img, atol=1e-6)


class TestNoiseStatistics:
    def test_impulse_binomial_fraction(self):
        p = 0.1
        img = np.full((1000, 1000, 3), 0.5, dtype=np.float32)
        out = apply_noise(img, "impulse_noise", {"flip_fraction": p}, make_rng(123))
        flipped = np.mean(np.any(out != img, axis=2))
        tol = 3.0 * np.sqrt(p * (1 - p) / 1e6)
        assert abs(flipped - p) <= tol

    def test_impulse_flips_to_extremes(self):
        img = np.full((64, 64, 3), 0.5, dtype=np.float32)
        out = apply_noise(img, "impulse_noise", {"flip_fraction": 0.3}, make_rng(5))
        changed = out[np.any(out != img, axis=2)]
        assert set(np.unique(changed)) <= {0.0, 1.0}

    def test_gaussian_moments(self):
        img = np.full((1000, 1000, 1 * 3), 0.5, dtype=np.float32).reshape(1000, 1000, 3)
        out = apply_noise(img, "gaussian_noise", {"sigma": 0.1}, make_rng(321))
        noise = out.astype(np.float64) - 0.5
        assert abs(noise.mean()) <= 0.001
        assert abs(noise.std() - 0.1) <= 0.005

    def test_shot_noise_scales_inversely(self, probes):
        img = probes[0]
        rms = []
        for lam in (60, 3):
            out = apply_noise(img, "shot_noise", {"photon_scale": lam}, make_rng(9))
            rms.append(np.sqrt(np.mean((out - img) ** 2)))
        assert rms[1] > rms[0]

    def test_bad_noise_params(self):
        img = random_image(0)
        with pytest.raises(ValueError):
            apply_noise(img, "gaussian_noise", {"sigma": -1.0}, make_rng(0))
        with pytest.raises(ValueError):
            apply_noise(img, "impulse_noise", {"flip_fraction": 1.5}, make_rng(0))
        with pytest.raises(ValueError):
            apply_noise(img, "shot_noise", {"photon_scale": 0.0}, make_rng(0))


class TestBlurs:
    def test_motion_blur_step_edge_ramp(self):
        img = np.zeros((16, 16, 3), dtype=np.float32)
        img[:, 8:] = 1.0
        out = apply_blur(img, "motion_blur",
                         {"length": 5, "angle_min_deg": 0, "angle_max_deg": 0},
                         make_rng(0))
        row = np.zeros(16)
        row[8:] = 1.0
        padded = np.concatenate([[row[0]] * 2, row, [row[-1]] * 2])
        expected = np.convolve(padded, np.full(5, 0.2), mode="valid")
        for r in range(16):
            np.testing.assert_allclose(out[r, :, 0], expected, atol=1e-6)

    def test_zoom_ladder_matches_reference_counts(self):
        assert len(zoom_ladder(1.11, 0.01)) == 11
        assert len(zoom_ladder(1.31, 0.03)) == 11
        assert zoom_ladder(1.11, 0.01)[0] == 1.0

    def test_empty_zoom_ladder_rejected(self):
        with pytest.raises(ValueError):
            apply_blur(random_image(0), "zoom_blur", {"factors": []})
        with pytest.raises(ValueError):
            zoom_ladder(1.0, 0.01)

    def test_zero_length_motion_rejected(self):
        with pytest.raises(ValueError):
            apply_blur(random_image(0), "motion_blur",
                       {"length": 0, "angle_min_deg": 0, "angle_max_deg": 0}, make_rng(0))

    def test_glass_blur_needs_sane_params(self):
        with pytest.raises(ValueError):
            apply_blur(random_image(0), "glass_blur",
                       {"sigma": 0.5, "max_shift": 0, "iterations": 1}, make_rng(0))


class TestWeather:
    def test_fog_raises_mean_of_mid_gray(self, table):
        base = np.full((32, 32, 3), 0.5, dtype=np.float32)
        spec = CorruptionSpec.from_table(table, "fog", 2)
        for seed in range(20):
            out = apply_corruption(base, spec, make_rng(seed))
            assert out.mean() > base.mean()

    def test_frost_same_seed_same_crop(self, table, probes):
        spec = CorruptionSpec.from_table(table, "frost", 3)
        a = apply_corruption(probes[3], spec, make_rng(77))
        b = apply_corruption(probes[3], spec, make_rng(77))
        np.testing.assert_array_equal(a, b)
        c = apply_corruption(probes[3], spec, make_rng(78))
        assert np.any(quantize(a) != quantize(c))

    def test_frost_blend_bounds(self):
        img = random_image(11, 32, 32)
        with pytest.raises(ValueError):
            apply_weather(img, "frost", {"keep": 1.4, "strength": 0.4}, make_rng(0))

    def test_snow_whitens_dark_image(self, table):
        img = np.full((32, 32, 3), 0.1, dtype=np.float32)
        spec = CorruptionSpec.from_table(table, "snow", 5)
        out = apply_corruption(img, spec, make_rng(3))
        assert out.mean() > img.mean()

    def test_spatter_modes(self, table, probes):
        water = CorruptionSpec.from_table(table, "spatter", 1)
        mud = CorruptionSpec.from_table(table, "spatter", 5)
        a = apply_corruption(probes[4], water, make_rng(1))
        b = apply_corruption(probes[4], mud, make_rng(1))
        assert a.mean() >= probes[4].mean() - 1e-6  # droplets only lighten
        assert not np.array_equal(a, b)

    def test_unknown_spatter_mode(self):
        with pytest.raises(ValueError):
            apply_weather(random_image(0), "spatter",
                          {"mode": "oil", "loc": 0.5, "scale": 0.1, "blur_sigma": 1,
                           "threshold": 0.5, "strength": 0.5}, make_rng(0))


class TestPhotometricAndDigital:
    def test_brightness_shifts_lightness(self):
        from leafbench.image import rgb_to_hls

        img = np.full((8, 8, 3), 0.5, dtype=np.float32)
        out = apply_photometric(img, "brightness", {"offset": 0.1})
        lightness = rgb_to_hls(out)[..., 1]
        np.testing.assert_allclose(lightness, 0.6, atol=1e-2)

    def test_contrast_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            apply_photometric(random_image(0), "contrast", {"factor": 0.0})

    def test_jpeg_quality_bounds(self):
        with pytest.raises(ValueError):
            apply_digital(random_image(0), "jpeg", {"quality": 0})
        with pytest.raises(ValueError):
            apply_digital(random_image(0), "jpeg", {"quality": 101})

    def test_pixelate_fraction_bounds(self):
        with pytest.raises(ValueError):
            apply_digital(random_image(0), "pixelate", {"shrink_fraction": 0.0})
        with pytest.raises(ValueError):
            apply_digital(random_image(0), "pixelate", {"shrink_fraction": 1.2})

    def test_jpeg_idempotence_tendency(self, probes):
        # recompressing an already-compressed image hurts less than the
        # first compression did
        wins = 0
        for img in probes:
            once = apply_digital(img, "jpeg", {"quality": 95})
            twice = apply_digital(once, "jpeg", {"quality": 95})
            if psnr(once, twice) > psnr(img, once):
                wins += 1
        assert wins >= 18

    def test_family_dispatch_rejects_foreign_kind(self):
        with pytest.raises(ValueError):
            apply_noise(random_image(0), "fog", {}, make_rng(0))
        with pytest.raises(ValueError):
            apply_photometric(random_image(0), "jpeg", {})


class TestSeverityMonotonicity:
    @pytest.mark.parametrize("kind", ["gaussian_noise", "contrast", "pixelate"])
    def test_quick_rms_ramp(self, kind, table, probes):
        # full 19-kind sweep lives in the acceptance suite
        rms = []
        for sev in SEVERITIES:
            spec = CorruptionSpec.from_table(table, kind, sev)
            devs = [
                np.sqrt(np.mean((apply_corruption(img, spec, make_rng(100 + i)) - img) ** 2))
                for i, img in enumerate(probes[:6])
            ]
            rms.append(float(np.mean(devs)))
        assert all(b >= a - 1e-4 for a, b in zip(rms, rms[1:])), rms
