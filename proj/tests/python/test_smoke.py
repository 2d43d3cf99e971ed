import math

import numpy as np
import pytest

import rsddog


def blobs(size, count, seed):
    rng = np.random.default_rng(seed)
    yy, xx = np.mgrid[0:size, 0:size]
    img = np.full((size, size), 128.0)
    for _ in range(count):
        cx, cy = rng.uniform(0, size, 2)
        s = rng.uniform(1.5, 5.0)
        img += rng.uniform(-100, 100) * np.exp(-((xx - cx) ** 2 + (yy - cy) ** 2) / (2 * s * s))
    return img


def test_kernel_is_normalized_half_plane():
    taps, ax, ay = rsddog.half_gaussian_kernel(6.0, 2.0, 0.0)
    assert math.isclose(taps.sum(), 1.0, rel_tol=1e-9)
    assert np.all(taps[:, :ax] == 0.0)


def test_constant_image_has_no_response():
    stack = rsddog.dhsf_stack(np.full((40, 40), 77.0))
    assert stack.shape == (36, 40, 40)
    assert np.abs(stack).max() < 1e-6


def test_ridge_orientation_is_perpendicular():
    img = rsddog.synth_image("ridge", angle=30.0, size=96)
    field = rsddog.orientation_field(img)
    eta = field["eta1"][48, 48]
    err = abs((eta - 120.0 + 90.0) % 180.0 - 90.0)
    assert field["valid"][48, 48]
    assert err <= 10.0


def test_peaks_and_midpoint():
    values = [math.cos(math.radians(10 * k - 70)) for k in range(36)]
    p = rsddog.extract_peaks(values)
    assert p["theta_max"] == (70.0, 70.0)
    assert p["max_count"] == 1
    assert rsddog.circular_midpoint(350.0, 10.0) == 0.0
    assert rsddog.circular_midpoint(0.0, 180.0) == 90.0


def test_descriptor_shapes_and_relight():
    patch = blobs(41, 30, 1)
    d = rsddog.describe_patch(patch)
    assert d.shape == (256,)
    assert math.isclose(np.linalg.norm(d), 1.0, rel_tol=1e-9)
    assert rsddog.describe_patch(patch, scales=3).shape == (512,)
    assert np.abs(rsddog.describe_patch(2.0 * patch + 30.0) - d).max() < 1e-5
    assert not rsddog.describe_patch(np.zeros((41, 41))).any()
    with pytest.raises(ValueError):
        rsddog.describe_patch(np.zeros((40, 41)))


def test_self_match_pipeline(tmp_path):
    img = blobs(128, 200, 2)
    path = str(tmp_path / "img.pgm")
    rsddog.save_pgm(img, path)
    img = rsddog.load_image(path)
    regions = rsddog.harris_detect(img, max_regions=40)
    assert len(regions) == 40
    desc = rsddog.extract_descriptors(img, regions, jobs=2)
    assert desc.shape == (40, 256)
    pairs = rsddog.ground_truth(regions, regions, np.eye(3))
    assert len(pairs) == 40
    c = rsddog.curve(desc, desc, pairs)
    assert c.shape == (64, 5)
    assert c[-1, 1] == 1.0
    assert np.all(np.diff(c[:, 1]) >= 0)


def test_errors_map_to_python_exceptions():
    with pytest.raises(ValueError):
        rsddog.synth_image("spiral")
    with pytest.raises(ValueError):
        rsddog.dhsf_stack(np.zeros((32, 32)), delta_theta=7.0)
    with pytest.raises(RuntimeError):
        rsddog.load_image("/nonexistent.pgm")
