"""The numba kernels and their numpy twins must agree."""

import os
import subprocess
import sys

import numpy as np
import pytest

from chromatone import kernels

NP = kernels.numpy_impl
NB = kernels.numba_impl


def test_white_point_maps_white_to_l100():
    lab = NP.srgb_to_lab(np.array([[255.0, 255.0, 255.0]]))
    np.testing.assert_allclose(lab, [[100.0, 0.0, 0.0]], atol=1e-12)


def test_srgb_to_lab_parity(rng):
    rgb = rng.integers(0, 256, (5000, 3)).astype(np.float64)
    np.testing.assert_allclose(NB.srgb_to_lab(rgb), NP.srgb_to_lab(rgb), atol=1e-10)


def test_ciede2000_parity(rng):
    lab1 = rng.uniform([0, -100, -100], [100, 100, 100], (5000, 3))
    lab2 = rng.uniform([0, -100, -100], [100, 100, 100], (5000, 3))
    # neutral and near-neutral rows exercise the C' = 0 branch
    lab1[:50, 1:] = 0.0
    lab2[25:75, 1:] = rng.normal(scale=1e-8, size=(50, 2))
    for k in [(1.0, 1.0, 1.0), (2.0, 1.0, 1.0), (1.0, 1.5, 0.7)]:
        np.testing.assert_allclose(NB.ciede2000(lab1, lab2, *k), NP.ciede2000(lab1, lab2, *k), atol=1e-10)


def test_nearest_center_parity(rng):
    pts = rng.normal(size=(2000, 3))
    centers = rng.normal(size=(7, 3))
    l_np, d_np = NP.nearest_center(pts, centers)
    l_nb, d_nb = NB.nearest_center(pts, centers)
    np.testing.assert_array_equal(l_nb, l_np)
    np.testing.assert_allclose(d_nb, d_np, rtol=1e-12, atol=1e-12)


def test_nearest_center_tie_goes_to_first():
    pts = np.array([[0.0, 0.0]])
    centers = np.array([[1.0, 0.0], [-1.0, 0.0]])
    for impl in (NP, NB):
        labels, _ = impl.nearest_center(pts, centers)
        assert labels[0] == 0


@pytest.mark.parametrize("shape", [(1, 1, 3), (1, 7, 3), (9, 1, 3), (13, 17, 3), (40, 31, 3)])
@pytest.mark.parametrize("size", [3, 5, 9])
def test_blur_parity(rng, shape, size):
    img = rng.uniform(0, 255, shape)
    w = rng.random(size)
    w /= w.sum()
    np.testing.assert_allclose(NB.blur_separable(img, w), NP.blur_separable(img, w), atol=1e-9)


def test_morphology_parity(rng):
    for _ in range(200):
        h, w = rng.integers(1, 25, 2)
        r = int(rng.integers(1, 6))
        m = rng.random((h, w)) < rng.random()
        np.testing.assert_array_equal(NB.dilate(m, r), NP.dilate(m, r))
        np.testing.assert_array_equal(NB.erode(m, r), NP.erode(m, r))


def test_env_flag_selects_numpy_backend():
    code = "from chromatone import kernels; print(kernels.BACKEND)"
    env = dict(os.environ, CHROMATONE_DISABLE_JIT="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
    env["CHROMATONE_DISABLE_JIT"] = "0"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == ("numba" if kernels.NUMBA_AVAILABLE else "numpy")
