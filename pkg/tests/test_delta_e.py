import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st
from skimage.color import deltaE_ciede94, deltaE_ciede2000

from chromatone import kernels
from chromatone.color import LabColor, RgbColor, rgb_to_lab
from chromatone.delta_e import (
    DeltaEParams,
    DistanceMetric,
    cie76,
    cie94,
    cie94_array,
    ciede2000,
    ciede2000_array,
    color_distance,
    euclidean_distance,
    lab_distance_array,
)

from .ciede2000_pairs import CIEDE2000_PAIRS

lab_colors = st.builds(
    LabColor,
    st.floats(0, 100),
    st.floats(-128, 127),
    st.floats(-128, 127),
)
rgb_colors = st.builds(RgbColor, *[st.integers(0, 255)] * 3)


def random_labs(rng, n):
    labs = rng.uniform([0, -100, -100], [100, 100, 100], (n, 3))
    labs[: n // 5, 1:] *= 1e-4  # near-neutral
    return labs


class TestEuclidean:
    def test_examples(self):
        assert euclidean_distance((0, 0, 0), (3, 4, 0)) == 5.0
        assert euclidean_distance((1, 2, 3), (4, 6, 3)) == 5.0
        assert euclidean_distance((7, 8, 9), (7, 8, 9)) == 0.0

    def test_cie76(self):
        assert cie76(LabColor(50, 0, 0), LabColor(50, 3, 4)) == 5.0
        assert cie76(LabColor(50, 2.6772, -79.7751), LabColor(50, 0, -82.7485)) == pytest.approx(4.001, abs=1e-3)


class TestCie94:
    def test_pure_lightness(self):
        assert cie94(LabColor(50, 0, 0), LabColor(55, 0, 0)) == pytest.approx(5.0, abs=1e-12)

    def test_matches_skimage(self, rng):
        a, b = random_labs(rng, 2000), random_labs(rng, 2000)
        np.testing.assert_allclose(cie94_array(a, b), deltaE_ciede94(a, b), atol=1e-9)

    def test_pair_against_skimage(self):
        a, b = (50, 2.6772, -79.7751), (50, 0, -82.7485)
        expected = deltaE_ciede94(np.array(a, float), np.array(b, float))
        assert cie94(LabColor(*a), LabColor(*b)) == pytest.approx(float(expected), abs=1e-12)

    def test_asymmetry_is_bounded(self, rng):
        a, b = random_labs(rng, 2000), random_labs(rng, 2000)
        ab, ba = cie94_array(a, b), cie94_array(b, a)
        rel = np.abs(ab - ba) / np.maximum(ab, ba)
        # asymmetry is real for most pairs; 10% bounds it for pairs of similar chroma
        close = np.abs(np.hypot(a[:, 1], a[:, 2]) - np.hypot(b[:, 1], b[:, 2])) < 10
        assert np.all(rel[close] <= 0.10)
        assert np.any(ab != ba)


class TestCiede2000:
    def test_identity(self):
        assert ciede2000(LabColor(50, 10, -10), LabColor(50, 10, -10)) == 0.0

    def test_published_example(self):
        d = ciede2000(LabColor(50, 2.6772, -79.7751), LabColor(50, 0, -82.7485))
        assert d == pytest.approx(2.0425, abs=1e-4)

    @pytest.mark.parametrize("impl", ["numpy", "numba"])
    def test_published_pairs(self, impl):
        pairs = np.array(CIEDE2000_PAIRS)
        fn = kernels.numpy_impl.ciede2000 if impl == "numpy" else kernels.numba_impl.ciede2000
        got = fn(np.ascontiguousarray(pairs[:, :3]), np.ascontiguousarray(pairs[:, 3:6]), 1.0, 1.0, 1.0)
        np.testing.assert_allclose(got, pairs[:, 6], atol=1e-4, rtol=0)
        swapped = fn(np.ascontiguousarray(pairs[:, 3:6]), np.ascontiguousarray(pairs[:, :3]), 1.0, 1.0, 1.0)
        np.testing.assert_allclose(swapped, pairs[:, 6], atol=1e-4, rtol=0)

    def test_matches_skimage(self, rng):
        a, b = random_labs(rng, 5000), random_labs(rng, 5000)
        np.testing.assert_allclose(ciede2000_array(a, b), deltaE_ciede2000(a, b), atol=1e-9)

    def test_matches_skimage_with_weights(self, rng):
        a, b = random_labs(rng, 500), random_labs(rng, 500)
        p = DeltaEParams(2.0, 1.5, 0.5)
        ref = deltaE_ciede2000(a, b, kL=2.0, kC=1.5, kH=0.5)
        np.testing.assert_allclose(ciede2000_array(a, b, p), ref, atol=1e-9)

    @given(lab_colors, lab_colors)
    def test_symmetric_and_nonnegative(self, a, b):
        ab, ba = ciede2000(a, b), ciede2000(b, a)
        assert ab >= 0.0
        assert ab == pytest.approx(ba, abs=1e-9)

    def test_default_params_are_unit(self, rng):
        a, b = random_labs(rng, 200), random_labs(rng, 200)
        np.testing.assert_array_equal(
            ciede2000_array(a, b), ciede2000_array(a, b, DeltaEParams(1.0, 1.0, 1.0))
        )

    @given(lab_colors, lab_colors)
    def test_doubling_kl_decreases(self, a, b):
        assume(abs(a.l - b.l) > 1e-3)
        base = ciede2000(a, b)
        assert ciede2000(a, b, DeltaEParams(k_l=2.0)) < base

    def test_continuity_probe(self, rng):
        labs1, labs2 = random_labs(rng, 3000), random_labs(rng, 3000)
        base = ciede2000_array(labs1, labs2)
        for axis in range(3):
            bumped = labs2.copy()
            bumped[:, axis] += rng.uniform(-1e-6, 1e-6, len(bumped))
            assert np.max(np.abs(ciede2000_array(labs1, bumped) - base)) <= 1e-3

    def test_neutral_pairs(self):
        # both achromatic: only lightness contributes, S_L weighting applies
        d = ciede2000(LabColor(50, 0, 0), LabColor(60, 0, 0))
        s_l = 1 + 0.015 * (55 - 50) ** 2 / np.sqrt(20 + (55 - 50) ** 2)
        assert d == pytest.approx(10 / s_l, abs=1e-12)


class TestDispatch:
    def test_parse(self):
        assert DistanceMetric.parse("CIEDE2000") is DistanceMetric.CIEDE2000
        with pytest.raises(ValueError, match="euclidean-rgb"):
            DistanceMetric.parse("cmc")

    def test_params_positive(self):
        with pytest.raises(ValueError):
            DeltaEParams(k_l=0.0)

    def test_euclidean_rgb_black_white(self):
        d = color_distance("euclidean-rgb", RgbColor(0, 0, 0), RgbColor(255, 255, 255))
        assert d == pytest.approx(255 * np.sqrt(3))

    @given(rgb_colors, st.sampled_from(list(DistanceMetric)))
    def test_identity_every_metric(self, c, metric):
        assert color_distance(metric, c, c) == pytest.approx(0.0, abs=1e-9)

    def test_red_blue_ciede2000(self):
        red, blue = RgbColor(255, 0, 0), RgbColor(0, 0, 255)
        la, lb = rgb_to_lab(red).as_array(), rgb_to_lab(blue).as_array()
        expected = float(deltaE_ciede2000(la, lb))
        assert color_distance("ciede2000", red, blue) == pytest.approx(expected, abs=1e-9)
        assert expected == pytest.approx(52.88, abs=0.01)

    @given(rgb_colors, rgb_colors)
    def test_lab_metrics_agree_with_scalars(self, x, y):
        a, b = rgb_to_lab(x), rgb_to_lab(y)
        assert color_distance("cie76", x, y) == pytest.approx(cie76(a, b), abs=1e-9)
        assert color_distance("euclidean-lab", x, y) == pytest.approx(cie76(a, b), abs=1e-9)
        assert color_distance("cie94", x, y) == pytest.approx(cie94(a, b), abs=1e-9)

    def test_euclidean_rgb_on_lab_rows(self):
        labs = np.array([rgb_to_lab(RgbColor(10, 20, 30)).as_tuple(), rgb_to_lab(RgbColor(13, 24, 30)).as_tuple()])
        assert lab_distance_array("euclidean-rgb", labs[:1], labs[1:])[0] == pytest.approx(5.0, abs=1e-6)
