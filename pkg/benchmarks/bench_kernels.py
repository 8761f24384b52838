"""Time the numba kernels against their numpy twins.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Compilation happens before timing starts.
"""

import argparse
import timeit

import numpy as np

from chromatone import kernels


def _cases(rng):
    rgb = rng.integers(0, 256, (256 * 256, 3)).astype(np.float64)
    lab1 = rng.uniform([0, -80, -80], [100, 80, 80], (200_000, 3))
    lab2 = rng.uniform([0, -80, -80], [100, 80, 80], (200_000, 3))
    pts = rng.normal(size=(100_000, 3))
    centers = rng.normal(size=(8, 3))
    img = rng.uniform(0, 255, (512, 512, 3))
    weights = np.ones(25) / 25
    mask = rng.random((512, 512)) < 0.3
    labels = rng.integers(0, 8, len(pts))
    return {
        "srgb_to_lab 65k px": ("srgb_to_lab", (rgb,)),
        "ciede2000 200k pairs": ("ciede2000", (lab1, lab2, 1.0, 1.0, 1.0)),
        "nearest_center 100k x 8": ("nearest_center", (pts, centers)),
        "cluster_sums 100k x 8": ("cluster_sums", (pts, labels, 8)),
        "blur 512x512 k=25": ("blur_separable", (img, weights)),
        "dilate 512x512 r=3": ("dilate", (mask, 3)),
        "erode 512x512 r=3": ("erode", (mask, 3)),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    cases = _cases(np.random.default_rng(0))
    print(f"{'kernel':<26}{'numpy ms':>10}{'numba ms':>10}{'speedup':>9}")
    for label, (name, call_args) in cases.items():
        np_fn = getattr(kernels.numpy_impl, name)
        nb_fn = getattr(kernels.numba_impl, name)
        nb_fn(*call_args)  # compile
        t_np = min(timeit.repeat(lambda: np_fn(*call_args), number=1, repeat=args.repeat))
        t_nb = min(timeit.repeat(lambda: nb_fn(*call_args), number=1, repeat=args.repeat))
        print(f"{label:<26}{t_np * 1e3:>10.2f}{t_nb * 1e3:>10.2f}{t_np / t_nb:>8.1f}x")


if __name__ == "__main__":
    main()
