"""Hot numeric kernels, each in a numba and a pure-numpy flavour.

The public names at the bottom of this module are bound to the numba
versions unless numba is missing or ``CHROMATONE_DISABLE_JIT`` is set. Both
flavours are importable directly (``numba_impl`` / ``numpy_impl``) so tests
and benchmarks can compare them.

All kernels operate on float64 arrays. Colours are rows of an ``(n, 3)``
array; images are ``(height, width, channels)``.
"""

from types import SimpleNamespace

import numpy as np

from ._accel import NUMBA_AVAILABLE, USE_NUMBA, njit  # noqa: F401

# sRGB primaries, D65, 2 degree observer
SRGB_TO_XYZ = np.array(
    [
        [0.4124564, 0.3575761, 0.1804375],
        [0.2126729, 0.7151522, 0.0721750],
        [0.0193339, 0.1191920, 0.9503041],
    ]
)
XYZ_TO_SRGB = np.linalg.inv(SRGB_TO_XYZ)
# reference white is the image of RGB (1, 1, 1) so white maps to a=b=0 exactly
WHITE_D65 = SRGB_TO_XYZ.sum(axis=1) * 100.0

_EPS = (6.0 / 29.0) ** 3
_KAPPA = 3.0 * (6.0 / 29.0) ** 2
_POW25_7 = 25.0**7


# ---------------------------------------------------------------------------
# numpy flavour
# ---------------------------------------------------------------------------


def _np_srgb_to_lab(rgb):
    c = np.asarray(rgb, dtype=np.float64) / 255.0
    lin = np.where(c <= 0.04045, c / 12.92, ((c + 0.055) / 1.055) ** 2.4)
    xyz = lin @ SRGB_TO_XYZ.T * 100.0
    t = xyz / WHITE_D65
    f = np.where(t > _EPS, np.cbrt(t), t / _KAPPA + 4.0 / 29.0)
    out = np.empty_like(f)
    out[:, 0] = 116.0 * f[:, 1] - 16.0
    out[:, 1] = 500.0 * (f[:, 0] - f[:, 1])
    out[:, 2] = 200.0 * (f[:, 1] - f[:, 2])
    return out


def _np_ciede2000(lab1, lab2, kl, kc, kh):
    lab1 = np.asarray(lab1, dtype=np.float64)
    lab2 = np.asarray(lab2, dtype=np.float64)
    L1, a1, b1 = lab1[:, 0], lab1[:, 1], lab1[:, 2]
    L2, a2, b2 = lab2[:, 0], lab2[:, 1], lab2[:, 2]

    c_bar = 0.5 * (np.hypot(a1, b1) + np.hypot(a2, b2))
    c_bar7 = c_bar**7
    g = 0.5 * (1.0 - np.sqrt(c_bar7 / (c_bar7 + _POW25_7)))
    a1p = (1.0 + g) * a1
    a2p = (1.0 + g) * a2
    c1p = np.hypot(a1p, b1)
    c2p = np.hypot(a2p, b2)
    h1p = np.where(c1p == 0.0, 0.0, np.degrees(np.arctan2(b1, a1p)) % 360.0)
    h2p = np.where(c2p == 0.0, 0.0, np.degrees(np.arctan2(b2, a2p)) % 360.0)

    cprod = c1p * c2p
    dh = h2p - h1p
    dh = np.where(dh > 180.0, dh - 360.0, dh)
    dh = np.where(dh < -180.0, dh + 360.0, dh)
    dh = np.where(cprod == 0.0, 0.0, dh)

    dL = L2 - L1
    dC = c2p - c1p
    dH = 2.0 * np.sqrt(cprod) * np.sin(np.radians(dh) / 2.0)

    l_bar = 0.5 * (L1 + L2)
    cp_bar = 0.5 * (c1p + c2p)
    hsum = h1p + h2p
    h_bar = np.where(
        np.abs(h1p - h2p) <= 180.0,
        hsum / 2.0,
        np.where(hsum < 360.0, (hsum + 360.0) / 2.0, (hsum - 360.0) / 2.0),
    )
    h_bar = np.where(cprod == 0.0, hsum, h_bar)

    t = (
        1.0
        - 0.17 * np.cos(np.radians(h_bar - 30.0))
        + 0.24 * np.cos(np.radians(2.0 * h_bar))
        + 0.32 * np.cos(np.radians(3.0 * h_bar + 6.0))
        - 0.20 * np.cos(np.radians(4.0 * h_bar - 63.0))
    )
    d_theta = 30.0 * np.exp(-(((h_bar - 275.0) / 25.0) ** 2))
    cp_bar7 = cp_bar**7
    r_c = 2.0 * np.sqrt(cp_bar7 / (cp_bar7 + _POW25_7))
    l50 = (l_bar - 50.0) ** 2
    s_l = 1.0 + 0.015 * l50 / np.sqrt(20.0 + l50)
    s_c = 1.0 + 0.045 * cp_bar
    s_h = 1.0 + 0.015 * cp_bar * t
    r_t = -np.sin(np.radians(2.0 * d_theta)) * r_c

    tl = dL / (kl * s_l)
    tc = dC / (kc * s_c)
    th = dH / (kh * s_h)
    return np.sqrt(np.maximum(tl * tl + tc * tc + th * th + r_t * tc * th, 0.0))


def _np_nearest_center(points, centers):
    diff = points[:, None, :] - centers[None, :, :]
    d2 = np.einsum("nkd,nkd->nk", diff, diff)
    labels = np.argmin(d2, axis=1)
    return labels.astype(np.int64), d2[np.arange(len(points)), labels]


def _np_cluster_sums(points, labels, k):
    sums = np.empty((k, points.shape[1]))
    for j in range(points.shape[1]):
        sums[:, j] = np.bincount(labels, weights=points[:, j], minlength=k)
    return sums, np.bincount(labels, minlength=k)


def _reflect_pad_width(img, half, axis):
    pad = [(0, 0)] * img.ndim
    pad[axis] = (half, half)
    return np.pad(img, pad, mode="reflect") if img.shape[axis] > 1 else np.pad(img, pad, mode="edge")


def _np_convolve_axis(img, weights, axis):
    half = len(weights) // 2
    padded = _reflect_pad_width(img, half, axis)
    n = img.shape[axis]
    out = np.zeros_like(img)
    for j, w in enumerate(weights):
        out += w * np.take(padded, np.arange(j, j + n), axis=axis)
    return out


def _np_blur_separable(img, weights):
    return _np_convolve_axis(_np_convolve_axis(img, weights, 1), weights, 0)


def _np_shift_reduce(mask, radius, axis, dilate):
    out = mask.copy()
    n = mask.shape[axis]
    for s in range(1, radius + 1):
        if s >= n:
            break
        lo = [slice(None)] * mask.ndim
        hi = [slice(None)] * mask.ndim
        lo[axis] = slice(0, n - s)
        hi[axis] = slice(s, n)
        lo, hi = tuple(lo), tuple(hi)
        if dilate:
            out[lo] |= mask[hi]
            out[hi] |= mask[lo]
        else:
            out[lo] &= mask[hi]
            out[hi] &= mask[lo]
    return out


def _np_dilate(mask, radius):
    return _np_shift_reduce(_np_shift_reduce(mask, radius, 1, True), radius, 0, True)


def _np_erode(mask, radius):
    return _np_shift_reduce(_np_shift_reduce(mask, radius, 1, False), radius, 0, False)


numpy_impl = SimpleNamespace(
    srgb_to_lab=_np_srgb_to_lab,
    ciede2000=_np_ciede2000,
    nearest_center=_np_nearest_center,
    cluster_sums=_np_cluster_sums,
    blur_separable=_np_blur_separable,
    dilate=_np_dilate,
    erode=_np_erode,
)


# ---------------------------------------------------------------------------
# numba flavour
# ---------------------------------------------------------------------------


@njit(cache=True, nogil=True)
def _nb_srgb_to_lab(rgb):
    n = rgb.shape[0]
    out = np.empty((n, 3))
    lin = np.empty(3)
    for i in range(n):
        for ch in range(3):
            c = rgb[i, ch] / 255.0
            if c <= 0.04045:
                lin[ch] = c / 12.92
            else:
                lin[ch] = ((c + 0.055) / 1.055) ** 2.4
        f0 = f1 = f2 = 0.0
        for row in range(3):
            v = 0.0
            for ch in range(3):
                v += SRGB_TO_XYZ[row, ch] * lin[ch]
            t = v * 100.0 / WHITE_D65[row]
            if t > _EPS:
                ft = np.cbrt(t)
            else:
                ft = t / _KAPPA + 4.0 / 29.0
            if row == 0:
                f0 = ft
            elif row == 1:
                f1 = ft
            else:
                f2 = ft
        out[i, 0] = 116.0 * f1 - 16.0
        out[i, 1] = 500.0 * (f0 - f1)
        out[i, 2] = 200.0 * (f1 - f2)
    return out


@njit(cache=True, nogil=True)
def _nb_ciede2000(lab1, lab2, kl, kc, kh):
    n = lab1.shape[0]
    out = np.empty(n)
    deg = 180.0 / np.pi
    rad = np.pi / 180.0
    for i in range(n):
        L1, a1, b1 = lab1[i, 0], lab1[i, 1], lab1[i, 2]
        L2, a2, b2 = lab2[i, 0], lab2[i, 1], lab2[i, 2]
        c_bar = 0.5 * (np.sqrt(a1 * a1 + b1 * b1) + np.sqrt(a2 * a2 + b2 * b2))
        c_bar7 = c_bar**7
        g = 0.5 * (1.0 - np.sqrt(c_bar7 / (c_bar7 + _POW25_7)))
        a1p = (1.0 + g) * a1
        a2p = (1.0 + g) * a2
        c1p = np.sqrt(a1p * a1p + b1 * b1)
        c2p = np.sqrt(a2p * a2p + b2 * b2)
        h1p = 0.0
        if c1p != 0.0:
            h1p = (np.arctan2(b1, a1p) * deg) % 360.0
        h2p = 0.0
        if c2p != 0.0:
            h2p = (np.arctan2(b2, a2p) * deg) % 360.0

        cprod = c1p * c2p
        hsum = h1p + h2p
        if cprod == 0.0:
            dh = 0.0
            h_bar = hsum
        else:
            dh = h2p - h1p
            if dh > 180.0:
                dh -= 360.0
            elif dh < -180.0:
                dh += 360.0
            if abs(h1p - h2p) <= 180.0:
                h_bar = hsum / 2.0
            elif hsum < 360.0:
                h_bar = (hsum + 360.0) / 2.0
            else:
                h_bar = (hsum - 360.0) / 2.0

        dL = L2 - L1
        dC = c2p - c1p
        dH = 2.0 * np.sqrt(cprod) * np.sin(dh * rad / 2.0)
        l_bar = 0.5 * (L1 + L2)
        cp_bar = 0.5 * (c1p + c2p)

        t = (
            1.0
            - 0.17 * np.cos((h_bar - 30.0) * rad)
            + 0.24 * np.cos(2.0 * h_bar * rad)
            + 0.32 * np.cos((3.0 * h_bar + 6.0) * rad)
            - 0.20 * np.cos((4.0 * h_bar - 63.0) * rad)
        )
        d_theta = 30.0 * np.exp(-(((h_bar - 275.0) / 25.0) ** 2))
        cp_bar7 = cp_bar**7
        r_c = 2.0 * np.sqrt(cp_bar7 / (cp_bar7 + _POW25_7))
        l50 = (l_bar - 50.0) ** 2
        s_l = 1.0 + 0.015 * l50 / np.sqrt(20.0 + l50)
        s_c = 1.0 + 0.045 * cp_bar
        s_h = 1.0 + 0.015 * cp_bar * t
        r_t = -np.sin(2.0 * d_theta * rad) * r_c

        tl = dL / (kl * s_l)
        tc = dC / (kc * s_c)
        th = dH / (kh * s_h)
        v = tl * tl + tc * tc + th * th + r_t * tc * th
        out[i] = np.sqrt(v) if v > 0.0 else 0.0
    return out


@njit(cache=True, nogil=True)
def _nb_nearest_center(points, centers):
    n, d = points.shape
    k = centers.shape[0]
    labels = np.empty(n, dtype=np.int64)
    best = np.empty(n)
    for i in range(n):
        bi = 0
        bd = np.inf
        for j in range(k):
            s = 0.0
            for m in range(d):
                diff = points[i, m] - centers[j, m]
                s += diff * diff
            if s < bd:
                bd = s
                bi = j
        labels[i] = bi
        best[i] = bd
    return labels, best


@njit(cache=True, nogil=True)
def _nb_cluster_sums(points, labels, k):
    n, d = points.shape
    sums = np.zeros((k, d))
    counts = np.zeros(k, dtype=np.int64)
    for i in range(n):
        j = labels[i]
        counts[j] += 1
        for c in range(d):
            sums[j, c] += points[i, c]
    return sums, counts


@njit(cache=True, nogil=True)
def _reflect101(i, n):
    if n == 1:
        return 0
    period = 2 * (n - 1)
    i = abs(i) % period
    if i >= n:
        i = period - i
    return i


@njit(cache=True, nogil=True)
def _nb_blur_separable(img, weights):
    h, w, c = img.shape
    half = weights.shape[0] // 2
    tmp = np.zeros_like(img)
    for y in range(h):
        for x in range(w):
            for j in range(weights.shape[0]):
                xx = _reflect101(x + j - half, w)
                wt = weights[j]
                for ch in range(c):
                    tmp[y, x, ch] += wt * img[y, xx, ch]
    out = np.zeros_like(img)
    for y in range(h):
        for j in range(weights.shape[0]):
            yy = _reflect101(y + j - half, h)
            wt = weights[j]
            for x in range(w):
                for ch in range(c):
                    out[y, x, ch] += wt * tmp[yy, x, ch]
    return out


@njit(cache=True, nogil=True)
def _nb_morph(mask, radius, dilate):
    # running count of set cells in the window; both passes walk memory in row order
    h, w = mask.shape
    tmp = np.empty_like(mask)
    for y in range(h):
        cnt = 0
        for x in range(min(w, radius)):
            cnt += mask[y, x]
        for x in range(w):
            if x + radius < w:
                cnt += mask[y, x + radius]
            if x - radius - 1 >= 0:
                cnt -= mask[y, x - radius - 1]
            size = min(w, x + radius + 1) - max(0, x - radius)
            tmp[y, x] = cnt > 0 if dilate else cnt == size
    out = np.empty_like(mask)
    cnts = np.zeros(w, dtype=np.int64)
    for y in range(min(h, radius)):
        for x in range(w):
            cnts[x] += tmp[y, x]
    for y in range(h):
        if y + radius < h:
            for x in range(w):
                cnts[x] += tmp[y + radius, x]
        if y - radius - 1 >= 0:
            for x in range(w):
                cnts[x] -= tmp[y - radius - 1, x]
        size = min(h, y + radius + 1) - max(0, y - radius)
        for x in range(w):
            out[y, x] = cnts[x] > 0 if dilate else cnts[x] == size
    return out


def _nb_dilate(mask, radius):
    return _nb_morph(mask, radius, True)


def _nb_erode(mask, radius):
    return _nb_morph(mask, radius, False)


numba_impl = SimpleNamespace(
    srgb_to_lab=_nb_srgb_to_lab,
    ciede2000=_nb_ciede2000,
    nearest_center=_nb_nearest_center,
    cluster_sums=_nb_cluster_sums,
    blur_separable=_nb_blur_separable,
    dilate=_nb_dilate,
    erode=_nb_erode,
)

active = numba_impl if USE_NUMBA else numpy_impl
BACKEND = "numba" if USE_NUMBA else "numpy"


def srgb_to_lab(rgb):
    """Convert an ``(n, 3)`` array of sRGB values in [0, 255] to CIELAB."""
    return active.srgb_to_lab(np.ascontiguousarray(rgb, dtype=np.float64))


def ciede2000(lab1, lab2, kl=1.0, kc=1.0, kh=1.0):
    """Row-wise CIEDE2000 between two ``(n, 3)`` LAB arrays."""
    lab1 = np.ascontiguousarray(lab1, dtype=np.float64)
    lab2 = np.ascontiguousarray(lab2, dtype=np.float64)
    lab1, lab2 = np.broadcast_arrays(lab1, lab2)
    return active.ciede2000(
        np.ascontiguousarray(lab1), np.ascontiguousarray(lab2), float(kl), float(kc), float(kh)
    )


def nearest_center(points, centers):
    """Index of, and squared distance to, the closest center for every point."""
    return active.nearest_center(
        np.ascontiguousarray(points, dtype=np.float64),
        np.ascontiguousarray(centers, dtype=np.float64),
    )


def cluster_sums(points, labels, k):
    """Per-cluster coordinate sums and member counts."""
    return active.cluster_sums(
        np.ascontiguousarray(points, dtype=np.float64),
        np.ascontiguousarray(labels, dtype=np.int64),
        int(k),
    )


def blur_separable(img, weights):
    """Convolve an ``(h, w, c)`` float image with ``weights`` along both axes."""
    return active.blur_separable(
        np.ascontiguousarray(img, dtype=np.float64),
        np.ascontiguousarray(weights, dtype=np.float64),
    )


def dilate(mask, radius):
    return active.dilate(np.ascontiguousarray(mask, dtype=np.bool_), int(radius))


def erode(mask, radius):
    return active.erode(np.ascontiguousarray(mask, dtype=np.bool_), int(radius))
