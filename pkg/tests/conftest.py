import numpy as np
import pytest

from chromatone.imaging import ImageBuffer, PixelMask, save_image, save_mask


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def write_png(tmp_path):
    """Save an RGB array or a boolean mask under tmp_path and return the path."""

    def _write(name, array):
        path = tmp_path / name
        array = np.asarray(array)
        if array.ndim == 2:
            save_mask(PixelMask(array.astype(bool)), path)
        else:
            save_image(ImageBuffer(array.astype(np.uint8)), path)
        return path

    return _write


ACCEPTANCE_LINES = []


@pytest.fixture
def verdict():
    """Record a PASS/FAIL line for an acceptance criterion, then assert it."""

    def _verdict(number, ok, detail):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return _verdict


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
