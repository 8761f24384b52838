"""Numba availability and the switch between compiled and pure-numpy kernels.

Set ``CHROMATONE_DISABLE_JIT=1`` to force the numpy implementations even when
numba is installed.
"""

import os

_FALSE_VALUES = {"", "0", "false", "no", "off"}


def _env_flag(name):
    return os.environ.get(name, "").strip().lower() not in _FALSE_VALUES


try:
    import numba  # noqa: F401
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    NUMBA_AVAILABLE = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda fn: fn


JIT_DISABLED = _env_flag("CHROMATONE_DISABLE_JIT")
USE_NUMBA = NUMBA_AVAILABLE and not JIT_DISABLED
