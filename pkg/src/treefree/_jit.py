"""Optional numba compilation for the integer kernels.

Set ``TREEFREE_DISABLE_NUMBA=1`` to run every kernel as plain Python over
numpy arrays.  The same source runs either way; the jitted callables keep
the interpreted version on ``.py_func``.
"""

import os
import warnings

_FLAG = "TREEFREE_DISABLE_NUMBA"


class PerformanceWarning(UserWarning):
    pass


def _wanted() -> bool:
    return os.environ.get(_FLAG, "").strip().lower() not in ("1", "true", "yes", "on")


try:
    import numba as _numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    _numba = None

USE_NUMBA = _numba is not None and _wanted()

if _numba is None and _wanted():  # pragma: no cover
    warnings.warn("numba is not importable; kernels run interpreted", PerformanceWarning)


def njit(func=None, **kwargs):
    """``numba.njit(cache=True)`` when enabled, identity otherwise."""

    def wrap(f):
        if not USE_NUMBA:
            f.py_func = f
            return f
        opts = {"cache": True, "nogil": True}
        opts.update(kwargs)
        return _numba.njit(**opts)(f)

    return wrap if func is None else wrap(func)


def backend() -> str:
    return "numba" if USE_NUMBA else "python"
