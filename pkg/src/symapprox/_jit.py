"""Optional numba acceleration.

Kernels decorated with :func:`njit` are compiled by numba when it is
installed and ``SYMAPPROX_NUMBA`` is not set to ``0``; otherwise callers
dispatch to the vectorized numpy implementations.  The backend can also be
switched at runtime with :func:`set_backend` (used by the benchmark).
"""

import os

try:
    from numba import njit
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda f: f

_DISABLED = os.environ.get("SYMAPPROX_NUMBA", "1").strip().lower() in ("0", "false", "no", "off")
_backend = "numba" if (HAVE_NUMBA and not _DISABLED) else "numpy"


def backend() -> str:
    return _backend


def set_backend(name: str) -> None:
    global _backend
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not installed")
    _backend = name


__all__ = ["HAVE_NUMBA", "njit", "backend", "set_backend"]
