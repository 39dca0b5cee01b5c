"""Kernel backend selection.

The hot loops in :mod:`discreg.kernels` exist twice: a numba ``@njit``
version and a plain numpy version.  Which one the public API dispatches
to is read from the ``DISCREG_BACKEND`` environment variable on each
call:

``DISCREG_BACKEND=numba`` (default)
    use the jitted kernels, falling back to numpy if numba is missing.
``DISCREG_BACKEND=numpy``
    force the pure-numpy path.
"""

import os

try:
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    NUMBA_AVAILABLE = False

    def njit(*args, **kwargs):
        def decorator(func):
            return func

        if len(args) == 1 and callable(args[0]):
            return args[0]
        return decorator


ENV_VAR = "DISCREG_BACKEND"


def requested_backend() -> str:
    value = os.environ.get(ENV_VAR, "numba").strip().lower()
    if value not in ("numba", "numpy"):
        raise ValueError(f"{ENV_VAR} must be 'numba' or 'numpy', got {value!r}")
    return value


def active_backend() -> str:
    """Name of the backend the public API will use."""
    if requested_backend() == "numba" and NUMBA_AVAILABLE:
        return "numba"
    return "numpy"
