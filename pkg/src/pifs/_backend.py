"""Backend selection for the hot loops.

Set ``PIFS_BACKEND=numpy`` in the environment to bypass numba entirely; the
default ``auto`` uses numba when it imports cleanly.
"""

import os

try:
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - numba is a hard dependency in CI
    NUMBA_AVAILABLE = False

    def njit(*args, **kwargs):
        def decorator(func):
            return func

        if len(args) == 1 and callable(args[0]):
            return args[0]
        return decorator


_requested = os.environ.get("PIFS_BACKEND", "auto").strip().lower()
if _requested not in ("auto", "numba", "numpy"):
    raise ValueError(f"PIFS_BACKEND must be auto, numba or numpy, got {_requested!r}")

if _requested == "numpy" or not NUMBA_AVAILABLE:
    DEFAULT_BACKEND = "numpy"
else:
    DEFAULT_BACKEND = "numba"
