"""Runtime switches read from the environment."""

import os

#: Set ``MESOCOLONY_DISABLE_NUMBA=1`` to force the pure-numpy kernels.
USE_NUMBA = os.environ.get("MESOCOLONY_DISABLE_NUMBA", "0").lower() not in ("1", "true", "yes")

if USE_NUMBA:
    try:
        import numba  # noqa: F401
    except ImportError:  # pragma: no cover
        USE_NUMBA = False
