"""Backend selection for the compiled kernels.

Set ``WIGNER_DRIFT_NUMBA=0`` to force the pure-numpy path; numba is used
otherwise whenever it imports.
"""

import os

_flag = os.environ.get("WIGNER_DRIFT_NUMBA", "1").strip().lower()
_wanted = _flag not in ("0", "false", "no", "off")

try:
    if not _wanted:
        raise ImportError
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda f: f


def default_backend() -> str:
    return "numba" if HAVE_NUMBA else "numpy"
