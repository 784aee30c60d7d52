"""Kernel backend selection.

The hot numeric loops come in two implementations: numba ``@njit`` kernels and
pure-numpy fallbacks.  The environment variable ``COVREG_NUMBA`` picks the
path at import time:

* unset or ``auto`` - use numba when it is importable,
* ``1``/``true``/``on`` - require numba (raise if missing),
* ``0``/``false``/``off`` - force the pure-numpy fallbacks.
"""

from __future__ import annotations

import os

ENV_FLAG = "COVREG_NUMBA"

try:
    import numba  # noqa: F401

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False


def use_numba() -> bool:
    flag = os.environ.get(ENV_FLAG, "auto").strip().lower()
    if flag in ("", "auto"):
        return HAVE_NUMBA
    if flag in ("1", "true", "yes", "on"):
        if not HAVE_NUMBA:
            raise RuntimeError(f"{ENV_FLAG}={flag} but numba is not importable")
        return True
    if flag in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"unrecognized {ENV_FLAG} value {flag!r}")
