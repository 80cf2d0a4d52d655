"""Backend selection for the RK4 hot loop.

The compiled extension ``herdlab._ckernels`` is used when it imports;
otherwise, or when the environment variable ``HERDLAB_PURE_PYTHON`` is set
to a non-empty value other than ``0``, the pure-Python twin is used.
"""

from __future__ import annotations

import os

from . import _pykernels

COMPLETED = _pykernels.COMPLETED
CONVERGED = _pykernels.CONVERGED
SINGULAR = _pykernels.SINGULAR
ESCAPED = _pykernels.ESCAPED

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

_BACKENDS = {"python": _pykernels.rk4_uv}
if _ckernels is not None:
    _BACKENDS["cython"] = _ckernels.rk4_uv

if _ckernels is not None and os.environ.get("HERDLAB_PURE_PYTHON", "") in ("", "0"):
    BACKEND = "cython"
else:
    BACKEND = "python"


def available_backends() -> list[str]:
    return sorted(_BACKENDS)


def get_kernel(backend: str | None = None):
    """Return the ``rk4_uv`` implementation for ``backend`` (default: active one)."""
    name = BACKEND if backend is None else backend
    try:
        return _BACKENDS[name]
    except KeyError:
        raise ValueError(
            f"backend {name!r} unavailable; choose from {available_backends()}"
        ) from None
