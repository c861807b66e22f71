"""Gibbs kernel backend selection.

The compiled extension is preferred; the pure-Python kernel is the fallback.
Both produce bit-identical chains, so the choice affects speed only. Set
REPUTEX_GIBBS_BACKEND=python to force the fallback (used by the benchmark
and the parity tests).
"""

from __future__ import annotations

import os

from . import _gibbs_py

try:
    from . import _gibbs_cy
except ImportError:
    _gibbs_cy = None

_BACKENDS = {"python": _gibbs_py}
if _gibbs_cy is not None:
    _BACKENDS["cython"] = _gibbs_cy


def get_backend(name: str):
    """Return the kernel module for an explicit backend name."""
    try:
        return _BACKENDS[name]
    except KeyError:
        raise ValueError(
            f"unknown or unavailable backend {name!r}; available: {sorted(_BACKENDS)}"
        ) from None


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_BACKENDS))


_forced = os.environ.get("REPUTEX_GIBBS_BACKEND")
if _forced:
    BACKEND_NAME = _forced
    _selected = get_backend(_forced)
elif _gibbs_cy is not None:
    BACKEND_NAME = "cython"
    _selected = _gibbs_cy
else:
    BACKEND_NAME = "python"
    _selected = _gibbs_py

sweep = _selected.sweep
