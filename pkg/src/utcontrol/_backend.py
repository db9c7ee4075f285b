"""Kernel backend selection: compiled extension when available, pure Python otherwise.

The default is chosen at import time; UTCONTROL_BACKEND=python|compiled in the
environment overrides it, and set_backend() switches at runtime (used by the
backend benchmark and parity tests).  Both backends implement the same
floating-point expressions, so results agree bit for bit.
"""

from __future__ import annotations

import os

from . import _kernels_py

try:
    from . import _kernels as _kernels_c
except ImportError:
    _kernels_c = None

_BACKENDS = {"python": _kernels_py}
if _kernels_c is not None:
    _BACKENDS["compiled"] = _kernels_c


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_BACKENDS))


def _initial() -> str:
    requested = os.environ.get("UTCONTROL_BACKEND", "").strip().lower()
    if requested:
        if requested not in _BACKENDS:
            raise ImportError(
                f"UTCONTROL_BACKEND={requested!r} but only {available_backends()} are available"
            )
        return requested
    return "compiled" if _kernels_c is not None else "python"


_active_name = _initial()


def set_backend(name: str) -> None:
    global _active_name
    if name not in _BACKENDS:
        raise ValueError(f"unknown backend {name!r}; available: {available_backends()}")
    _active_name = name


def backend_name() -> str:
    return _active_name


def active():
    """The currently selected kernel module."""
    return _BACKENDS[_active_name]
