"""Selects the kernel backend for the batched KAN forward/backward.

Two interchangeable implementations exist: the Cython extension
``kanprobe._kernels`` (built at install time, optional) and the pure-numpy
module ``kanprobe.kernels_numpy``.  Import prefers the compiled one.  Set
``KANPROBE_BACKEND=compiled|numpy`` to force a choice, or call
:func:`set_backend` at runtime (used by the tests and the benchmark).
"""

from __future__ import annotations

import os

from . import kernels_numpy

_BACKENDS = {"numpy": kernels_numpy}

try:
    from . import _kernels

    _BACKENDS["compiled"] = _kernels
except ImportError:
    pass


def available() -> tuple[str, ...]:
    """Backend names usable in this installation."""
    return tuple(sorted(_BACKENDS))


def _initial() -> str:
    env = os.environ.get("KANPROBE_BACKEND", "auto").strip().lower()
    if env in ("", "auto"):
        return "compiled" if "compiled" in _BACKENDS else "numpy"
    if env not in _BACKENDS:
        raise ImportError(
            f"KANPROBE_BACKEND={env!r} is not available; choices: {available()}"
        )
    return env


_active = _initial()


def active() -> str:
    """Name of the backend currently in use."""
    return _active


def set_backend(name: str) -> None:
    """Switch kernel backends at runtime."""
    global _active
    if name not in _BACKENDS:
        raise ValueError(f"unknown backend {name!r}; choices: {available()}")
    _active = name


def get_kernels():
    """The module providing fourier_forward/backward and spline_forward/backward."""
    return _BACKENDS[_active]
