"""Kernel backend selection.

The compiled extension and the numpy fallback implement the same two entry
points (simulate_range, search_protocols) with bitwise-identical results.
Preference order: an explicit argument, then the TANDEMBIT_BACKEND
environment variable, then compiled if the extension built, else python.
"""

from __future__ import annotations

import os

__all__ = ["available_backends", "get_kernels", "default_backend_name"]

_ENV_VAR = "TANDEMBIT_BACKEND"


def available_backends() -> tuple[str, ...]:
    names = []
    try:
        from . import _kernels  # noqa: F401

        names.append("compiled")
    except ImportError:
        pass
    names.append("python")
    return tuple(names)


def get_kernels(name: str | None = None):
    """Return the kernel module for ``name`` (or the environment default)."""
    if name is None:
        name = os.environ.get(_ENV_VAR) or None
    if name is None:
        try:
            from . import _kernels

            return _kernels
        except ImportError:
            from . import _kernels_py

            return _kernels_py
    if name == "python":
        from . import _kernels_py

        return _kernels_py
    if name == "compiled":
        try:
            from . import _kernels
        except ImportError as exc:
            raise ImportError(
                "compiled kernel backend requested but the extension is not built"
            ) from exc
        return _kernels
    raise ValueError(f"unknown backend {name!r}; expected 'compiled' or 'python'")


def default_backend_name() -> str:
    return get_kernels().BACKEND_NAME
