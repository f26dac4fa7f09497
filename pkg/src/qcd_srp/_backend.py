"""Kernel backend selection.

The compiled extension is preferred; the NumPy/pure-Python fallback is used
when the extension is missing or when ``QCD_SRP_FORCE_FALLBACK`` is set to a
non-empty value other than ``0``.  Modules access kernels late-bound through
``_backend.kernels`` so tests and benchmarks can swap the backend.
"""

import os


def load(name):
    """Return the kernel module for backend ``name`` ('compiled'/'python')."""
    if name == "python":
        from . import _kernels_py
        return _kernels_py
    if name == "compiled":
        from . import _kernels  # type: ignore[attr-defined]
        return _kernels
    raise ValueError(f"unknown backend {name!r}")


def _select():
    if os.environ.get("QCD_SRP_FORCE_FALLBACK", "").strip() not in ("", "0"):
        return load("python")
    try:
        return load("compiled")
    except ImportError:
        return load("python")


kernels = _select()


def backend_name():
    return kernels.BACKEND_NAME
