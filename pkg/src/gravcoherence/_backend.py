"""Kernel selection.

The compiled extension is preferred. Set ``GRAVCOHERENCE_BACKEND=python`` to
force the numpy fallback (useful for debugging and for the benchmark).
"""
import os

from . import _pykernels

python_kernels = _pykernels

try:
    from . import _kernels as compiled_kernels
except ImportError:  # extension not built
    compiled_kernels = None

if compiled_kernels is not None and os.environ.get("GRAVCOHERENCE_BACKEND", "").lower() != "python":
    kernels = compiled_kernels
    BACKEND = "cython"
else:
    kernels = python_kernels
    BACKEND = "python"


def available_backends():
    names = ["python"]
    if compiled_kernels is not None:
        names.insert(0, "cython")
    return names


def get_kernels(name=None):
    if name is None:
        return kernels
    if name == "python":
        return python_kernels
    if name == "cython":
        if compiled_kernels is None:
            raise ImportError("compiled kernels are not built")
        return compiled_kernels
    raise ValueError(f"unknown backend {name!r}")
