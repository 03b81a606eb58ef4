"""Backend selection for the hot loops.

The compiled Cython module is used when it was built; otherwise the numpy
fallback is imported. Set ``BRAGG_BACKFLOW_PURE_PYTHON=1`` to force the
fallback (the test-suite and the benchmark do this to compare both).

The blur is the exception: numpy's ``convolve`` is itself a tuned C routine
with SIMD dispatch and beats the portable compiled loop (see
``benchmarks/bench_kernels.py``), so the default dispatch always uses it.
The compiled blur stays available through ``backend_module("cython")``.
"""
import os

from . import _fallback

if os.environ.get("BRAGG_BACKFLOW_PURE_PYTHON") == "1":
    _impl = _fallback
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _fallback
        BACKEND = "python"

potential_phase = _impl.potential_phase
potential_decay = _impl.potential_decay
probability_current = _impl.probability_current
gaussian_blur = _fallback.gaussian_blur


def compiled_available():
    try:
        from . import _kernels  # noqa: F401
    except ImportError:
        return False
    return True


def backend_module(name):
    """Return the kernel module for ``name`` ('cython' or 'python')."""
    if name == "python":
        return _fallback
    if name == "cython":
        from . import _kernels
        return _kernels
    raise ValueError(f"unknown kernel backend {name!r}")
