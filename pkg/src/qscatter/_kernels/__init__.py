"""Amplitude-update kernels.

Two interchangeable implementations of the same contract: a Cython
extension (``_core``) and a pure-NumPy fallback (``_numpy``).  The compiled
module is preferred when it imported cleanly; set ``QSCATTER_KERNELS`` to
``python`` or ``compiled`` to force a choice.

Kernel contract (all operate in place on a contiguous complex128 array of
2**n amplitudes, qubit 1 = most significant index bit):

    apply_1q(amps, n, target, g00, g01, g10, g11)
    apply_ctrl_1q(amps, n, target, cmask, cval, g00, g01, g10, g11)
    swap_pair(amps, n, q1, q2)

``cmask``/``cval`` select basis states by index bits: the 2x2 update runs
only where ``index & cmask == cval``.  The mask must not cover the target
bit.
"""

import os

from . import _numpy

try:
    from . import _core
except ImportError:  # extension not built; fall back silently
    _core = None


def available_backends():
    """Names of the kernel backends usable in this process."""
    names = []
    if _core is not None:
        names.append("compiled")
    names.append("python")
    return names


def get_backend(name="auto"):
    """Return the kernel module for ``name`` (auto, compiled, python)."""
    if name == "auto":
        name = os.environ.get("QSCATTER_KERNELS", "auto")
    if name == "auto":
        return _core if _core is not None else _numpy
    if name in ("compiled", "cython"):
        if _core is None:
            raise ImportError(
                "compiled kernels requested but the extension is not built"
            )
        return _core
    if name in ("python", "numpy"):
        return _numpy
    raise ValueError(f"unknown kernel backend {name!r}")


active = get_backend()


def backend_name():
    """Which backend the simulator is actually using."""
    return "compiled" if active is _core else "python"
