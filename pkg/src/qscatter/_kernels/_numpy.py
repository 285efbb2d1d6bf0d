"""Pure-NumPy fallback kernels.

Same in-place contract as the compiled core; see the package docstring.
The register is viewed as an n-dimensional (2, 2, ..., 2) tensor so that
control conditions become basic slices (views, no copies except one
scratch buffer per call).
"""

import numpy as np


def apply_1q(amps, n, target, g00, g01, g10, g11):
    stride = 1 << (n - target)
    v = amps.reshape(-1, 2, stride)
    a0 = v[:, 0, :].copy()
    a1 = v[:, 1, :]
    v[:, 0, :] = g00 * a0 + g01 * a1
    v[:, 1, :] = g10 * a0 + g11 * a1


def apply_ctrl_1q(amps, n, target, cmask, cval, g00, g01, g10, g11):
    v = amps.reshape((2,) * n)
    sel = [slice(None)] * n
    for q in range(1, n + 1):
        if cmask & (1 << (n - q)):
            sel[q - 1] = (cval >> (n - q)) & 1
    s0 = list(sel)
    s0[target - 1] = 0
    s1 = list(sel)
    s1[target - 1] = 1
    s0 = tuple(s0)
    s1 = tuple(s1)
    a0 = v[s0].copy()
    a1 = v[s1]
    v[s0] = g00 * a0 + g01 * a1
    v[s1] = g10 * a0 + g11 * a1


def swap_pair(amps, n, q1, q2):
    v = amps.reshape((2,) * n)
    s01 = [slice(None)] * n
    s01[q1 - 1] = 0
    s01[q2 - 1] = 1
    s10 = [slice(None)] * n
    s10[q1 - 1] = 1
    s10[q2 - 1] = 0
    s01 = tuple(s01)
    s10 = tuple(s10)
    tmp = v[s01].copy()
    v[s01] = v[s10]
    v[s10] = tmp
