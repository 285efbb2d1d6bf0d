# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled amplitude-update kernels.

Same in-place contract as the NumPy fallback; see the package docstring.
Loops are serial and element-order deterministic, so results are bitwise
reproducible run to run.
"""


def apply_1q(double complex[::1] amps, int n, int target,
             double complex g00, double complex g01,
             double complex g10, double complex g11):
    cdef Py_ssize_t stride = (<Py_ssize_t> 1) << (n - target)
    cdef Py_ssize_t block = stride << 1
    cdef Py_ssize_t n_blocks = amps.shape[0] // block
    cdef Py_ssize_t ib, off, i0, i1
    cdef double complex a0, a1
    with nogil:
        for ib in range(n_blocks):
            for off in range(stride):
                i0 = ib * block + off
                i1 = i0 + stride
                a0 = amps[i0]
                a1 = amps[i1]
                amps[i0] = g00 * a0 + g01 * a1
                amps[i1] = g10 * a0 + g11 * a1


def apply_ctrl_1q(double complex[::1] amps, int n, int target,
                  unsigned long long cmask, unsigned long long cval,
                  double complex g00, double complex g01,
                  double complex g10, double complex g11):
    cdef Py_ssize_t stride = (<Py_ssize_t> 1) << (n - target)
    cdef Py_ssize_t block = stride << 1
    cdef Py_ssize_t n_blocks = amps.shape[0] // block
    cdef Py_ssize_t ib, off, i0, i1
    cdef double complex a0, a1
    with nogil:
        for ib in range(n_blocks):
            for off in range(stride):
                i0 = ib * block + off
                if ((<unsigned long long> i0) & cmask) == cval:
                    i1 = i0 + stride
                    a0 = amps[i0]
                    a1 = amps[i1]
                    amps[i0] = g00 * a0 + g01 * a1
                    amps[i1] = g10 * a0 + g11 * a1


def swap_pair(double complex[::1] amps, int n, int q1, int q2):
    cdef Py_ssize_t b1 = (<Py_ssize_t> 1) << (n - q1)
    cdef Py_ssize_t b2 = (<Py_ssize_t> 1) << (n - q2)
    cdef Py_ssize_t size = amps.shape[0]
    cdef Py_ssize_t i, j
    cdef double complex tmp
    with nogil:
        for i in range(size):
            if (i & b1) != 0 and (i & b2) == 0:
                j = (i ^ b1) | b2
                tmp = amps[i]
                amps[i] = amps[j]
                amps[j] = tmp
