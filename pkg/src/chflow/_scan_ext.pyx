# cython: boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled backend for the directional exponential scans.

Same recurrence as chflow._scan_py, one multiply-add per node.  Compiled
with default (strict IEEE) flags so results stay bit-identical to the
pure-Python loop.
"""


def scan_pair(const double[::1] d, const double[::1] w,
              double[::1] lout, double[::1] rout):
    cdef Py_ssize_t n = w.shape[0]
    cdef Py_ssize_t i
    cdef double acc

    acc = w[0]
    lout[0] = acc
    for i in range(1, n):
        acc = d[i - 1] * acc + w[i]
        lout[i] = acc

    acc = w[n - 1]
    rout[n - 1] = acc
    for i in range(n - 2, -1, -1):
        acc = d[i] * acc + w[i]
        rout[i] = acc
