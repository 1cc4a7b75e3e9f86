# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled versions of the hot series kernels.

Same contracts as ``_kernels_py``.  Keys are arbitrary-size Python ints and
coefficients are exact rationals, so the gain comes from C-level loops and
direct dict API calls rather than from unboxed arithmetic.
"""
from cpython.dict cimport PyDict_GetItem, PyDict_SetItem
from cpython.ref cimport PyObject


def mul_buckets(list abuck, list bbuck, long lo, long hi, object off):
    cdef dict out = {}
    cdef Py_ssize_t i, j, na, nb
    cdef long da, db, s
    cdef list akeys, acoeffs, bkeys, bcoeffs
    cdef object ca, base, k
    cdef PyObject *prev
    for abk in abuck:
        da = abk[0]
        if da > hi:
            break
        akeys = list(abk[1])
        acoeffs = list(abk[2])
        na = len(akeys)
        for bbk in bbuck:
            db = bbk[0]
            s = da + db
            if s > hi:
                break
            if s < lo:
                continue
            bkeys = list(bbk[1])
            bcoeffs = list(bbk[2])
            nb = len(bkeys)
            for i in range(na):
                ca = acoeffs[i]
                base = akeys[i] - off
                for j in range(nb):
                    k = base + bkeys[j]
                    prev = PyDict_GetItem(out, k)
                    if prev is NULL:
                        PyDict_SetItem(out, k, ca * bcoeffs[j])
                    else:
                        PyDict_SetItem(out, k, <object>prev + ca * bcoeffs[j])
    return out


def diff_slot(dict terms, object shift, object mask):
    cdef dict out = {}
    # shift may exceed 64: keep the arithmetic on Python ints
    cdef object step = (<object>1) << shift
    cdef object k, c, e
    for k, c in terms.items():
        e = (k >> shift) & mask
        if e:
            out[k - step] = c * e
    return out


def axpy(dict acc, dict terms, object scale):
    """acc += scale * terms, in place."""
    cdef object k, c
    cdef PyObject *prev
    cdef bint unit = scale == 1
    for k, c in terms.items():
        if not unit:
            c = c * scale
        prev = PyDict_GetItem(acc, k)
        if prev is NULL:
            PyDict_SetItem(acc, k, c)
        else:
            PyDict_SetItem(acc, k, <object>prev + c)
    return acc
