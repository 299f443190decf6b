# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled assignment-scan kernel.

Same contract as plift._satscan_py; see plift.satscan for the bytecode
format and bit convention.  The caller validates bytecode (single result,
stack bounded by MAX_STACK, variable indices in range) before dispatching
here, so the hot loops run unchecked.
"""

from libc.stdint cimport uint8_t, uint64_t


cdef inline int _eval(const uint8_t[::1] code, int n_vars, uint64_t mask) nogil:
    cdef int stack[64]
    cdef int sp = 0
    cdef Py_ssize_t i
    cdef uint8_t op
    cdef Py_ssize_t n = code.shape[0]
    for i in range(0, n, 2):
        op = code[i]
        if op == 0:  # VAR
            stack[sp] = (mask >> (n_vars - 1 - code[i + 1])) & 1
            sp += 1
        elif op == 1:  # NOT
            stack[sp - 1] ^= 1
        elif op == 2:  # AND
            sp -= 1
            stack[sp - 1] = stack[sp - 1] & stack[sp]
        elif op == 3:  # OR
            sp -= 1
            stack[sp - 1] = stack[sp - 1] | stack[sp]
        elif op == 4:  # TRUE
            stack[sp] = 1
            sp += 1
        else:  # FALSE
            stack[sp] = 0
            sp += 1
    return stack[0]


def eval_mask(bytes code, int n_vars, object mask):
    cdef const uint8_t[::1] view = code
    return _eval(view, n_vars, <uint64_t> mask)


def scan_all(bytes code, int n_vars):
    cdef const uint8_t[::1] view = code
    cdef uint64_t total = (<uint64_t> 1) << n_vars
    cdef uint64_t m
    out = []
    for m in range(total):
        if _eval(view, n_vars, m):
            out.append(m)
    return out


def find_first(bytes code, int n_vars):
    cdef const uint8_t[::1] view = code
    cdef uint64_t total = (<uint64_t> 1) << n_vars
    cdef uint64_t m
    cdef long long found = -1
    with nogil:
        for m in range(total):
            if _eval(view, n_vars, m):
                found = <long long> m
                break
    return found


def count_all(bytes code, int n_vars):
    cdef const uint8_t[::1] view = code
    cdef uint64_t total = (<uint64_t> 1) << n_vars
    cdef uint64_t m
    cdef uint64_t count = 0
    with nogil:
        for m in range(total):
            count += _eval(view, n_vars, m)
    return count
