# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled LCS and Levenshtein kernels.

Same contract as ``_kernels_py``; sequences are interned to integer ids so the
inner loop runs on C arrays.
"""

from libc.stdlib cimport malloc, free


cdef long long* _encode(seq, dict ids) except NULL:
    cdef Py_ssize_t n = len(seq), i = 0
    cdef long long* out = <long long*> malloc((n + 1) * sizeof(long long))
    if out == NULL:
        raise MemoryError()
    for item in seq:
        code = ids.get(item)
        if code is None:
            code = len(ids)
            ids[item] = code
        out[i] = code
        i += 1
    return out


def lcs_length(a, b):
    """Length of the longest common subsequence of two sequences."""
    cdef Py_ssize_t n = len(a), m = len(b), i, j
    cdef long long *x
    cdef long long *y
    cdef Py_ssize_t *prev
    cdef Py_ssize_t *cur
    cdef Py_ssize_t *tmp
    cdef Py_ssize_t left, up, result
    if n == 0 or m == 0:
        return 0
    if n < m:
        a, b = b, a
        n, m = m, n
    ids = {}
    x = _encode(a, ids)
    y = _encode(b, ids)
    prev = <Py_ssize_t*> malloc((m + 1) * sizeof(Py_ssize_t))
    cur = <Py_ssize_t*> malloc((m + 1) * sizeof(Py_ssize_t))
    if prev == NULL or cur == NULL:
        free(x); free(y); free(prev); free(cur)
        raise MemoryError()
    for j in range(m + 1):
        prev[j] = 0
    cur[0] = 0
    for i in range(n):
        left = 0
        for j in range(m):
            if x[i] == y[j]:
                left = prev[j] + 1
            else:
                up = prev[j + 1]
                if up > left:
                    left = up
            cur[j + 1] = left
        tmp = prev
        prev = cur
        cur = tmp
    result = prev[m]
    free(x); free(y); free(prev); free(cur)
    return result


def levenshtein(str x, str y):
    """Unit-cost edit distance over code points."""
    cdef Py_ssize_t n = len(x), m = len(y), i, j, best, cand
    cdef Py_ssize_t *prev
    cdef Py_ssize_t *cur
    cdef Py_ssize_t *tmp
    cdef Py_UCS4 cx
    if n < m:
        x, y = y, x
        n, m = m, n
    if m == 0:
        return n
    prev = <Py_ssize_t*> malloc((m + 1) * sizeof(Py_ssize_t))
    cur = <Py_ssize_t*> malloc((m + 1) * sizeof(Py_ssize_t))
    if prev == NULL or cur == NULL:
        free(prev); free(cur)
        raise MemoryError()
    for j in range(m + 1):
        prev[j] = j
    for i in range(n):
        cx = x[i]
        cur[0] = i + 1
        for j in range(m):
            best = prev[j] + (0 if cx == y[j] else 1)
            cand = prev[j + 1] + 1
            if cand < best:
                best = cand
            cand = cur[j] + 1
            if cand < best:
                best = cand
            cur[j + 1] = best
        tmp = prev
        prev = cur
        cur = tmp
    best = prev[m]
    free(prev); free(cur)
    return best
