# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled backtracking kernel; same contract as ``rigidsat._pysearch``."""

from libc.stdlib cimport malloc, free


def extend_maps(pattern, host, pcolor, hcolor, order, fixed, long long limit=0):
    cdef Py_ssize_t n = len(pattern)
    cdef Py_ssize_t N = len(host)
    if n == 0:
        return [()]
    if n > N:
        return []
    cdef long long *P = <long long *> malloc(n * n * sizeof(long long))
    cdef long long *H = <long long *> malloc(N * N * sizeof(long long))
    cdef int *ordv = <int *> malloc(n * sizeof(int))
    cdef int *image = <int *> malloc(n * sizeof(int))
    cdef int *ptr = <int *> malloc(n * sizeof(int))
    cdef char *used = <char *> malloc(N * sizeof(char))
    # candidate lists, flattened: cand[depth * N + c]
    cdef int *cand = <int *> malloc(n * N * sizeof(int))
    cdef int *ncand = <int *> malloc(n * sizeof(int))
    if not (P and H and ordv and image and ptr and used and cand and ncand):
        free(P); free(H); free(ordv); free(image); free(ptr); free(used)
        free(cand); free(ncand)
        raise MemoryError()
    cdef Py_ssize_t a, b, t, depth, i, j, h, c
    cdef long long pc
    cdef bint ok, found
    out = []
    try:
        for a in range(n):
            row = pattern[a]
            for b in range(n):
                P[a * n + b] = row[b]
        for a in range(N):
            row = host[a]
            for b in range(N):
                H[a * N + b] = row[b]
            used[a] = 0
        for t in range(n):
            ordv[t] = order[t]
            ptr[t] = 0
            image[t] = -1
        for t in range(n):
            i = ordv[t]
            pc = pcolor[i]
            c = 0
            if fixed[i] >= 0:
                h = fixed[i]
                if hcolor[h] == pc:
                    cand[t * N] = h
                    c = 1
            else:
                for h in range(N):
                    if hcolor[h] == pc:
                        cand[t * N + c] = h
                        c += 1
            ncand[t] = c
        depth = 0
        while depth >= 0:
            i = ordv[depth]
            if image[i] >= 0:
                used[image[i]] = 0
                image[i] = -1
            found = False
            while ptr[depth] < ncand[depth]:
                h = cand[depth * N + ptr[depth]]
                ptr[depth] += 1
                if used[h]:
                    continue
                if P[i * n + i] != H[h * N + h]:
                    continue
                ok = True
                for t in range(depth):
                    j = ordv[t]
                    if P[i * n + j] != H[h * N + image[j]]:
                        ok = False
                        break
                if ok:
                    found = True
                    image[i] = h
                    used[h] = 1
                    break
            if not found:
                ptr[depth] = 0
                depth -= 1
                continue
            if depth == n - 1:
                out.append(tuple([image[a] for a in range(n)]))
                if limit and len(out) >= limit:
                    return out
                continue
            depth += 1
        return out
    finally:
        free(P); free(H); free(ordv); free(image); free(ptr); free(used)
        free(cand); free(ncand)
