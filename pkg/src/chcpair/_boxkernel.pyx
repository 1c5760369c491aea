# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled box enumeration kernel (see _boxkernel_py for the contract).

Works on int64; the caller guarantees coefficients and box values are small
enough that partial sums cannot overflow (the selector in boxes.py checks).
"""

from libc.stdlib cimport free, malloc


OP_LE = 0
OP_EQ = 1
OP_NE = 2


def solve_box(matrix, consts, ops, int nrows, int nvars, long long lo, long long hi, fixed, long long limit):
    if nrows == 0 and nvars == 0:
        return [()]

    cdef long long *mat = NULL
    cdef long long *psum = NULL
    cdef long long *minrem = NULL
    cdef long long *maxrem = NULL
    cdef long long *los = NULL
    cdef long long *his = NULL
    cdef long long *val = NULL
    cdef int *cops = NULL
    cdef int r, v, level
    cdef long long c, a, b, x, smin, smax
    cdef int ok
    out = []

    mat = <long long *> malloc((nrows * nvars if nrows * nvars else 1) * sizeof(long long))
    psum = <long long *> malloc((nrows if nrows else 1) * sizeof(long long))
    minrem = <long long *> malloc((nrows if nrows else 1) * (nvars + 1) * sizeof(long long))
    maxrem = <long long *> malloc((nrows if nrows else 1) * (nvars + 1) * sizeof(long long))
    los = <long long *> malloc((nvars if nvars else 1) * sizeof(long long))
    his = <long long *> malloc((nvars if nvars else 1) * sizeof(long long))
    val = <long long *> malloc((nvars if nvars else 1) * sizeof(long long))
    cops = <int *> malloc((nrows if nrows else 1) * sizeof(int))

    try:
        if mat == NULL or psum == NULL or minrem == NULL or maxrem == NULL or \
                los == NULL or his == NULL or val == NULL or cops == NULL:
            raise MemoryError()
        for r in range(nrows):
            psum[r] = consts[r]
            cops[r] = ops[r]
            for v in range(nvars):
                mat[r * nvars + v] = matrix[r * nvars + v]
        for v in range(nvars):
            if fixed[v] is None:
                los[v] = lo
                his[v] = hi
            else:
                los[v] = fixed[v]
                his[v] = fixed[v]
            if los[v] > his[v]:
                return []
        for r in range(nrows):
            minrem[r * (nvars + 1) + nvars] = 0
            maxrem[r * (nvars + 1) + nvars] = 0
            for v in range(nvars - 1, -1, -1):
                c = mat[r * nvars + v]
                a = c * los[v]
                b = c * his[v]
                minrem[r * (nvars + 1) + v] = minrem[r * (nvars + 1) + v + 1] + (a if a < b else b)
                maxrem[r * (nvars + 1) + v] = maxrem[r * (nvars + 1) + v + 1] + (b if b > a else a)

        # iterative depth-first enumeration
        level = 0
        for v in range(nvars):
            val[v] = los[v] - 1
        while level >= 0:
            if level == nvars:
                ok = 1
                for r in range(nrows):
                    smin = psum[r]
                    if cops[r] == OP_LE:
                        if smin > 0:
                            ok = 0
                            break
                    elif cops[r] == OP_EQ:
                        if smin != 0:
                            ok = 0
                            break
                    else:
                        if smin == 0:
                            ok = 0
                            break
                if ok:
                    out.append(tuple([val[v] for v in range(nvars)]))
                    if <long long> len(out) >= limit:
                        break
                level -= 1
                if level >= 0:
                    for r in range(nrows):
                        psum[r] -= mat[r * nvars + level] * val[level]
                continue
            # advance value at this level
            x = val[level] + 1
            if x > his[level]:
                val[level] = los[level] - 1
                level -= 1
                if level >= 0:
                    for r in range(nrows):
                        psum[r] -= mat[r * nvars + level] * val[level]
                continue
            val[level] = x
            for r in range(nrows):
                psum[r] += mat[r * nvars + level] * x
            ok = 1
            for r in range(nrows):
                smin = psum[r] + minrem[r * (nvars + 1) + level + 1]
                smax = psum[r] + maxrem[r * (nvars + 1) + level + 1]
                if cops[r] == OP_LE:
                    if smin > 0:
                        ok = 0
                        break
                elif cops[r] == OP_EQ:
                    if smin > 0 or smax < 0:
                        ok = 0
                        break
            if ok:
                level += 1
            else:
                for r in range(nrows):
                    psum[r] -= mat[r * nvars + level] * x
        return out
    finally:
        free(<void *> mat)
        free(<void *> psum)
        free(<void *> minrem)
        free(<void *> maxrem)
        free(<void *> los)
        free(<void *> his)
        free(<void *> val)
        free(<void *> cops)
