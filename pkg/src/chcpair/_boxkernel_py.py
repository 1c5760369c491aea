"""Pure-Python box enumeration kernel.

Enumerates integer assignments inside a box that satisfy a system of
linear rows. A row is sum(coeff*var) + const OP 0 with OP one of
<= (op 0), == (op 1), != (op 2). Same interface as the compiled kernel.
"""

OP_LE = 0
OP_EQ = 1
OP_NE = 2


def solve_box(matrix, consts, ops, nrows, nvars, lo, hi, fixed, limit):
    """Return up to `limit` satisfying assignments as a list of tuples.

    matrix is row-major (nrows x nvars); fixed is a length-nvars list with
    an int to pin a variable or None to enumerate it over [lo, hi].
    Enumeration order is lexicographic in variable index, ascending values.
    """
    if nrows == 0 and nvars == 0:
        return [()]
    los = [lo if fixed[v] is None else fixed[v] for v in range(nvars)]
    his = [hi if fixed[v] is None else fixed[v] for v in range(nvars)]
    for v in range(nvars):
        if los[v] > his[v]:
            return []

    # suffix min/max contribution of vars >= v for each row
    minrem = [[0] * (nvars + 1) for _ in range(nrows)]
    maxrem = [[0] * (nvars + 1) for _ in range(nrows)]
    for r in range(nrows):
        for v in range(nvars - 1, -1, -1):
            c = matrix[r * nvars + v]
            a, b = c * los[v], c * his[v]
            minrem[r][v] = minrem[r][v + 1] + min(a, b)
            maxrem[r][v] = maxrem[r][v + 1] + max(a, b)

    out = []
    psum = list(consts)
    val = [0] * nvars

    def feasible(level):
        for r in range(nrows):
            op = ops[r]
            s_min = psum[r] + minrem[r][level]
            s_max = psum[r] + maxrem[r][level]
            if op == OP_LE:
                if s_min > 0:
                    return False
            elif op == OP_EQ:
                if s_min > 0 or s_max < 0:
                    return False
            else:  # OP_NE: only decidable once ground
                if level == nvars and s_min == 0:
                    return False
        return True

    def rec(v):
        if len(out) >= limit:
            return
        if v == nvars:
            if feasible(nvars):
                out.append(tuple(val))
            return
        for x in range(los[v], his[v] + 1):
            val[v] = x
            for r in range(nrows):
                psum[r] += matrix[r * nvars + v] * x
            if feasible(v + 1):
                rec(v + 1)
            for r in range(nrows):
                psum[r] -= matrix[r * nvars + v] * x
            if len(out) >= limit:
                return

    if feasible(0):
        rec(0)
    return out
