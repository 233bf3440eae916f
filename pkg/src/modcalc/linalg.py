"""Square matrices of ScalarFunctions: determinant, inverse, adjugate.

Matrices are lists of rows.  Elimination is exact, so "singular" means the
determinant is the zero rational function.  Pivots are chosen to keep
intermediate expressions small: constants first, then short entries.
"""

from __future__ import annotations

from modcalc.errors import SingularMatrix


def identity(chart, n):
    return [[chart.one() if i == j else chart.zero() for j in range(n)] for i in range(n)]


def zeros(chart, rows, cols):
    return [[chart.zero() for _ in range(cols)] for _ in range(rows)]


def matmul(a, b):
    if not a or not b:
        return []
    inner = len(b)
    out = []
    for row in a:
        new = []
        for j in range(len(b[0])):
            acc = row[0].chart.zero()
            for k in range(inner):
                if row[k].is_zero() or b[k][j].is_zero():
                    continue
                acc = acc + row[k] * b[k][j]
            new.append(acc)
        out.append(new)
    return out


def transpose(a):
    return [list(col) for col in zip(*a)]


def neg(a):
    return [[-v for v in row] for row in a]


def sub(a, b):
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def _pivot_row(m, col, start):
    """Row index of a usable pivot, preferring constants, then small numerators."""
    best, size = None, None
    for r in range(start, len(m)):
        v = m[r][col]
        if v.is_zero():
            continue
        if v.is_constant():
            return r
        n = len(v.num) + len(v.den)
        if best is None or n < size:
            best, size = r, n
    return best


def determinant(a):
    n = len(a)
    if n == 0:
        raise ValueError("determinant of an empty matrix")
    m = [list(row) for row in a]
    det = m[0][0].chart.one()
    for k in range(n):
        r = _pivot_row(m, k, k)
        if r is None:
            return m[0][0].chart.zero()
        if r != k:
            m[k], m[r] = m[r], m[k]
            det = -det
        piv = m[k][k]
        det = det * piv
        inv = piv.inverse()
        for i in range(k + 1, n):
            f = m[i][k]
            if f.is_zero():
                continue
            f = f * inv
            m[i] = [m[i][j] if m[k][j].is_zero() else m[i][j] - f * m[k][j] for j in range(n)]
    return det


def solve(a, rhs):
    """X with A X = rhs (rhs is a list of rows); raises SingularMatrix."""
    n = len(a)
    if n == 0:
        return []
    m = [list(ra) + list(rb) for ra, rb in zip(a, rhs)]
    width = len(m[0])
    for k in range(n):
        r = _pivot_row(m, k, k)
        if r is None:
            raise SingularMatrix("matrix is singular (determinant is identically zero)")
        m[k], m[r] = m[r], m[k]
        inv = m[k][k].inverse()
        m[k] = [v * inv for v in m[k]]
        for i in range(n):
            f = m[i][k]
            if i == k or f.is_zero():
                continue
            m[i] = [m[i][j] if m[k][j].is_zero() else m[i][j] - f * m[k][j] for j in range(width)]
    return [row[n:] for row in m]


def inverse(a):
    """Exact inverse; raises SingularMatrix when the determinant vanishes identically."""
    n = len(a)
    if n == 0:
        return []
    return solve(a, identity(a[0][0].chart, n))


def adjugate(a):
    """adj(A) = det(A) * A^-1, falling back to cofactors when A is singular."""
    n = len(a)
    det = determinant(a)
    if not det.is_zero():
        return [[det * v for v in row] for row in inverse(a)]
    chart = a[0][0].chart
    if n == 1:
        return [[chart.one()]]
    out = zeros(chart, n, n)
    for i in range(n):
        for j in range(n):
            minor = [[a[r][c] for c in range(n) if c != j] for r in range(n) if r != i]
            cof = determinant(minor)
            out[j][i] = -cof if (i + j) % 2 else cof
    return out
