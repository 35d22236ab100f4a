"""Exact rational Gaussian elimination on small dense systems."""

from __future__ import annotations

from fractions import Fraction

__all__ = ["SingularSystemError", "solve", "inverse", "left_null_vector", "rank", "matmul"]


class SingularSystemError(ArithmeticError):
    pass


def _height(x: Fraction) -> int:
    return abs(x.numerator) * x.denominator


def _rref(rows: list, ncols: int):
    """Row-reduce in place; returns pivot columns. Pivot = smallest-height nonzero entry."""
    pivots = []
    r = 0
    nrows = len(rows)
    for col in range(ncols):
        candidates = [i for i in range(r, nrows) if rows[i][col]]
        if not candidates:
            continue
        best = min(candidates, key=lambda i: _height(rows[i][col]))
        rows[r], rows[best] = rows[best], rows[r]
        piv = rows[r][col]
        rows[r] = [x / piv for x in rows[r]]
        prow = rows[r]
        for i in range(nrows):
            if i != r and rows[i][col]:
                f = rows[i][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], prow)]
        pivots.append(col)
        r += 1
        if r == nrows:
            break
    return pivots


def solve(a, b) -> list:
    """Solve a x = b for a (possibly overdetermined) consistent system with full column rank.

    Raises SingularSystemError when the columns are dependent or the system
    is inconsistent.
    """
    ncols = len(a[0])
    rows = [[Fraction(x) for x in row] + [Fraction(rhs)] for row, rhs in zip(a, b)]
    pivots = _rref(rows, ncols)
    if pivots != list(range(ncols)):
        raise SingularSystemError("coefficient matrix is rank deficient")
    for row in rows[ncols:]:
        if row[-1]:
            raise SingularSystemError("inconsistent system")
    return [rows[i][-1] for i in range(ncols)]


def inverse(a) -> list:
    n = len(a)
    rows = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    pivots = _rref(rows, n)
    if len(pivots) != n:
        raise SingularSystemError("matrix is singular")
    return [row[n:] for row in rows]


def rank(a) -> int:
    if not a:
        return 0
    rows = [[Fraction(x) for x in row] for row in a]
    return len(_rref(rows, len(rows[0])))


def left_null_vector(a) -> list:
    """A nonzero v with v a = 0, for a square matrix of corank one."""
    n = len(a)
    at = [[Fraction(a[j][i]) for j in range(n)] for i in range(n)]
    pivots = _rref(at, n)
    free = [c for c in range(n) if c not in pivots]
    if len(free) != 1:
        raise SingularSystemError(f"expected a one-dimensional null space, found dimension {len(free)}")
    f = free[0]
    v = [Fraction(0)] * n
    v[f] = Fraction(1)
    for row_i, col in enumerate(pivots):
        v[col] = -at[row_i][f]
    return v


def matmul(a, b) -> list:
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]
