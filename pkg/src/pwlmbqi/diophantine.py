"""Incremental systems of linear Diophantine equations ``a.y + c = v``.

A system is a persistent value: :meth:`EquationSystem.push` returns a new
system and leaves the receiver untouched, which is what greedy segment
construction needs when a point does not fit.

Integer solvability is decided by column-style Hermite reduction: unimodular
column operations bring the (independent) rows to lower-triangular form, after
which forward substitution with divisibility checks is exact. Row echelon form
alone is not enough over the integers (``2*y1 + 3*y2 = 1`` is solvable, yet
zeroing the free ``y2`` gives no solution).
"""
from __future__ import annotations

from fractions import Fraction


def solve_integer_system(rows, rhs, ncols):
    """Return an integer solution of ``rows @ x = rhs`` or ``None``.

    Non-pivot coordinates of the reduced system are set to zero; columns are
    processed left to right so earlier unknowns are preferred as pivots.
    """
    A = [list(r) for r in rows]
    U = [[int(i == j) for j in range(ncols)] for i in range(ncols)]
    k = 0
    pivots = []  # (row index, pivot column)

    def colop_sub(dst, src, q):
        for row in A:
            row[dst] -= q * row[src]
        for row in U:
            row[dst] -= q * row[src]

    def colswap(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in U:
            row[i], row[j] = row[j], row[i]

    for i, row in enumerate(A):
        if k == ncols:
            break
        while True:
            nz = [j for j in range(k, ncols) if row[j] != 0]
            if not nz:
                break
            j = min(nz, key=lambda j: (abs(row[j]), j))
            if j != k:
                colswap(j, k)
            done = True
            for j2 in range(k + 1, ncols):
                if row[j2]:
                    colop_sub(j2, k, row[j2] // row[k])
                    if row[j2]:
                        done = False
            if done:
                break
        if row[k] if k < ncols else 0:
            if row[k] < 0:
                for r in A:
                    r[k] = -r[k]
                for r in U:
                    r[k] = -r[k]
            pivots.append((i, k))
            k += 1

    z = [0] * ncols
    pivot_of = dict(pivots)
    for i, row in enumerate(A):
        acc = sum(row[j] * z[j] for j in range(ncols) if z[j])
        if i in pivot_of:
            p = pivot_of[i]
            q, r = divmod(rhs[i] - acc, row[p])
            if r:
                return None
            z[p] = q
        elif acc != rhs[i]:
            return None
    return [sum(U[r][j] * z[j] for j in range(ncols)) for r in range(ncols)]


class EquationSystem:
    """Rows ``(a, v)`` meaning ``a . y + c == v`` over integer unknowns ``y, c``."""

    __slots__ = ("n", "rows", "_echelon", "_basis", "_inconsistent", "_solution")

    def __init__(self, n: int):
        self.n = n
        self.rows = ()
        self._echelon = ()  # (pivot column, Fraction row, Fraction rhs)
        self._basis = ()  # independent integer rows over (c, y1..yn)
        self._inconsistent = False
        self._solution = None

    def push(self, a, v) -> "EquationSystem":
        a = tuple(int(x) for x in a)
        if len(a) != self.n:
            raise ValueError(f"row has arity {len(a)}, system has {self.n}")
        new = EquationSystem.__new__(EquationSystem)
        new.n = self.n
        new.rows = self.rows + ((a, int(v)),)
        new._basis = self._basis
        new._echelon = self._echelon
        new._inconsistent = self._inconsistent
        new._solution = None
        if new._inconsistent:
            return new
        coeffs = (1,) + a
        r = [Fraction(x) for x in coeffs]
        rv = Fraction(v)
        for pc, er, erv in self._echelon:
            f = r[pc]
            if f:
                r = [x - f * y for x, y in zip(r, er)]
                rv -= f * erv
        pc = next((j for j, x in enumerate(r) if x), None)
        if pc is None:
            if rv:
                new._inconsistent = True
            else:
                new._solution = self._solution
            return new
        piv = r[pc]
        new._echelon = self._echelon + ((pc, [x / piv for x in r], rv / piv),)
        new._basis = self._basis + ((coeffs, int(v)),)
        return new

    def _solve(self):
        if self._inconsistent:
            return None
        if self._solution is None:
            sol = solve_integer_system([r for r, _ in self._basis],
                                       [v for _, v in self._basis], self.n + 1)
            self._solution = sol if sol is not None else False
        return self._solution or None

    def is_sat(self) -> bool:
        return self._solve() is not None

    def solve(self):
        """Return ``(slopes, intercept)`` satisfying every row."""
        sol = self._solve()
        if sol is None:
            raise ValueError("system has no integer solution")
        return tuple(sol[1:]), sol[0]

    def __len__(self):
        return len(self.rows)

    def __repr__(self):
        return f"EquationSystem(n={self.n}, rows={self.rows!r})"


def push_equation(sys: EquationSystem, a, v) -> EquationSystem:
    return sys.push(a, v)


def is_sat(sys: EquationSystem) -> bool:
    return sys.is_sat()


def solve(sys: EquationSystem):
    return sys.solve()
