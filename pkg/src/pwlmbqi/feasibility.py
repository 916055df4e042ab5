"""Separating-halfspace systems: rows ``a.y >= c`` (positive) or ``a.y < c`` (negative).

Unknowns are the slopes ``y`` and the threshold ``c``. Strict rows are stored
as ``a.y - c <= -1``, which is exact over the integers.

Every row is either homogeneous (``>= 0``) or has right-hand side ``-1``, so a
rational solution scaled by any factor ``t >= 1`` stays a solution. Scaling by
the common denominator gives an integer point, which makes the rational
relaxation an exact integer feasibility test. Witnesses come from the L1-optimal
relaxation vertex: the smallest multiple (up to a bound) whose rounding
satisfies every row, else the vertex scaled by its common denominator, in
both cases divided by the gcd of the entries.
"""
from __future__ import annotations

from fractions import Fraction
from math import floor, gcd, lcm

from .simplex import L1, solve_lp


class InequalitySystem:
    __slots__ = ("n", "rows", "_lp_rows", "_witness", "_sat")

    rounding_tries = 256

    def __init__(self, n: int):
        self.n = n
        self.rows = ()
        self._lp_rows = ()
        self._witness = [Fraction(0)] * (n + 1)
        self._sat = True

    def push(self, a, positive: bool) -> "InequalitySystem":
        a = tuple(int(x) for x in a)
        if len(a) != self.n:
            raise ValueError(f"row has arity {len(a)}, system has {self.n}")
        if positive:
            lp_row = (tuple(-x for x in a) + (1,), 0)
        else:
            lp_row = (a + (-1,), -1)
        new = InequalitySystem.__new__(InequalitySystem)
        new.n = self.n
        new.rows = self.rows + ((a, bool(positive)),)
        new._lp_rows = self._lp_rows + (lp_row,)
        new._sat = None
        new._witness = None
        if self._sat and self._witness is not None:
            coeffs, bound = lp_row
            if sum(k * w for k, w in zip(coeffs, self._witness)) <= bound:
                new._sat = True
                new._witness = self._witness
        elif self._sat is False:
            new._sat = False
        return new

    def is_sat(self, deadline=None) -> bool:
        if self._sat is None:
            res = solve_lp(self._lp_rows, self.n + 1, None, deadline)
            self._sat = res.status == "optimal"
            self._witness = res.x
        return self._sat

    def solve(self, deadline=None):
        """Return an integer ``(slopes, threshold)`` satisfying every row."""
        if not self.is_sat(deadline):
            raise ValueError("system is infeasible")
        n1 = self.n + 1
        relax = solve_lp(self._lp_rows, n1, L1, deadline)
        scale = lcm(*(v.denominator for v in relax.x)) if relax.x else 1
        x = None
        for k in range(1, min(scale, self.rounding_tries) + 1):
            cand = [floor(v * k + Fraction(1, 2)) for v in relax.x]
            if self._satisfies(cand):
                x = cand
                break
        if x is None:
            x = [int(v * scale) for v in relax.x]
        g = gcd(*x)
        if g > 1:
            # rows stay satisfied: strict rows are integral and still negative
            x = [v // g for v in x]
        return tuple(x[:-1]), x[-1]

    def _satisfies(self, x):
        return all(sum(k * v for k, v in zip(a, x)) <= b for a, b in self._lp_rows)

    def __len__(self):
        return len(self.rows)

    def __repr__(self):
        return f"InequalitySystem(n={self.n}, rows={self.rows!r})"


def push_ineq(sys: InequalitySystem, a, positive: bool) -> InequalitySystem:
    return sys.push(a, positive)


def is_sat(sys: InequalitySystem) -> bool:
    return sys.is_sat()


def solve(sys: InequalitySystem):
    return sys.solve()
