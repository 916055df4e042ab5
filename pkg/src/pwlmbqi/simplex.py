"""Exact LP over the rationals and integer branch-and-bound.

Constraints are rows ``(coeffs, bound)`` meaning ``coeffs . x <= bound`` over
free variables ``x``. Free variables are split as ``x = p - q`` with
``p, q >= 0``, which also makes the L1 norm a plain linear objective.

The tableau is kept fraction free: entries are integers scaled by a common
denominator ``D`` (the previous pivot), and every pivot divides exactly, as in
Bareiss elimination. Pivoting follows Bland's rule, so results are
deterministic.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
from math import floor

from .errors import ResourceOut

L1 = "l1"


@dataclass
class LPResult:
    status: str  # optimal | infeasible | unbounded
    x: list | None = None
    value: Fraction | None = None


def _check_deadline(deadline):
    if deadline is not None and time.monotonic() > deadline:
        raise ResourceOut("deadline reached")


class _Tableau:
    def __init__(self, rows, n):
        m = len(rows)
        self.m, self.n = m, n
        self.nstruct = 2 * n + m  # p, q, slacks
        art_rows = [i for i, (_, b) in enumerate(rows) if b < 0]
        self.art_start = self.nstruct
        self.ncols = self.nstruct + len(art_rows)
        w = self.ncols + 1
        self.T = []
        self.basis = []
        art_col = {i: self.art_start + k for k, i in enumerate(art_rows)}
        for i, (a, b) in enumerate(rows):
            row = [0] * w
            sign = -1 if b < 0 else 1
            for j, v in enumerate(a):
                if v:
                    row[j] = sign * v
                    row[n + j] = -sign * v
            row[2 * n + i] = sign
            row[-1] = sign * b
            if b < 0:
                row[art_col[i]] = 1
                self.basis.append(art_col[i])
            else:
                self.basis.append(2 * n + i)
            self.T.append(row)
        self.D = 1
        self.art_rows = art_rows

    def pivot(self, r, c):
        T, D = self.T, self.D
        prow = T[r]
        p = prow[c]
        for i, row in enumerate(T):
            if i == r:
                continue
            f = row[c]
            if f:
                T[i] = [(p * x - f * y) // D for x, y in zip(row, prow)]
            elif p != D:
                T[i] = [(p * x) // D for x in row]
        self.obj = None  # objective row lives in T[-1] when present
        self.D = p
        if p < 0:
            self.T = [[-x for x in row] for row in T]
            self.D = -p
        self.basis[r] = c if r < len(self.basis) else self.basis[r]

    def run(self, allowed, deadline):
        """Minimize with the objective row stored last. Returns 'optimal' or 'unbounded'."""
        T = self.T
        m = len(self.basis)
        while True:
            _check_deadline(deadline)
            T = self.T
            obj = T[-1]
            c = next((j for j in allowed if obj[j] < 0), None)
            if c is None:
                return "optimal"
            best = None
            for i in range(m):
                a = T[i][c]
                if a > 0:
                    rhs = T[i][-1]
                    if best is None:
                        best = (i, rhs, a)
                        continue
                    _, brhs, ba = best
                    lhs, rhs_ = rhs * ba, brhs * a
                    if lhs < rhs_ or (lhs == rhs_ and self.basis[i] < self.basis[best[0]]):
                        best = (i, rhs, a)
            if best is None:
                return "unbounded"
            self.pivot(best[0], c)

    def set_objective(self, cost):
        """Append a reduced-cost row for ``cost`` (list over columns)."""
        D = self.D
        obj = [D * c for c in cost] + [0]
        for i, bcol in enumerate(self.basis):
            cb = cost[bcol]
            if cb:
                row = self.T[i]
                obj = [o - cb * x for o, x in zip(obj, row)]
        self.T.append(obj)

    def drop_objective(self):
        self.T.pop()

    def values(self):
        vals = [Fraction(0)] * self.ncols
        for i, bcol in enumerate(self.basis):
            vals[bcol] = Fraction(self.T[i][-1], self.D)
        return vals


def solve_lp(rows, n, cost=None, deadline=None) -> LPResult:
    """Minimize ``cost`` subject to ``rows`` over free rational ``x``.

    ``cost`` is ``None`` (feasibility only), :data:`L1` for the L1 norm of
    ``x``, or a list of ``n`` integers for a linear objective.
    """
    rows = [(tuple(a), b) for a, b in rows]
    tab = _Tableau(rows, n)
    if tab.art_rows:
        phase1 = [0] * tab.ncols
        for j in range(tab.art_start, tab.ncols):
            phase1[j] = 1
        tab.set_objective(phase1)
        tab.run(range(tab.ncols), deadline)
        if tab.T[-1][-1] != 0:
            return LPResult("infeasible")
        tab.drop_objective()
        for i, bcol in enumerate(tab.basis):
            if bcol >= tab.art_start:
                row = tab.T[i]
                j = next((j for j in range(tab.nstruct) if row[j]), None)
                if j is not None:
                    tab.pivot(i, j)
    allowed = range(tab.nstruct)
    if cost is None:
        vals = tab.values()
        return LPResult("optimal", [vals[j] - vals[n + j] for j in range(n)], Fraction(0))
    full = [0] * tab.ncols
    for j in range(n):
        if cost == L1:
            full[j] = full[n + j] = 1
        else:
            full[j], full[n + j] = cost[j], -cost[j]
    tab.set_objective(full)
    status = tab.run(allowed, deadline)
    if status == "unbounded":
        return LPResult("unbounded")
    value = Fraction(-tab.T[-1][-1], tab.D)
    vals = tab.values()
    return LPResult("optimal", [vals[j] - vals[n + j] for j in range(n)], value)


def _unit(n, j, sign):
    a = [0] * n
    a[j] = sign
    return tuple(a)


def box_rows(n, bound):
    out = []
    for j in range(n):
        out.append((_unit(n, j, 1), bound))
        out.append((_unit(n, j, -1), bound))
    return out


@dataclass
class ILPResult:
    status: str  # sat | unsat | unknown
    x: list | None = None
    value: int | None = None
    nodes: int = 0


def branch_and_bound(rows, n, minimize_l1=True, box=None, deadline=None,
                     node_limit=20000, incumbent=None) -> ILPResult:
    """Depth-first branch-and-bound for integer ``x`` (lower branch first).

    With ``minimize_l1`` the first feasible point does not stop the search;
    branches whose relaxation cannot beat the incumbent are pruned.
    ``status == 'unsat'`` means no integer point exists inside ``box``.
    """
    base = list(rows)
    if box is not None:
        base += box_rows(n, box)
    best_x, best_v = (None, None)
    if incumbent is not None:
        best_x = list(incumbent)
        best_v = sum(abs(v) for v in best_x)
    stack = [()]
    nodes = 0
    cost = L1 if minimize_l1 else None
    while stack:
        nodes += 1
        if nodes > node_limit:
            return ILPResult("unknown", best_x, best_v, nodes)
        extra = stack.pop()
        res = solve_lp(base + list(extra), n, cost, deadline)
        if res.status != "optimal":
            continue
        if best_v is not None and minimize_l1 and -(-res.value // 1) >= best_v:
            continue
        j = next((j for j, v in enumerate(res.x) if v.denominator != 1), None)
        if j is None:
            x = [int(v) for v in res.x]
            if not minimize_l1:
                return ILPResult("sat", x, None, nodes)
            best_x, best_v = x, sum(abs(v) for v in x)
            continue
        f = floor(res.x[j])
        stack.append(extra + ((_unit(n, j, -1), -(f + 1)),))
        stack.append(extra + ((_unit(n, j, 1), f),))
    if best_x is None:
        return ILPResult("unsat", None, None, nodes)
    return ILPResult("sat", best_x, best_v, nodes)


def variable_bounds(rows, n, deadline=None):
    """Rational ``[lo, hi]`` per variable (``None`` when unbounded)."""
    out = []
    for j in range(n):
        lo = solve_lp(rows, n, list(_unit(n, j, 1)), deadline)
        hi = solve_lp(rows, n, list(_unit(n, j, -1)), deadline)
        out.append((lo.value if lo.status == "optimal" else None,
                    -hi.value if hi.status == "optimal" else None))
    return out


DEFAULT_BOXES = (8, 64, 1024)


def integer_feasible(rows, n, boxes=DEFAULT_BOXES, deadline=None, minimize_l1=True):
    """Decide integer feasibility of ``rows``; returns an :class:`ILPResult`.

    ``unsat`` is definitive: either the rational relaxation is empty or the
    relaxation is bounded and was searched exhaustively. ``unknown`` means no
    integer point was found inside the largest box of an unbounded relaxation.
    """
    rows = list(rows)
    if n == 0:
        ok = all(b >= 0 for _, b in rows)
        return ILPResult("sat" if ok else "unsat", [], 0)
    relax = solve_lp(rows, n, None, deadline)
    if relax.status != "optimal":
        return ILPResult("unsat")
    if all(v.denominator == 1 for v in relax.x) and not minimize_l1:
        return ILPResult("sat", [int(v) for v in relax.x])
    widest = max((abs(b) for _, b in rows), default=0)
    for B in boxes:
        res = branch_and_bound(rows, n, minimize_l1, max(B, widest), deadline)
        if res.status == "sat":
            return res
    bounds = variable_bounds(rows, n, deadline)
    if all(lo is not None and hi is not None for lo, hi in bounds):
        B = max(max(abs(floor(lo)), abs(floor(hi)) + 1) for lo, hi in bounds)
        res = branch_and_bound(rows, n, minimize_l1, B, deadline, node_limit=200000)
        if res.status != "unknown":
            return res
    return ILPResult("unknown")
