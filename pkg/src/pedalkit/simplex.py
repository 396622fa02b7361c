"""Exact two-phase simplex over Fractions, with Bland's anti-cycling rule.

Solves ``min (or max) c.x  s.t.  A_ub x <= b_ub,  A_eq x = b_eq,  x >= 0``.
Problems here are small (a handful of merged valuation classes), so a dense
tableau is fine.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

__all__ = ["LPResult", "linprog_exact"]


@dataclass(frozen=True)
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    value: Fraction = None
    x: tuple = None


class _Tableau:
    def __init__(self, rows, rhs, basis):
        self.rows = rows
        self.rhs = rhs
        self.basis = basis

    def pivot(self, r, c, obj):
        row, piv = self.rows[r], self.rows[r][c]
        if piv != 1:
            self.rows[r] = row = [a / piv for a in row]
            self.rhs[r] /= piv
        for i, other in enumerate(self.rows):
            if i != r and other[c]:
                f = other[c]
                self.rows[i] = [a - f * b for a, b in zip(other, row)]
                self.rhs[i] -= f * self.rhs[r]
        cost, val = obj
        if cost[c]:
            f = cost[c]
            obj[0] = [a - f * b for a, b in zip(cost, row)]
            obj[1] = val - f * self.rhs[r]
        self.basis[r] = c

    def run(self, obj, allowed):
        """Minimize; ``obj = [reduced costs, -value]``.  Returns False if unbounded."""
        while True:
            enter = next((j for j in allowed if obj[0][j] < 0), None)
            if enter is None:
                return True
            best = None
            for i, row in enumerate(self.rows):
                if row[enter] > 0:
                    ratio = self.rhs[i] / row[enter]
                    key = (ratio, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return False
            self.pivot(best[1], enter, obj)


def _reduced(cost, tab):
    """Objective row with basic columns priced out."""
    cost = list(cost)
    val = Fraction(0)
    for i, b in enumerate(tab.basis):
        f = cost[b]
        if f:
            cost = [a - f * r for a, r in zip(cost, tab.rows[i])]
            val -= f * tab.rhs[i]
    return [cost, val]


def linprog_exact(c, A_ub=(), b_ub=(), A_eq=(), b_eq=(), maximize=False) -> LPResult:
    c = [Fraction(v) for v in c]
    n = len(c)
    A_ub, A_eq = list(A_ub), list(A_eq)
    n_slack = len(A_ub)
    rows, rhs = [], []
    for k, (a, b) in enumerate(zip(A_ub, b_ub)):
        row = [Fraction(v) for v in a] + [Fraction(0)] * n_slack
        row[n + k] = Fraction(1)
        rows.append(row)
        rhs.append(Fraction(b))
    for a, b in zip(A_eq, b_eq):
        rows.append([Fraction(v) for v in a] + [Fraction(0)] * n_slack)
        rhs.append(Fraction(b))
    for i in range(len(rows)):
        if rhs[i] < 0:
            rows[i] = [-v for v in rows[i]]
            rhs[i] = -rhs[i]
    m, width = len(rows), n + n_slack
    # one artificial per row keeps phase 1 uniform
    for i, row in enumerate(rows):
        row.extend(Fraction(int(i == k)) for k in range(m))
    tab = _Tableau(rows, rhs, [width + i for i in range(m)])
    total = width + m

    phase1 = _reduced([Fraction(0)] * width + [Fraction(1)] * m, tab)
    tab.run(phase1, range(total))
    if phase1[1] != 0:
        return LPResult("infeasible")

    # drive artificials out of the basis, dropping redundant rows
    i = 0
    while i < len(tab.rows):
        if tab.basis[i] >= width:
            col = next((j for j in range(width) if tab.rows[i][j] != 0), None)
            if col is None:
                del tab.rows[i], tab.rhs[i], tab.basis[i]
                continue
            tab.pivot(i, col, phase1)
        i += 1

    sign = -1 if maximize else 1
    phase2 = _reduced([sign * v for v in c] + [Fraction(0)] * (n_slack + m), tab)
    if not tab.run(phase2, range(width)):
        return LPResult("unbounded")
    x = [Fraction(0)] * n
    for i, b in enumerate(tab.basis):
        if b < n:
            x[b] = tab.rhs[i]
    value = sum((a * b for a, b in zip(c, x)), Fraction(0))
    return LPResult("optimal", value, tuple(x))
