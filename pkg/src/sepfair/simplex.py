"""Dense exact-rational linear programming.

A small two-phase primal simplex over ``fractions.Fraction`` with Bland's
pivoting rule, which precludes cycling.  Problem sizes in this library are
tiny (a handful of variables and a few dozen rows), so a dense tableau is
the robust choice; no scaling, no tolerances, no floats.

``solve_lp`` maximizes ``c . x`` over free variables subject to
``A_ub x <= b_ub`` and ``A_eq x = b_eq``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence

ZERO = Fraction(0)
ONE = Fraction(1)

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass
class LPResult:
    status: str
    x: Optional[List[Fraction]]
    objective: Optional[Fraction]


def _pivot(tab: List[List[Fraction]], basis: List[int], row: int,
           col: int) -> None:
    piv = tab[row][col]
    inv = ONE / piv
    tab[row] = [a * inv for a in tab[row]]
    prow = tab[row]
    for i, r in enumerate(tab):
        if i == row:
            continue
        f = r[col]
        if f:
            tab[i] = [a - f * b for a, b in zip(r, prow)]
    basis[row] = col


def _run_simplex(tab: List[List[Fraction]], basis: List[int],
                 ncols: int) -> str:
    """Minimize the cost row tab[-1] (reduced form) with Bland's rule."""
    m = len(tab) - 1
    while True:
        cost = tab[-1]
        col = next((j for j in range(ncols) if cost[j] < 0), None)
        if col is None:
            return OPTIMAL
        row = None
        best = None
        for i in range(m):
            a = tab[i][col]
            if a > 0:
                ratio = tab[i][-1] / a
                if best is None or ratio < best or \
                        (ratio == best and basis[i] < basis[row]):
                    best, row = ratio, i
        if row is None:
            return UNBOUNDED
        _pivot(tab, basis, row, col)


def solve_lp(objective: Sequence[Fraction],
             a_ub: Sequence[Sequence[Fraction]],
             b_ub: Sequence[Fraction],
             a_eq: Sequence[Sequence[Fraction]] = (),
             b_eq: Sequence[Fraction] = ()) -> LPResult:
    """Maximize objective . x with free x, exact arithmetic throughout."""
    n = len(objective)
    rows: List[List[Fraction]] = []
    rhs: List[Fraction] = []
    senses: List[str] = []
    for r, b in zip(a_ub, b_ub):
        rows.append([Fraction(a) for a in r])
        rhs.append(Fraction(b))
        senses.append("<=")
    for r, b in zip(a_eq, b_eq):
        rows.append([Fraction(a) for a in r])
        rhs.append(Fraction(b))
        senses.append("=")
    m = len(rows)

    # Free variables are split x = u - w; one slack per inequality; one
    # artificial per row for a uniform phase-1 start.
    nslack = sum(1 for sn in senses if sn == "<=")
    width = 2 * n + nslack + m + 1
    tab: List[List[Fraction]] = []
    slack_at = 0
    for i in range(m):
        row = [ZERO] * width
        coeffs, b = rows[i], rhs[i]
        flip = b < 0
        for j in range(n):
            a = -coeffs[j] if flip else coeffs[j]
            row[2 * j] = a
            row[2 * j + 1] = -a
        if senses[i] == "<=":
            row[2 * n + slack_at] = -ONE if flip else ONE
            slack_at += 1
        row[2 * n + nslack + i] = ONE
        row[-1] = -b if flip else b
        tab.append(row)
    basis = [2 * n + nslack + i for i in range(m)]

    # Phase 1: minimize the sum of artificials (reduced cost row).
    cost = [ZERO] * width
    for i in range(m):
        for j in range(width):
            cost[j] -= tab[i][j]
    for i in range(m):
        cost[2 * n + nslack + i] += ONE
    tab.append(cost)
    status = _run_simplex(tab, basis, width - 1)
    if status != OPTIMAL or tab[-1][-1] < 0:
        return LPResult(INFEASIBLE, None, None)
    # Drive leftover zero-valued artificials out of the basis.
    art0 = 2 * n + nslack
    for i in range(m):
        if basis[i] >= art0:
            col = next((j for j in range(art0) if tab[i][j] != 0), None)
            if col is not None:
                _pivot(tab, basis, i, col)
            # else: redundant row; harmless to leave in place.

    # Phase 2: minimize -objective over structural columns only.
    cost = [ZERO] * width
    for j in range(n):
        cost[2 * j] = -Fraction(objective[j])
        cost[2 * j + 1] = Fraction(objective[j])
    for i in range(m):
        cb = cost[basis[i]]
        if cb:
            cost = [a - cb * b for a, b in zip(cost, tab[i])]
    # Forbid artificials from re-entering.
    tab[-1] = cost
    status = _run_simplex(tab, basis, art0)
    if status == UNBOUNDED:
        return LPResult(UNBOUNDED, None, None)
    xsplit = [ZERO] * (2 * n + nslack)
    for i in range(m):
        if basis[i] < len(xsplit):
            xsplit[basis[i]] = tab[i][-1]
    x = [xsplit[2 * j] - xsplit[2 * j + 1] for j in range(n)]
    value = sum(c * xi for c, xi in zip(objective, x))
    return LPResult(OPTIMAL, x, value)
