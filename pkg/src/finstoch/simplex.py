"""Exact rational simplex: two-phase, dense tableau, Bland's rule.

Bland's rule guarantees termination, and Fraction arithmetic keeps every
pivot exact, so optima are returned as the rationals they are.  Problem
sizes here are tiny (tens of variables), so no effort is spent on
sparsity.
"""

from fractions import Fraction

from .errors import SpecError

__all__ = ["solve_min", "solve_max", "gaussian_solve"]

ZERO = Fraction(0)
ONE = Fraction(1)


def _pivot(tableau, cost, basis, row, col):
    pivot_val = tableau[row][col]
    tableau[row] = [v / pivot_val for v in tableau[row]]
    for i, r in enumerate(tableau):
        if i != row and r[col] != 0:
            factor = r[col]
            tableau[i] = [a - factor * b for a, b in zip(r, tableau[row])]
    if cost[col] != 0:
        factor = cost[col]
        cost[:] = [a - factor * b for a, b in zip(cost, tableau[row])]
    basis[row] = col


def _bland(tableau, cost, basis, n_cols):
    """Pivot to optimality; entering column is the lowest negative index."""
    while True:
        enter = next((j for j in range(n_cols) if cost[j] < 0), None)
        if enter is None:
            return
        best_row, best_ratio = None, None
        for i, r in enumerate(tableau):
            if r[enter] > 0:
                ratio = r[-1] / r[enter]
                if (
                    best_ratio is None
                    or ratio < best_ratio
                    or (ratio == best_ratio and basis[i] < basis[best_row])
                ):
                    best_row, best_ratio = i, ratio
        if best_row is None:
            raise SpecError("linear program is unbounded")
        _pivot(tableau, cost, basis, best_row, enter)


def solve_min(c, a_rows, b, basis=None):
    """Minimize c.x subject to A x = b, x >= 0; returns (value, x).

    Infeasible systems raise; unbounded ones raise.  All data must be
    Fraction-compatible.  A known feasible basis (one column index per
    row, forming an identity with nonnegative rhs) skips phase 1.
    """
    m = len(a_rows)
    n = len(c)
    tableau = []
    rhs = []
    for row, bi in zip(a_rows, b):
        row = [Fraction(v) for v in row]
        bi = Fraction(bi)
        if bi < 0:
            row = [-v for v in row]
            bi = -bi
        tableau.append(row)
        rhs.append(bi)
    if basis is not None:
        full = [tableau[i] + [rhs[i]] for i in range(m)]
        basis = list(basis)
        c = [Fraction(v) for v in c]
        cost = c[:] + [ZERO]
        for i, bvar in enumerate(basis):
            if cost[bvar] != 0:
                factor = cost[bvar]
                cost = [a - factor * b2 for a, b2 in zip(cost, full[i])]
        _bland(full, cost, basis, n)
        x = [ZERO] * n
        for i, bvar in enumerate(basis):
            x[bvar] = full[i][-1]
        value = sum((ci * xi for ci, xi in zip(c, x)), ZERO)
        return value, x
    # phase 1: artificial columns n..n+m-1
    full = []
    for i in range(m):
        art = [ONE if j == i else ZERO for j in range(m)]
        full.append(tableau[i] + art + [rhs[i]])
    basis = [n + i for i in range(m)]
    cost = [ZERO] * (n + m + 1)
    for i in range(m):
        cost = [a - b2 for a, b2 in zip(cost, full[i])]
    # artificial columns start basic with zero reduced cost
    for i in range(m):
        cost[n + i] = ZERO
    _bland(full, cost, basis, n + m)
    if -cost[-1] != 0:
        raise SpecError("linear program is infeasible")
    # drive remaining artificials out of the basis or drop redundant rows
    keep = []
    for i in range(len(full)):
        if basis[i] >= n:
            col = next((j for j in range(n) if full[i][j] != 0), None)
            if col is None:
                continue  # redundant constraint
            _pivot(full, cost, basis, i, col)
        keep.append(i)
    # drop the artificial columns entirely; none is basic now
    full = [full[i][:n] + [full[i][-1]] for i in keep]
    basis = [basis[i] for i in keep]
    # phase 2 on the original costs
    c = [Fraction(v) for v in c]
    cost = c[:] + [ZERO]
    for i, bvar in enumerate(basis):
        if cost[bvar] != 0:
            factor = cost[bvar]
            cost = [a - factor * b2 for a, b2 in zip(cost, full[i])]
    _bland(full, cost, basis, n)
    x = [ZERO] * n
    for i, bvar in enumerate(basis):
        if bvar < n:
            x[bvar] = full[i][-1]
    value = sum((ci * xi for ci, xi in zip(c, x)), ZERO)
    return value, x


def solve_max(c, a_rows, b, basis=None):
    value, x = solve_min([-Fraction(v) for v in c], a_rows, b, basis=basis)
    return -value, x


def gaussian_solve(a_rows, b):
    """Solve a square rational system exactly; None when singular."""
    n = len(a_rows)
    aug = [
        [Fraction(v) for v in row] + [Fraction(bi)]
        for row, bi in zip(a_rows, b)
    ]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            return None
        aug[col], aug[pivot] = aug[pivot], aug[col]
        pv = aug[col][col]
        aug[col] = [v / pv for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                factor = aug[r][col]
                aug[r] = [a - factor * b2 for a, b2 in zip(aug[r], aug[col])]
    return [aug[r][-1] for r in range(n)]
