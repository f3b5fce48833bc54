"""Pure-numpy two-phase simplex kernel (fallback for the compiled version).

Solves   minimize c.x  subject to  A x = b,  x >= 0,  with b >= 0,
by textbook dense tableau pivoting under Bland's anti-cycling rule.
Maintained tableau rows drift under roundoff, so the tableau is rebuilt
from the current basis every ``REFACTOR_EVERY`` pivots and whenever the
maintained rows produce an impossible state (no entering column, or an
entering column with no blocking row); a verdict is only trusted on a
freshly refactorized tableau.  ``onticlab.feasopt._simplex_cy`` implements
the identical pivot sequence in Cython; keep both in sync.

Status codes: 0 optimal, 1 infeasible, 2 unbounded, 3 numerical failure
(singular basis after refactorization attempts, or iteration cap).  On
status 1 the returned ``y`` satisfies the Farkas conditions  y.A <= tol
and  y.b > feas_tol  for the standard-form system.
"""

from __future__ import annotations

import numpy as np

OPTIMAL = 0
INFEASIBLE = 1
UNBOUNDED = 2
FAILED = 3

# Reduced-cost tolerance sits between the pivot tolerance (1e-10) and the
# feasibility tolerance (1e-8) of the surrounding solver.
COST_TOL = 1e-9
TIE_TOL = 1e-12
REFACTOR_EVERY = 64


def _pivot(T, basis, in_basis, row, col):
    prow = T[row] / T[row, col]
    factors = T[:, col].copy()
    factors[row] = 0.0
    T -= np.outer(factors, prow)
    T[row] = prow
    # kill residual roundoff in the pivot column
    T[:, col] = 0.0
    T[row, col] = 1.0
    in_basis[basis[row]] = False
    basis[row] = col
    in_basis[col] = True


def _bland_entering(cost_row, allowed, in_basis):
    eligible = (cost_row[:-1] < -COST_TOL) & allowed & ~in_basis
    idx = np.flatnonzero(eligible)
    return int(idx[0]) if idx.size else -1


def _bland_leaving(T, basis, m, col, pivot_tol):
    best_t = np.inf
    best_row = -1
    best_label = -1
    for i in range(m):
        a = T[i, col]
        if a <= pivot_tol:
            continue
        t = max(T[i, -1], 0.0) / a
        if t < best_t - TIE_TOL:
            best_t, best_row, best_label = t, i, basis[i]
        elif t <= best_t + TIE_TOL and (best_row < 0 or basis[i] < best_label):
            best_t, best_row, best_label = min(t, best_t), i, basis[i]
    return best_row


def _refactorize(T, A_full, b, c1, c2, basis):
    """Rebuild the tableau and both cost rows from the current basis.

    Returns False when the basis matrix is numerically singular.
    """
    m = A_full.shape[0]
    B = A_full[:, basis]
    try:
        body = np.linalg.solve(B, np.column_stack([A_full, b]))
        y1 = np.linalg.solve(B.T, c1[basis])
        y2 = np.linalg.solve(B.T, c2[basis])
    except np.linalg.LinAlgError:
        return False
    if not np.all(np.isfinite(body)):
        return False
    T[:m, :-1] = body[:, :-1]
    T[:m, -1] = body[:, -1]
    T[m, :-1] = c1 - A_full.T @ y1
    T[m, -1] = -float(y1 @ b)
    T[m + 1, :-1] = c2 - A_full.T @ y2
    T[m + 1, -1] = -float(y2 @ b)
    # basis columns are exactly unit vectors
    for i in range(m):
        T[:, basis[i]] = 0.0
        T[i, basis[i]] = 1.0
    return True


def solve_standard_form(A, b, c, pivot_tol=1e-10, feas_tol=1e-8, max_iter=0):
    """Run the two-phase simplex; returns (status, x, y, niter)."""
    A = np.ascontiguousarray(A, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    c = np.ascontiguousarray(c, dtype=np.float64)
    m, n = A.shape
    if max_iter <= 0:
        max_iter = 2000 + 200 * (m + n)

    # tableau rows 0..m-1: [A | I | b]; row m: phase-1 costs; row m+1: phase-2
    T = np.zeros((m + 2, n + m + 1))
    T[:m, :n] = A
    T[:m, n:n + m] = np.eye(m)
    T[:m, -1] = b
    T[m, :n] = -A.sum(axis=0)
    T[m, -1] = -b.sum()
    T[m + 1, :n] = c

    A_full = np.column_stack([A, np.eye(m)]) if m else np.zeros((0, n))
    c1 = np.concatenate([np.zeros(n), np.ones(m)])
    c2 = np.concatenate([c, np.zeros(m)])
    basis = np.arange(n, n + m, dtype=np.int64)
    in_basis = np.zeros(n + m, dtype=bool)
    in_basis[n:] = True
    allowed = np.ones(n + m, dtype=bool)
    niter = 0
    fresh = True  # no pivots since the tableau was exact/refactorized

    def refactor():
        return m == 0 or _refactorize(T, A_full, b, c1, c2, basis)

    for phase, cost in ((1, m), (2, m + 1)):
        if phase == 2:
            if -T[m, -1] > feas_tol:
                y = 1.0 - T[m, n:n + m].copy()
                return INFEASIBLE, np.zeros(n), y, niter
            # pivot basic artificials onto structural columns where possible
            moved = False
            for i in range(m):
                if basis[i] >= n:
                    for j in range(n):
                        if not in_basis[j] and abs(T[i, j]) > pivot_tol:
                            _pivot(T, basis, in_basis, i, j)
                            niter += 1
                            moved = True
                            break
            allowed[n:] = False
            if moved:
                if not refactor():
                    return FAILED, np.zeros(n), np.zeros(m), niter
            fresh = True
        while True:
            if niter >= max_iter:
                return FAILED, np.zeros(n), np.zeros(m), niter
            col = _bland_entering(T[cost], allowed, in_basis)
            if col < 0:
                if fresh:
                    break  # phase optimum on a trusted tableau
                if not refactor():
                    return FAILED, np.zeros(n), np.zeros(m), niter
                fresh = True
                continue
            row = _bland_leaving(T, basis, m, col, pivot_tol)
            if row < 0:
                if fresh:
                    # a trusted tableau says the phase objective is unbounded
                    if phase == 1:  # impossible for sum of artificials
                        return FAILED, np.zeros(n), np.zeros(m), niter
                    return UNBOUNDED, np.zeros(n), np.zeros(m), niter
                if not refactor():
                    return FAILED, np.zeros(n), np.zeros(m), niter
                fresh = True
                continue
            if not np.isfinite(T[row, col]):
                return FAILED, np.zeros(n), np.zeros(m), niter
            _pivot(T, basis, in_basis, row, col)
            niter += 1
            fresh = False
            if niter % REFACTOR_EVERY == 0:
                if not refactor():
                    return FAILED, np.zeros(n), np.zeros(m), niter
                fresh = True

    x = np.zeros(n + m)
    x[basis] = T[:m, -1]
    if not np.all(np.isfinite(x)):
        return FAILED, np.zeros(n), np.zeros(m), niter
    return OPTIMAL, x[:n], np.zeros(m), niter
