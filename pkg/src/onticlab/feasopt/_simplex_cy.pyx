# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled two-phase simplex kernel.

Pivot-for-pivot identical to ``_simplex_py.solve_standard_form``: same
Bland entering rule, same ratio test and tie-breaking, same tableau
updates and the same refactorization schedule (numpy solves on the same
matrices).  The pure-Python module is the reference; keep both in sync.
"""

import numpy as np

cimport cython
from libc.math cimport INFINITY, isfinite

OPTIMAL = 0
INFEASIBLE = 1
UNBOUNDED = 2
FAILED = 3

cdef double COST_TOL = 1e-9
cdef double TIE_TOL = 1e-12
cdef long REFACTOR_EVERY = 64


cdef void _pivot(double[:, ::1] T, long[::1] basis, unsigned char[::1] in_basis,
                 Py_ssize_t row, Py_ssize_t col) noexcept nogil:
    cdef Py_ssize_t nrows = T.shape[0]
    cdef Py_ssize_t ncols = T.shape[1]
    cdef double piv = T[row, col]
    cdef Py_ssize_t i, k
    cdef double f
    for k in range(ncols):
        T[row, k] /= piv
    for i in range(nrows):
        if i == row:
            continue
        f = T[i, col]
        if f != 0.0:
            for k in range(ncols):
                T[i, k] -= f * T[row, k]
    for i in range(nrows):
        T[i, col] = 0.0
    T[row, col] = 1.0
    in_basis[basis[row]] = 0
    basis[row] = col
    in_basis[col] = 1


cdef Py_ssize_t _bland_entering(double[:, ::1] T, Py_ssize_t cost,
                                unsigned char[::1] allowed,
                                unsigned char[::1] in_basis) noexcept nogil:
    cdef Py_ssize_t ncols = T.shape[1] - 1
    cdef Py_ssize_t j
    for j in range(ncols):
        if allowed[j] and not in_basis[j] and T[cost, j] < -COST_TOL:
            return j
    return -1


cdef Py_ssize_t _bland_leaving(double[:, ::1] T, long[::1] basis, Py_ssize_t m,
                               Py_ssize_t col, double pivot_tol) noexcept nogil:
    cdef double best_t = INFINITY
    cdef Py_ssize_t best_row = -1
    cdef long best_label = -1
    cdef Py_ssize_t i
    cdef Py_ssize_t last = T.shape[1] - 1
    cdef double a, rhs, t
    for i in range(m):
        a = T[i, col]
        if a <= pivot_tol:
            continue
        rhs = T[i, last]
        if rhs < 0.0:
            rhs = 0.0
        t = rhs / a
        if t < best_t - TIE_TOL:
            best_t = t
            best_row = i
            best_label = basis[i]
        elif t <= best_t + TIE_TOL and (best_row < 0 or basis[i] < best_label):
            if t < best_t:
                best_t = t
            best_row = i
            best_label = basis[i]
    return best_row


def _refactorize(T_arr, A_full, b_arr, c1, c2, basis_arr):
    """Rebuild the tableau and both cost rows from the current basis."""
    m = A_full.shape[0]
    B = A_full[:, basis_arr]
    try:
        body = np.linalg.solve(B, np.column_stack([A_full, b_arr]))
        y1 = np.linalg.solve(B.T, c1[basis_arr])
        y2 = np.linalg.solve(B.T, c2[basis_arr])
    except np.linalg.LinAlgError:
        return False
    if not np.all(np.isfinite(body)):
        return False
    T_arr[:m, :-1] = body[:, :-1]
    T_arr[:m, -1] = body[:, -1]
    T_arr[m, :-1] = c1 - A_full.T @ y1
    T_arr[m, -1] = -float(y1 @ b_arr)
    T_arr[m + 1, :-1] = c2 - A_full.T @ y2
    T_arr[m + 1, -1] = -float(y2 @ b_arr)
    for i in range(m):
        T_arr[:, basis_arr[i]] = 0.0
        T_arr[i, basis_arr[i]] = 1.0
    return True


def solve_standard_form(A, b, c, double pivot_tol=1e-10, double feas_tol=1e-8,
                        long max_iter=0):
    """Run the two-phase simplex; returns (status, x, y, niter)."""
    A_arr = np.ascontiguousarray(A, dtype=np.float64)
    b_arr = np.ascontiguousarray(b, dtype=np.float64)
    c_arr = np.ascontiguousarray(c, dtype=np.float64)
    cdef Py_ssize_t m = A_arr.shape[0]
    cdef Py_ssize_t n = A_arr.shape[1]
    if max_iter <= 0:
        max_iter = 2000 + 200 * (m + n)

    T_arr = np.zeros((m + 2, n + m + 1))
    T_arr[:m, :n] = A_arr
    if m:
        T_arr[:m, n:n + m] = np.eye(m)
        T_arr[:m, -1] = b_arr
    T_arr[m, :n] = -A_arr.sum(axis=0)
    T_arr[m, -1] = -b_arr.sum()
    T_arr[m + 1, :n] = c_arr

    A_full = np.column_stack([A_arr, np.eye(m)]) if m else np.zeros((0, n))
    c1 = np.concatenate([np.zeros(n), np.ones(m)])
    c2 = np.concatenate([c_arr, np.zeros(m)])
    basis_arr = np.arange(n, n + m, dtype=np.int64)
    in_basis_arr = np.zeros(n + m, dtype=np.uint8)
    in_basis_arr[n:] = 1
    allowed_arr = np.ones(n + m, dtype=np.uint8)

    cdef double[:, ::1] T = T_arr
    cdef long[::1] basis = basis_arr
    cdef unsigned char[::1] in_basis = in_basis_arr
    cdef unsigned char[::1] allowed = allowed_arr

    cdef long niter = 0
    cdef Py_ssize_t cost, col, row, i, j
    cdef int phase
    cdef bint fresh = 1
    cdef bint moved

    for phase in range(1, 3):
        cost = m if phase == 1 else m + 1
        if phase == 2:
            if -T[m, n + m] > feas_tol:
                y = 1.0 - T_arr[m, n:n + m].copy()
                return INFEASIBLE, np.zeros(n), y, niter
            moved = 0
            for i in range(m):
                if basis[i] >= n:
                    for j in range(n):
                        if not in_basis[j] and (T[i, j] > pivot_tol or T[i, j] < -pivot_tol):
                            _pivot(T, basis, in_basis, i, j)
                            niter += 1
                            moved = 1
                            break
            for j in range(n, n + m):
                allowed[j] = 0
            if moved:
                if m and not _refactorize(T_arr, A_full, b_arr, c1, c2, basis_arr):
                    return FAILED, np.zeros(n), np.zeros(m), niter
            fresh = 1
        while True:
            if niter >= max_iter:
                return FAILED, np.zeros(n), np.zeros(m), niter
            col = _bland_entering(T, cost, allowed, in_basis)
            if col < 0:
                if fresh:
                    break
                if m and not _refactorize(T_arr, A_full, b_arr, c1, c2, basis_arr):
                    return FAILED, np.zeros(n), np.zeros(m), niter
                fresh = 1
                continue
            row = _bland_leaving(T, basis, m, col, pivot_tol)
            if row < 0:
                if fresh:
                    if phase == 1:
                        return FAILED, np.zeros(n), np.zeros(m), niter
                    return UNBOUNDED, np.zeros(n), np.zeros(m), niter
                if m and not _refactorize(T_arr, A_full, b_arr, c1, c2, basis_arr):
                    return FAILED, np.zeros(n), np.zeros(m), niter
                fresh = 1
                continue
            if not isfinite(T[row, col]):
                return FAILED, np.zeros(n), np.zeros(m), niter
            _pivot(T, basis, in_basis, row, col)
            niter += 1
            fresh = 0
            if niter % REFACTOR_EVERY == 0:
                if m and not _refactorize(T_arr, A_full, b_arr, c1, c2, basis_arr):
                    return FAILED, np.zeros(n), np.zeros(m), niter
                fresh = 1

    x = np.zeros(n + m)
    x[basis_arr] = T_arr[:m, -1]
    if not np.all(np.isfinite(x)):
        return FAILED, np.zeros(n), np.zeros(m), niter
    return OPTIMAL, x[:n], np.zeros(m), niter
