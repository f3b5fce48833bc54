"""Dense linear programs with Farkas certificates.

``simplex_solve`` reduces a bounded LP (equalities A x = b with box bounds)
to standard form, runs the two-phase simplex kernel and maps the verdict
back.  Infeasible verdicts come with a dual vector that
``verify_certificate`` can check against the original data independently of
the solver.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernel

PIVOT_TOL = 1e-10
FEAS_TOL = 1e-8
CERT_TOL = 1e-9


class SimplexError(RuntimeError):
    """Raised when the solver cannot produce a trustworthy verdict."""


def _frozen(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class LinearProgram:
    """minimize c.x  subject to  A x = b,  lower <= x <= upper.

    Bound entries may be ``-inf``/``+inf``; all other data must be finite.
    """

    c: np.ndarray
    A: np.ndarray
    b: np.ndarray
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.c, dtype=float))
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        b = np.atleast_1d(np.asarray(self.b, dtype=float))
        n = c.size
        if A.size == 0:
            A = A.reshape(0, n)
        lower = np.atleast_1d(np.asarray(self.lower, dtype=float))
        upper = np.atleast_1d(np.asarray(self.upper, dtype=float))
        if A.shape != (b.size, n):
            raise ValueError(f"A has shape {A.shape}, expected ({b.size}, {n})")
        if lower.size != n or upper.size != n:
            raise ValueError("bound vectors must match the number of variables")
        if not (np.all(np.isfinite(c)) and np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
            raise ValueError("objective and constraint data must be finite")
        if np.any(lower > upper):
            raise ValueError("lower bound exceeds upper bound")
        for name, arr in (("c", c), ("A", A), ("b", b), ("lower", lower), ("upper", upper)):
            object.__setattr__(self, name, _frozen(arr))

    @property
    def num_vars(self) -> int:
        return self.c.size

    @property
    def num_constraints(self) -> int:
        return self.b.size


@dataclass(frozen=True)
class LPOutcome:
    """Solver verdict: exactly one of solution or certificate is present."""

    status: str  # "optimal" | "infeasible" | "unbounded"
    x: np.ndarray | None = None
    certificate: np.ndarray | None = None
    objective: float | None = None
    iterations: int = 0

    def __post_init__(self):
        if self.x is not None:
            object.__setattr__(self, "x", _frozen(self.x))
        if self.certificate is not None:
            object.__setattr__(self, "certificate", _frozen(self.certificate))


def verify_certificate(lp: LinearProgram, y: np.ndarray, tol: float = CERT_TOL) -> bool:
    """Check the Farkas conditions for infeasibility of ``lp``.

    ``y`` proves infeasibility when z = A^T y points into the cone allowed
    by the bounds (z_j <= tol where x_j is unbounded above, z_j >= -tol
    where unbounded below) and y.b exceeds sup_{l<=x<=u} z.x by more than
    ``tol``.  Returns False for any y that fails these checks.
    """
    y = np.asarray(y, dtype=float).reshape(-1)
    if y.size != lp.num_constraints or not np.all(np.isfinite(y)):
        return False
    z = lp.A.T @ y
    sup = 0.0
    for j in range(lp.num_vars):
        zj = z[j]
        lo, up = lp.lower[j], lp.upper[j]
        if zj > tol:
            if not np.isfinite(up):
                return False
            sup += zj * up
        elif zj < -tol:
            if not np.isfinite(lo):
                return False
            sup += zj * lo
        else:
            # within tolerance of zero: clip into the cone, never add +/-inf
            if zj > 0.0 and np.isfinite(up):
                sup += zj * up
            elif zj < 0.0 and np.isfinite(lo):
                sup += zj * lo
    return float(y @ lp.b) - sup > tol


def _standardize(lp: LinearProgram):
    """Rewrite lp over variables x' >= 0 with upper bounds as extra rows.

    Returns (A, b, c, columns, offsets, signs, row_flips) where ``columns``
    maps each original variable to its standard-form column(s) and the
    original solution is recovered as  x_j = offset_j + sign_j * x'_col.
    Free variables are split into a difference of two columns.
    """
    n = lp.num_vars
    cols: list[np.ndarray] = []
    cost: list[float] = []
    upper: list[float] = []
    columns: list[tuple[int, ...]] = []
    offsets = np.zeros(n)
    signs = np.ones(n)
    for j in range(n):
        lo, up = lp.lower[j], lp.upper[j]
        a_col = lp.A[:, j]
        if np.isfinite(lo):
            offsets[j] = lo
            columns.append((len(cols),))
            cols.append(a_col)
            cost.append(lp.c[j])
            upper.append(up - lo)
        elif np.isfinite(up):
            # mirror: x = up - x'
            offsets[j] = up
            signs[j] = -1.0
            columns.append((len(cols),))
            cols.append(-a_col)
            cost.append(-lp.c[j])
            upper.append(np.inf)
        else:
            # free: x = x+ - x-
            columns.append((len(cols), len(cols) + 1))
            cols.append(a_col)
            cols.append(-a_col)
            cost.extend([lp.c[j], -lp.c[j]])
            upper.extend([np.inf, np.inf])
    A = np.column_stack(cols) if cols else np.zeros((lp.num_constraints, 0))
    b = lp.b - lp.A @ offsets
    c = np.asarray(cost)
    upper = np.asarray(upper)

    # finite upper bounds become rows  x'_k + s = u_k
    bounded = np.flatnonzero(np.isfinite(upper))
    m0, n0 = A.shape
    if bounded.size:
        A_full = np.zeros((m0 + bounded.size, n0 + bounded.size))
        A_full[:m0, :n0] = A
        for r, k in enumerate(bounded):
            A_full[m0 + r, k] = 1.0
            A_full[m0 + r, n0 + r] = 1.0
        b_full = np.concatenate([b, upper[bounded]])
        c_full = np.concatenate([c, np.zeros(bounded.size)])
    else:
        A_full, b_full, c_full = A, b, c

    flips = np.where(b_full < 0.0, -1.0, 1.0)
    return A_full * flips[:, None], b_full * flips, c_full, columns, offsets, signs, flips


def simplex_solve(lp: LinearProgram) -> LPOutcome:
    """Two-phase dense simplex with Bland's rule over the given LP.

    Optimal solutions satisfy the constraints and bounds within 1e-8;
    infeasible verdicts carry a Farkas certificate that passes
    ``verify_certificate``.  Numerical breakdown raises ``SimplexError``
    ("ill-conditioned").
    """
    A, b, c, columns, offsets, signs, flips = _standardize(lp)
    status, xs, ys, niter = kernel.solve_standard_form(A, b, c, PIVOT_TOL, FEAS_TOL)

    if status == kernel.FAILED:
        raise SimplexError("ill-conditioned: simplex kernel failed to converge")
    if status == kernel.UNBOUNDED:
        return LPOutcome(status="unbounded", iterations=niter)
    if status == kernel.INFEASIBLE:
        m = lp.num_constraints
        y = (ys[:m] * flips[:m]) if m else np.zeros(0)
        if not verify_certificate(lp, y):
            raise SimplexError("ill-conditioned: infeasibility certificate failed to verify")
        return LPOutcome(status="infeasible", certificate=y, iterations=niter)

    x = np.empty(lp.num_vars)
    for j, ks in enumerate(columns):
        if len(ks) == 1:
            x[j] = offsets[j] + signs[j] * xs[ks[0]]
        else:
            x[j] = xs[ks[0]] - xs[ks[1]]
    resid = float(np.abs(lp.A @ x - lp.b).max()) if lp.num_constraints else 0.0
    bound_err = float(
        max(np.max(np.maximum(lp.lower - x, 0.0), initial=0.0),
            np.max(np.maximum(x - lp.upper, 0.0), initial=0.0))
    )
    if resid >= FEAS_TOL or bound_err >= FEAS_TOL:
        raise SimplexError(
            f"ill-conditioned: solution residual {max(resid, bound_err):.3e} exceeds 1e-8"
        )
    return LPOutcome(status="optimal", x=x, objective=float(lp.c @ x), iterations=niter)
