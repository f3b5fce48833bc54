"""Discrete Wigner quasi-probability on the d x d phase-space lattice.

For odd prime d the phase-point operator at (q, p) has matrix elements
<m|A(q,p)|n> = [m + n = 2q mod d] * omega^(p(m-n)) with omega = exp(2 pi i/d);
oddness makes 2 invertible mod d, so each operator has unit trace and the
family is orthogonal, Tr[A(a) A(b)] = d delta_ab.  The Wigner value of a
unit-trace Hermitian operator is W(q,p) = Tr[op A(q,p)]/d; rows marginalize
to computational-basis probabilities and columns to Fourier-basis ones.
Negative entries are what obstructs reading W as a classical distribution.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .qcore import HermitianOperator

HERMITIAN_ATOL = 1e-12
TRACE_ATOL = 1e-12
ORTHO_ATOL = 1e-10
TABLE_SUM_ATOL = 1e-10
WIGNER_TRACE_ATOL = 1e-10
NEG_ATOL = 1e-12


def _is_odd_prime(d: int) -> bool:
    if d < 3 or d % 2 == 0:
        return False
    return all(d % f for f in range(3, int(d ** 0.5) + 1, 2))


@dataclass(frozen=True)
class PhasePointSet:
    """The d^2 phase-point operators, indexed by (q, p)."""

    dim: int
    operators: np.ndarray  # shape (d, d, d, d), [q, p] -> matrix

    def __post_init__(self):
        d = self.dim
        ops = np.asarray(self.operators, dtype=complex)
        if ops.shape != (d, d, d, d):
            raise ValueError(f"operators must have shape ({d},{d},{d},{d})")
        if np.abs(ops - np.conj(np.swapaxes(ops, -1, -2))).max() > HERMITIAN_ATOL:
            raise ValueError("phase-point operators must be Hermitian within 1e-12")
        traces = np.einsum("qpii->qp", ops)
        if np.abs(traces - 1.0).max() > TRACE_ATOL:
            raise ValueError("phase-point operators must have unit trace within 1e-12")
        overlaps = np.einsum("qpij,rsji->qprs", ops, ops)
        expected = np.zeros((d, d, d, d))
        for q in range(d):
            for p in range(d):
                expected[q, p, q, p] = d
        if np.abs(overlaps - expected).max() > ORTHO_ATOL:
            raise ValueError("phase-point operators must satisfy Tr[A(a)A(b)] = d delta_ab")
        arr = np.array(ops)
        arr.setflags(write=False)
        object.__setattr__(self, "operators", arr)

    def operator(self, q: int, p: int) -> HermitianOperator:
        return HermitianOperator(self.operators[q % self.dim, p % self.dim])


@dataclass(frozen=True)
class WignerTable:
    """d x d grid of real quasi-probabilities summing to 1."""

    dim: int
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (self.dim, self.dim):
            raise ValueError(f"values must be {self.dim}x{self.dim}")
        if abs(vals.sum() - 1.0) > TABLE_SUM_ATOL:
            raise ValueError(f"table sums to {vals.sum():.12f}, expected 1 within 1e-10")
        arr = np.array(vals)
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)


def phase_point_operators(d: int) -> PhasePointSet:
    """Build the lattice operators for odd prime d."""
    if not _is_odd_prime(d):
        raise ValueError(f"odd prime required, got {d}")
    omega = np.exp(2j * np.pi / d)
    m = np.arange(d)
    ops = np.zeros((d, d, d, d), dtype=complex)
    for q in range(d):
        mask = (m[:, None] + m[None, :]) % d == (2 * q) % d
        for p in range(d):
            ops[q, p] = np.where(mask, omega ** (p * (m[:, None] - m[None, :])), 0.0)
    return PhasePointSet(dim=d, operators=ops)


def wigner(op: HermitianOperator, pps: PhasePointSet) -> WignerTable:
    """Wigner table of a unit-trace Hermitian operator: Tr[op A(q,p)]/d."""
    if op.dim != pps.dim:
        raise ValueError(f"operator dim {op.dim} != lattice dim {pps.dim}")
    tr = complex(np.trace(op.matrix)).real
    if abs(tr - 1.0) > WIGNER_TRACE_ATOL:
        raise ValueError(f"operator trace {tr:.10f} must be 1 within 1e-10")
    vals = np.einsum("ij,qpji->qp", op.matrix, pps.operators).real / pps.dim
    return WignerTable(dim=pps.dim, values=vals)


def negativity(table: WignerTable) -> float:
    """Total weight of negative entries, sum of max(0, -W); zero iff the
    table is nonnegative within 1e-12."""
    neg = float(np.maximum(0.0, -table.values).sum())
    return 0.0 if neg <= NEG_ATOL else neg


def reconstruct_from_wigner(table: WignerTable, pps: PhasePointSet) -> HermitianOperator:
    """Inverse transform sum_qp W(q,p) A(q,p); a wigner -> reconstruct round
    trip reproduces the input within 1e-10 in max norm."""
    if table.dim != pps.dim:
        raise ValueError(f"table dim {table.dim} != lattice dim {pps.dim}")
    mat = np.einsum("qp,qpij->ij", table.values, pps.operators)
    return HermitianOperator(mat)
