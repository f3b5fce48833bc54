"""Finite-dimensional complex state algebra.

States, rank-1 projectors, Hermitian observables, Bloch-vector helpers,
Haar sampling and Born probabilities.  Everything here is immutable after
construction and every operation is pure, so values can be shared freely
across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

NORM_ATOL = 1e-12
HERMITIAN_ATOL = 1e-12
IDEMPOTENT_ATOL = 1e-10
TRACE_ATOL = 1e-10
DEGENERATE_NORM = 1e-9

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


def _frozen(values, dtype) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class PureState:
    """Unit vector in C^d.  Input amplitudes are normalized on construction;
    vectors with norm below 1e-9 are rejected as degenerate."""

    amplitudes: np.ndarray

    def __post_init__(self):
        vec = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if vec.size < 2:
            raise ValueError(f"state dimension must be >= 2, got {vec.size}")
        norm = float(np.linalg.norm(vec))
        if norm < DEGENERATE_NORM:
            raise ValueError(f"degenerate state vector (norm {norm:.3e} < 1e-9)")
        object.__setattr__(self, "amplitudes", _frozen(vec / norm, complex))

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def overlap(self, other: "PureState") -> complex:
        """Inner product <self|other>."""
        if self.dim != other.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")
        return complex(np.vdot(self.amplitudes, other.amplitudes))


@dataclass(frozen=True)
class Projector:
    """Rank-1 projector |phi><phi|; Hermitian, idempotent, trace 1."""

    matrix: np.ndarray
    source: PureState | None = field(default=None, compare=False)

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError(f"projector matrix must be square, got shape {mat.shape}")
        if np.abs(mat - mat.conj().T).max() > HERMITIAN_ATOL:
            raise ValueError("projector matrix is not Hermitian within 1e-12")
        if np.abs(mat @ mat - mat).max() > IDEMPOTENT_ATOL:
            raise ValueError("projector matrix is not idempotent within 1e-10")
        if abs(np.trace(mat).real - 1.0) > TRACE_ATOL:
            raise ValueError("projector trace differs from 1 beyond 1e-10")
        object.__setattr__(self, "matrix", _frozen(mat, complex))

    @classmethod
    def from_state(cls, state: PureState) -> "Projector":
        v = state.amplitudes
        return cls(np.outer(v, v.conj()), source=state)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class HermitianOperator:
    """d x d Hermitian matrix (equals its own conjugate transpose within 1e-12)."""

    matrix: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError(f"operator matrix must be square, got shape {mat.shape}")
        if np.abs(mat - mat.conj().T).max() > HERMITIAN_ATOL:
            raise ValueError("matrix is not Hermitian within 1e-12")
        object.__setattr__(self, "matrix", _frozen(mat, complex))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def expectation(self, state: PureState) -> float:
        if state.dim != self.dim:
            raise ValueError(f"dimension mismatch: {state.dim} vs {self.dim}")
        v = state.amplitudes
        return float(np.real(np.vdot(v, self.matrix @ v)))


@dataclass(frozen=True)
class BlochVector:
    """Unit vector in R^3 labelling a qubit state or a spin direction."""

    components: np.ndarray

    def __post_init__(self):
        vec = np.asarray(self.components, dtype=float).reshape(-1)
        if vec.size != 3:
            raise ValueError(f"Bloch vector needs 3 components, got {vec.size}")
        if abs(float(np.linalg.norm(vec)) - 1.0) > NORM_ATOL:
            raise ValueError("Bloch vector is not unit length within 1e-12")
        object.__setattr__(self, "components", _frozen(vec, float))

    @classmethod
    def from_angles(cls, polar: float, azimuth: float) -> "BlochVector":
        s = np.sin(polar)
        return cls([s * np.cos(azimuth), s * np.sin(azimuth), np.cos(polar)])


def basis_state(dim: int, index: int) -> PureState:
    """Computational basis vector |index> in dimension dim."""
    if not 0 <= index < dim:
        raise ValueError(f"basis index {index} out of range for dim {dim}")
    vec = np.zeros(dim, dtype=complex)
    vec[index] = 1.0
    return PureState(vec)


def born_probability(psi: PureState, phi: PureState) -> float:
    """|<psi|phi>|^2, the probability of collapsing psi onto phi."""
    if psi.dim != phi.dim:
        raise ValueError(f"dimension mismatch: {psi.dim} vs {phi.dim}")
    return float(abs(np.vdot(psi.amplitudes, phi.amplitudes)) ** 2)


def random_pure_state(dim: int, seed: int) -> PureState:
    """Haar-distributed state: complex standard-normal entries, normalized.

    Randomness comes from ``numpy.random.default_rng(seed)`` (PCG64), so the
    same seed always reproduces the same state.
    """
    if dim < 2:
        raise ValueError(f"dim must be >= 2, got {dim}")
    rng = np.random.default_rng(seed)
    vec = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return PureState(vec)


def pauli_observable(n: BlochVector) -> HermitianOperator:
    """Spin observable n.sigma with eigenvalues +1 and -1."""
    nx, ny, nz = n.components
    return HermitianOperator(nx * PAULI_X + ny * PAULI_Y + nz * PAULI_Z)


def bloch_state(n: BlochVector) -> PureState:
    """Qubit state whose Bloch vector is n (the +1 eigenstate of n.sigma)."""
    nx, ny, nz = n.components
    theta = np.arccos(np.clip(nz, -1.0, 1.0))
    phi = np.arctan2(ny, nx)
    return PureState([np.cos(theta / 2.0), np.exp(1j * phi) * np.sin(theta / 2.0)])


def bloch_of_state(psi: PureState) -> BlochVector:
    """Bloch vector of a qubit state, (<sigma_x>, <sigma_y>, <sigma_z>)."""
    if psi.dim != 2:
        raise ValueError(f"Bloch vector is defined for qubits, got dim {psi.dim}")
    v = psi.amplitudes
    comps = [float(np.real(np.vdot(v, p @ v))) for p in (PAULI_X, PAULI_Y, PAULI_Z)]
    arr = np.asarray(comps)
    return BlochVector(arr / np.linalg.norm(arr))


def tensor_product(a: PureState, b: PureState) -> PureState:
    """Kronecker product state: index i*dim_b + j carries a_i * b_j."""
    return PureState(np.kron(a.amplitudes, b.amplitudes))


def ic_projector_states(dim: int) -> list[PureState]:
    """An informationally complete family of d^2 pure states.

    Basis states |i>, plus (|i>+|j>)/sqrt2 and (|i>+i|j>)/sqrt2 for i < j.
    Their projectors span the full d^2-dimensional real space of Hermitian
    operators, which makes linear reconstruction from traces possible.
    """
    states = [basis_state(dim, i) for i in range(dim)]
    for i in range(dim):
        for j in range(i + 1, dim):
            for factor in (1.0, 1.0j):
                vec = np.zeros(dim, dtype=complex)
                vec[i] = 1.0
                vec[j] = factor
                states.append(PureState(vec))
    return states


def hermitian_basis(dim: int) -> np.ndarray:
    """Real basis of the Hermitian d x d matrices, shape (d^2, d, d).

    Diagonal units first, then symmetric and antisymmetric off-diagonal
    pairs; orthogonal under the trace inner product (not normalized).
    """
    mats = []
    for i in range(dim):
        m = np.zeros((dim, dim), dtype=complex)
        m[i, i] = 1.0
        mats.append(m)
    for i in range(dim):
        for j in range(i + 1, dim):
            m = np.zeros((dim, dim), dtype=complex)
            m[i, j] = 1.0
            m[j, i] = 1.0
            mats.append(m)
            m = np.zeros((dim, dim), dtype=complex)
            m[i, j] = -1.0j
            m[j, i] = 1.0j
            mats.append(m)
    return np.stack(mats)
