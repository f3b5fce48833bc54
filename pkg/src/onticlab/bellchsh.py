"""Two-qubit CHSH machinery.

Correlators come from the 3x3 correlation tensor T with
T[m, n] = <sigma_m x sigma_n>; the CHSH combination for Bloch settings
(a, a', b, b') is a.T(b + b') + a'.T(b - b').  Spin up/down is identified
with |0>/|1> and the first qubit is the left Kronecker factor, matching
``qcore.tensor_product``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .qcore import (
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    BlochVector,
    PureState,
)

TENSOR_ATOL = 1e-9
_PAULIS = (PAULI_X, PAULI_Y, PAULI_Z)
GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class ChshSetting:
    """Four unit Bloch directions: a, a' on qubit 1 and b, b' on qubit 2."""

    a: BlochVector
    a_prime: BlochVector
    b: BlochVector
    b_prime: BlochVector


@dataclass(frozen=True)
class CorrelationTensor:
    """Pauli-pair expectations of a two-qubit state; entries in [-1, 1]."""

    matrix: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=float)
        if mat.shape != (3, 3):
            raise ValueError(f"correlation tensor must be 3x3, got {mat.shape}")
        if np.abs(mat).max() > 1.0 + TENSOR_ATOL:
            raise ValueError("correlation entries must lie in [-1, 1]")
        mat = np.array(mat)
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)


def correlation_tensor(state: PureState) -> CorrelationTensor:
    """T[m, n] = <psi| sigma_m x sigma_n |psi> for a two-qubit pure state."""
    if state.dim != 4:
        raise ValueError(f"correlation tensor needs a two-qubit state, got dim {state.dim}")
    v = state.amplitudes
    mat = np.empty((3, 3))
    for m, sm in enumerate(_PAULIS):
        for n, sn in enumerate(_PAULIS):
            mat[m, n] = float(np.real(np.vdot(v, np.kron(sm, sn) @ v)))
    return CorrelationTensor(mat)


def chsh_value(state: PureState, setting: ChshSetting) -> float:
    """<ab> + <ab'> + <a'b> - <a'b'> evaluated through the correlation tensor."""
    T = correlation_tensor(state).matrix
    a = setting.a.components
    ap = setting.a_prime.components
    b = setting.b.components
    bp = setting.b_prime.components
    return float(a @ T @ (b + bp) + ap @ T @ (b - bp))


def horodecki_max(state: PureState) -> float:
    """Closed-form maximum of the CHSH value over all settings:
    2 sqrt(u1 + u2) with u1, u2 the two largest eigenvalues of T^T T."""
    T = correlation_tensor(state).matrix
    u = np.linalg.eigvalsh(T.T @ T)
    return float(2.0 * np.sqrt(u[-1] + u[-2]))


def bell_states() -> tuple[PureState, PureState, PureState, PureState]:
    """The four maximally entangled states (phi+, phi-, psi+, psi-)."""
    s = 1.0 / np.sqrt(2.0)
    return (
        PureState([s, 0.0, 0.0, s]),
        PureState([s, 0.0, 0.0, -s]),
        PureState([0.0, s, s, 0.0]),
        PureState([0.0, s, -s, 0.0]),
    )


def _vector(polar: float, azimuth: float) -> np.ndarray:
    sp = np.sin(polar)
    return np.array([sp * np.cos(azimuth), sp * np.sin(azimuth), np.cos(polar)])


def _value_from_angles(T: np.ndarray, angles: np.ndarray) -> float:
    a = _vector(angles[0], angles[1])
    ap = _vector(angles[2], angles[3])
    b = _vector(angles[4], angles[5])
    bp = _vector(angles[6], angles[7])
    return float(a @ T @ (b + bp) + ap @ T @ (b - bp))


def _golden_section(f, lo: float, hi: float, iters: int = 40):
    """Deterministic golden-section maximization on [lo, hi]."""
    x1 = hi - GOLDEN * (hi - lo)
    x2 = lo + GOLDEN * (hi - lo)
    f1, f2 = f(x1), f(x2)
    for _ in range(iters):
        if f1 >= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - GOLDEN * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + GOLDEN * (hi - lo)
            f2 = f(x2)
    return (x1, f1) if f1 >= f2 else (x2, f2)


def chsh_grid_max(
    state: PureState, coarse_steps: int, refine_iters: int, seed: int
) -> tuple[float, ChshSetting]:
    """Derivative-free search for the largest CHSH value of a state.

    Each of the four Bloch vectors is parametrized by (polar, azimuth).
    Starting from seeded random angles, the eight angles are swept in round
    robin for 4*refine_iters passes; the first pass scans ``coarse_steps``
    grid points per angle before refining, later passes refine by
    golden-section only.  Deterministic for fixed inputs and never above
    the Horodecki bound of the state.
    """
    if coarse_steps < 8:
        raise ValueError("coarse_steps must be >= 8")
    if refine_iters < 1:
        raise ValueError("refine_iters must be >= 1")
    T = correlation_tensor(state).matrix
    rng = np.random.default_rng(seed)
    angles = np.empty(8)
    angles[0::2] = np.arccos(rng.uniform(-1.0, 1.0, size=4))
    angles[1::2] = rng.uniform(0.0, 2.0 * np.pi, size=4)
    spans = np.array([np.pi, 2.0 * np.pi] * 4)

    best = _value_from_angles(T, angles)
    for sweep in range(4 * refine_iters):
        for idx in range(8):
            span = spans[idx]

            def slice_value(x: float) -> float:
                trial = angles.copy()
                trial[idx] = x
                return _value_from_angles(T, trial)

            center = angles[idx]
            if sweep == 0:
                grid = np.linspace(0.0, span, coarse_steps, endpoint=False)
                vals = [slice_value(x) for x in grid]
                center = float(grid[int(np.argmax(vals))])
            width = span / coarse_steps
            x, val = _golden_section(slice_value, center - width, center + width)
            if val > best:
                angles[idx] = x
                best = val
    setting = ChshSetting(
        a=BlochVector(_vector(angles[0], angles[1])),
        a_prime=BlochVector(_vector(angles[2], angles[3])),
        b=BlochVector(_vector(angles[4], angles[5])),
        b_prime=BlochVector(_vector(angles[6], angles[7])),
    )
    return best, setting
