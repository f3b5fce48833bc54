"""Ontological models over finite ontic spaces.

A model pairs an epistemic map (prepared state -> probability weights over
ontic points) with a response map (effect -> conditional outcome
probabilities per point); its prediction for a (state, effect) pair is the
weighted sum of responses.  This module provides the delta model, the two
dispersion-free qubit models, the 1D position-measurement model, operator
reconstruction from responses and the structure checker that probes the
proportionality/disjoint-support chain forcing Born-rule responses.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .qcore import (
    HermitianOperator,
    Projector,
    PureState,
    bloch_of_state,
    born_probability,
    hermitian_basis,
)

WEIGHT_ATOL = 1e-10
RESPONSE_ATOL = 1e-12
SUPPORT_THRESHOLD = 1e-12
TIE_ATOL = 1e-12
DISTINCT_OVERLAP = 1.0 - 1e-12
SPAN_RANK_TOL = 1e-8
RECONSTRUCTION_RESIDUAL_TOL = 1e-8
OPERATOR_BOUND_ATOL = 1e-9
DISPERSION_ATOL = 1e-9


def _frozen(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class OnticSpace:
    """Finite ordered set of ontic points with optional per-point metadata."""

    labels: tuple
    metadata: tuple | None = field(default=None, compare=False)

    def __post_init__(self):
        labels = tuple(self.labels)
        if not labels:
            raise ValueError("ontic space needs at least one point")
        if len(set(labels)) != len(labels):
            raise ValueError("ontic labels must be unique")
        object.__setattr__(self, "labels", labels)
        if self.metadata is not None:
            md = tuple(self.metadata)
            if len(md) != len(labels):
                raise ValueError("metadata length must match the number of points")
            object.__setattr__(self, "metadata", md)

    @property
    def size(self) -> int:
        return len(self.labels)


@dataclass(frozen=True)
class EpistemicMap:
    """Probability weights over ontic points: nonnegative, summing to 1."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float).reshape(-1)
        if w.min() < -RESPONSE_ATOL:
            raise ValueError(f"negative weight {w.min():.3e} in epistemic map")
        w = np.maximum(w, 0.0)
        if abs(w.sum() - 1.0) > WEIGHT_ATOL:
            raise ValueError(f"weights sum to {w.sum():.12f}, expected 1 within 1e-10")
        object.__setattr__(self, "weights", _frozen(w))


@dataclass(frozen=True)
class ResponseMap:
    """Conditional outcome probabilities per ontic point, each in [0, 1]."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).reshape(-1)
        if v.min() < -RESPONSE_ATOL or v.max() > 1.0 + RESPONSE_ATOL:
            raise ValueError("response values must lie in [0, 1] within 1e-12")
        object.__setattr__(self, "values", _frozen(np.clip(v, 0.0, 1.0)))


@dataclass(frozen=True)
class OntoModel:
    """Candidate realistic theory: ontic space + epistemic and response maps.

    ``rho`` and ``response`` build per-state/per-effect vectors; both are
    validated on every query.  Models are immutable and evaluation is pure.
    """

    dim: int
    ontic: OnticSpace
    rho: Callable[[PureState], np.ndarray]
    response: Callable[[PureState], np.ndarray]

    def weights(self, psi: PureState) -> np.ndarray:
        if psi.dim != self.dim:
            raise ValueError(f"state dim {psi.dim} != model dim {self.dim}")
        w = EpistemicMap(self.rho(psi)).weights
        if w.size != self.ontic.size:
            raise ValueError("epistemic map length does not match the ontic space")
        return w

    def responses(self, phi: PureState) -> np.ndarray:
        if phi.dim != self.dim:
            raise ValueError(f"effect dim {phi.dim} != model dim {self.dim}")
        v = ResponseMap(self.response(phi)).values
        if v.size != self.ontic.size:
            raise ValueError("response map length does not match the ontic space")
        return v


def predict(model: OntoModel, psi: PureState, phi: PureState) -> float:
    """Model probability of effect phi on preparation psi:
    the response vector averaged over the epistemic weights."""
    return float(model.responses(phi) @ model.weights(psi))


def _match_state(states: Sequence[PureState], psi: PureState, kind: str) -> int:
    for i, s in enumerate(states):
        if abs(s.overlap(psi)) >= DISTINCT_OVERLAP:
            return i
    raise ValueError(f"{kind} is not in the model's state list")


def delta_model(states: Sequence[PureState]) -> OntoModel:
    """One ontic point per listed state; preparing a listed state puts all
    weight on its point; responses are the Born probabilities of the point's
    state.  Reproduces the Born rule exactly on the listed preparations."""
    states = list(states)
    if not states:
        raise ValueError("delta model needs at least one state")
    dim = states[0].dim
    for i, a in enumerate(states):
        if a.dim != dim:
            raise ValueError("all states must share one dimension")
        for b in states[i + 1:]:
            if abs(a.overlap(b)) >= DISTINCT_OVERLAP:
                raise ValueError("duplicate states: ontic labels must be unique")
    ontic = OnticSpace(
        labels=tuple(f"chi_{i}" for i in range(len(states))),
        metadata=tuple(states),
    )

    def rho(psi: PureState) -> np.ndarray:
        w = np.zeros(len(states))
        w[_match_state(states, psi, "prepared state")] = 1.0
        return w

    def response(phi: PureState) -> np.ndarray:
        return np.array([born_probability(phi, chi) for chi in states])

    return OntoModel(dim=dim, ontic=ontic, rho=rho, response=response)


def fibonacci_sphere(n: int) -> np.ndarray:
    """Deterministic near-uniform lattice of n unit vectors on the sphere."""
    i = np.arange(n)
    z = 1.0 - (2.0 * i + 1.0) / n
    r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    azimuth = np.pi * (3.0 - np.sqrt(5.0)) * i
    return np.column_stack([r * np.cos(azimuth), r * np.sin(azimuth), z])


def ks_model_qubit(lattice_size: int) -> OntoModel:
    """Dispersion-free qubit model on a Fibonacci sphere lattice.

    Preparing the state with Bloch vector m weights lattice direction
    lam by max(0, m.lam), normalized over the lattice sum; the effect
    along n fires iff lam falls in its hemisphere (0.5 on the measure-zero
    tie set |n.lam| <= 1e-12).  Converges to (1 + cos theta)/2.
    """
    if lattice_size < 1000:
        raise ValueError("lattice_size must be >= 1000 (coarser lattices miss tolerance)")
    lattice = fibonacci_sphere(lattice_size)
    ontic = OnticSpace(
        labels=tuple(range(lattice_size)),
        metadata=tuple(map(tuple, lattice)),
    )

    def rho(psi: PureState) -> np.ndarray:
        m = bloch_of_state(psi).components
        w = np.maximum(0.0, lattice @ m)
        return w / w.sum()

    def response(phi: PureState) -> np.ndarray:
        n = bloch_of_state(phi).components
        dots = lattice @ n
        return np.where(dots > TIE_ATOL, 1.0, np.where(dots < -TIE_ATOL, 0.0, 0.5))

    return OntoModel(dim=2, ontic=ontic, rho=rho, response=response)


def bell_model_qubit(states: Sequence[PureState], grid_size: int) -> OntoModel:
    """Dispersion-free qubit model on (state index, threshold) pairs.

    Ontic points are (i, lam_j) with lam_j the midpoints of a uniform grid
    on [0, 1]; preparing state i is uniform over its block, and the effect
    phi fires at (i, lam_j) iff lam_j <= |<phi|psi_i>|^2.  Born
    probabilities are reproduced within 1/(2*grid_size).
    """
    states = list(states)
    if grid_size < 100:
        raise ValueError("grid_size must be >= 100")
    for i, a in enumerate(states):
        if a.dim != 2:
            raise ValueError("bell model states must be qubits")
        for b in states[i + 1:]:
            if abs(a.overlap(b)) >= DISTINCT_OVERLAP:
                raise ValueError("duplicate states: ontic labels must be unique")
    grid = (np.arange(grid_size) + 0.5) / grid_size
    labels = tuple((i, j) for i in range(len(states)) for j in range(grid_size))
    ontic = OnticSpace(labels=labels)
    n_states = len(states)

    def rho(psi: PureState) -> np.ndarray:
        i = _match_state(states, psi, "prepared state")
        w = np.zeros(n_states * grid_size)
        w[i * grid_size:(i + 1) * grid_size] = 1.0 / grid_size
        return w

    def response(phi: PureState) -> np.ndarray:
        blocks = [
            (grid <= born_probability(phi, psi_i)).astype(float) for psi_i in states
        ]
        return np.concatenate(blocks)

    return OntoModel(dim=2, ontic=ontic, rho=rho, response=response)


@dataclass(frozen=True)
class BohmRegionResult:
    value: float
    clipped: bool  # True when the requested region stuck out of the grid


def bohm_region_probability(
    xs: np.ndarray, density: np.ndarray, region: tuple[float, float]
) -> BohmRegionResult:
    """Probability of finding the particle in [a, b] under a position density.

    The density must live on a uniform grid, be nonnegative and integrate
    to 1 within 1e-6 (trapezoid rule).  The conditional kernel is the
    region indicator, so the result is the trapezoid integral over
    [a, b] intersected with the grid; a region reaching beyond the grid is
    integrated over the intersection and flagged.
    """
    xs = np.asarray(xs, dtype=float).reshape(-1)
    density = np.asarray(density, dtype=float).reshape(-1)
    if xs.size != density.size or xs.size < 2:
        raise ValueError("xs and density must be equal-length grids of >= 2 points")
    steps = np.diff(xs)
    if steps.min() <= 0 or (steps.max() - steps.min()) > 1e-9 * steps.max():
        raise ValueError("xs must be a strictly increasing uniform grid")
    if density.min() < -RESPONSE_ATOL:
        raise ValueError("density must be nonnegative")
    total = float(np.trapezoid(density, xs))
    if abs(total - 1.0) > 1e-6:
        raise ValueError(f"density integrates to {total:.8f}, expected 1 within 1e-6")
    a, b = float(region[0]), float(region[1])
    if a > b:
        raise ValueError(f"empty region: a={a} > b={b}")
    clipped = bool(a < xs[0] - 1e-15 or b > xs[-1] + 1e-15)
    a_eff, b_eff = max(a, float(xs[0])), min(b, float(xs[-1]))
    if a_eff >= b_eff:
        return BohmRegionResult(value=0.0, clipped=True)
    inner = xs[(xs > a_eff) & (xs < b_eff)]
    nodes = np.concatenate([[a_eff], inner, [b_eff]])
    values = np.interp(nodes, xs, density)
    return BohmRegionResult(value=float(np.trapezoid(values, nodes)), clipped=clipped)


def check_dispersion_free(model: OntoModel, effects: Sequence[PureState]) -> bool:
    """True iff every response entry is within 1e-9 of 0 or 1."""
    for phi in effects:
        v = model.responses(phi)
        if not np.all((np.abs(v) <= DISPERSION_ATOL) | (np.abs(v - 1.0) <= DISPERSION_ATOL)):
            return False
    return True


def _effect_matrix(effect) -> np.ndarray:
    if isinstance(effect, Projector):
        return effect.matrix
    if isinstance(effect, PureState):
        return Projector.from_state(effect).matrix
    raise TypeError(f"effect must be a PureState or Projector, got {type(effect).__name__}")


def _design_matrix(effects, dim: int):
    """Trace pairings of the effect projectors against a Hermitian basis.

    Returns (design, basis); raises when the projectors do not span the
    d^2-dimensional real space of Hermitian operators.
    """
    basis = hermitian_basis(dim)
    mats = [_effect_matrix(e) for e in effects]
    for mat in mats:
        if mat.shape[0] != dim:
            raise ValueError("effect dimension does not match dim")
    design = np.array([[np.trace(m @ h).real for h in basis] for m in mats])
    rank = int(np.linalg.matrix_rank(design, tol=SPAN_RANK_TOL))
    if rank < dim * dim:
        raise ValueError(
            f"projector set spans rank {rank} < {dim * dim}: not informationally complete"
        )
    return design, basis


@dataclass(frozen=True)
class OperatorReconstruction:
    """Least-squares inversion of responses = Tr[B P_phi] over an IC set."""

    operator: HermitianOperator
    residual: float
    inconsistent: bool  # residual above 1e-8: no Hermitian B fits the data


def reconstruct_ontic_operator(
    responses: Sequence[tuple[PureState | Projector, float]], dim: int
) -> OperatorReconstruction:
    """Invert the trace pairing to recover the ontic operator at one point.

    ``responses`` pairs each projector of an informationally complete set
    with the conditional probability observed at the ontic point.  The
    unique least-squares Hermitian solution is returned; when the fit
    residual exceeds 1e-8 the result is flagged inconsistent (the response
    data is not linear in the projectors).
    """
    effects = [e for e, _ in responses]
    values = np.array([float(v) for _, v in responses])
    design, basis = _design_matrix(effects, dim)
    theta, *_ = np.linalg.lstsq(design, values, rcond=None)
    matrix = np.tensordot(theta, basis, axes=1)
    residual = float(np.abs(design @ theta - values).max())
    return OperatorReconstruction(
        operator=HermitianOperator(matrix),
        residual=residual,
        inconsistent=residual > RECONSTRUCTION_RESIDUAL_TOL,
    )


@dataclass(frozen=True)
class OnticOperatorAssignment:
    """Per-point Hermitian operators with spectrum inside [0, 1] (within 1e-9)."""

    operators: tuple[HermitianOperator, ...]

    def __post_init__(self):
        ops = tuple(self.operators)
        if not ops:
            raise ValueError("assignment needs at least one operator")
        for k, op in enumerate(ops):
            eig = np.linalg.eigvalsh(op.matrix)
            if eig.min() < -OPERATOR_BOUND_ATOL or eig.max() > 1.0 + OPERATOR_BOUND_ATOL:
                raise ValueError(
                    f"operator at point {k} has spectrum [{eig.min():.3e}, {eig.max():.3e}] "
                    "outside [0, 1]"
                )
        object.__setattr__(self, "operators", ops)

    @classmethod
    def from_model(cls, model: OntoModel, ic_effects: Sequence[PureState]):
        """Reconstruct the operator at every ontic point of a model."""
        stack, _ = _reconstruct_all_points(model, ic_effects)
        return cls(operators=tuple(HermitianOperator(stack[k]) for k in range(stack.shape[0])))


def _reconstruct_all_points(model: OntoModel, ic_effects: Sequence[PureState]):
    """Vectorized per-point reconstruction; returns (K,d,d) stack and R."""
    design, basis = _design_matrix(ic_effects, model.dim)
    R = np.column_stack([model.responses(phi) for phi in ic_effects])  # K x E
    theta = R @ np.linalg.pinv(design).T  # K x d^2
    stack = np.tensordot(theta, basis, axes=1)  # K x d x d
    for k in range(stack.shape[0]):
        if not np.all(np.isfinite(stack[k])):
            raise ValueError(f"operator reconstruction failed at ontic point {k}")
    return stack, R


@dataclass(frozen=True)
class TheoremReport:
    """Numeric witnesses for the proportionality / disjoint-support chain.

    ``lambda_factors`` and ``proportionality_deviation`` are per-point and
    NaN wherever the support map is undefined; ``support_map`` holds the
    supporting prepared-state index or -1.  ``support_violations`` lists
    (point, state, state) triples where two distinct prepared states share
    a point, truncated to 1000 entries (``support_violation_count`` is the
    full count).
    """

    born_residual: float
    reconstruction_residual: float
    lambda_factors: np.ndarray
    proportionality_deviation: np.ndarray
    lambda_mean_residuals: np.ndarray
    born_response_residual: float
    supports_disjoint: bool
    support_violations: tuple[tuple[int, int, int], ...]
    support_violation_count: int
    support_map: np.ndarray

    def __post_init__(self):
        for name in ("lambda_factors", "proportionality_deviation", "lambda_mean_residuals"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))
        object.__setattr__(self, "support_map", _frozen(self.support_map, dtype=np.int64))

    @property
    def max_proportionality_deviation(self) -> float:
        finite = self.proportionality_deviation[np.isfinite(self.proportionality_deviation)]
        return float(finite.max()) if finite.size else 0.0

    @property
    def max_lambda_mean_residual(self) -> float:
        return float(self.lambda_mean_residuals.max())


def theorem_structure_check(
    model: OntoModel,
    prepared: Sequence[PureState],
    ic_effects: Sequence[PureState],
    tol: float = SUPPORT_THRESHOLD,
) -> TheoremReport:
    """Reconstruct per-point operators and audit the structure they force.

    For an exact model the reconstructed operators average to the prepared
    projectors, are proportional to them on their supports with unit
    proportionality factors, responses on supports equal Born
    probabilities, and distinct preparations occupy disjoint supports.
    ``tol`` is the weight threshold deciding which points count as
    supported.
    """
    prepared = list(prepared)
    if not prepared:
        raise ValueError("need at least one prepared state")
    stack, R = _reconstruct_all_points(model, ic_effects)
    K = stack.shape[0]
    S = len(prepared)
    W = np.column_stack([model.weights(psi) for psi in prepared])  # K x S
    projectors = np.stack([Projector.from_state(psi).matrix for psi in prepared])

    born = np.array(
        [[born_probability(psi, phi) for psi in prepared] for phi in ic_effects]
    )
    born_residual = float(np.abs(R.T @ W - born).max()) if born.size else 0.0

    # Eq-level average: sum_k B_k rho(k|psi) should rebuild each projector
    averaged = np.tensordot(W.T, stack, axes=1)  # S x d x d
    reconstruction_residual = float(
        max(np.linalg.norm(averaged[i] - projectors[i], ord=2) for i in range(S))
    )

    supported = W > tol
    support_counts = supported.sum(axis=1)
    distinct = np.array(
        [
            [abs(a.overlap(b)) < DISTINCT_OVERLAP for b in prepared]
            for a in prepared
        ]
    )
    violations: list[tuple[int, int, int]] = []
    violation_count = 0
    for i in range(S):
        for j in range(i + 1, S):
            if not distinct[i, j]:
                continue
            shared = np.flatnonzero(supported[:, i] & supported[:, j])
            violation_count += shared.size
            for k in shared[: max(0, 1000 - len(violations))]:
                violations.append((int(k), i, j))
    supports_disjoint = violation_count == 0

    support_map = np.full(K, -1, dtype=np.int64)
    single = support_counts == 1
    support_map[single] = np.argmax(supported[single], axis=1)

    lambda_factors = np.full(K, np.nan)
    deviation = np.full(K, np.nan)
    born_response_residual = 0.0
    for i in range(S):
        pts = np.flatnonzero(single & (support_map == i))
        if pts.size:
            lams = np.einsum("kab,ba->k", stack[pts], projectors[i]).real
            lambda_factors[pts] = lams
            residuals = stack[pts] - lams[:, None, None] * projectors[i]
            deviation[pts] = np.linalg.svd(residuals, compute_uv=False)[:, 0]
            born_response_residual = max(
                born_response_residual,
                float(np.abs(R[pts] - born[:, i][None, :]).max()),
            )

    lambda_mean = np.zeros(S)
    for i in range(S):
        pts = np.flatnonzero(supported[:, i])
        lams = np.einsum("kab,ba->k", stack[pts], projectors[i]).real
        lambda_mean[i] = abs(float(lams @ W[pts, i]) - 1.0)

    return TheoremReport(
        born_residual=born_residual,
        reconstruction_residual=reconstruction_residual,
        lambda_factors=lambda_factors,
        proportionality_deviation=deviation,
        lambda_mean_residuals=lambda_mean,
        born_response_residual=born_response_residual,
        supports_disjoint=supports_disjoint,
        support_violations=tuple(violations),
        support_violation_count=violation_count,
        support_map=support_map,
    )


def model_to_document(
    model: OntoModel,
    states: dict[str, PureState],
    effects: dict[str, PureState],
) -> dict:
    """Tabulate a model into a JSON-ready document.

    Complex amplitudes are encoded as [re, im] pairs; weights and response
    vectors are listed per state/effect name in ontic-label order.
    """
    def encode(psi: PureState):
        return [[z.real, z.imag] for z in psi.amplitudes]

    return {
        "dim": model.dim,
        "ontic_labels": [str(label) for label in model.ontic.labels],
        "states": {name: encode(psi) for name, psi in states.items()},
        "effects": {name: encode(phi) for name, phi in effects.items()},
        "weights": {name: model.weights(psi).tolist() for name, psi in states.items()},
        "responses": {name: model.responses(phi).tolist() for name, phi in effects.items()},
        "options": {"model": "tabulated"},
    }


def model_from_document(doc: dict) -> OntoModel:
    """Rebuild a tabulated model exported by ``model_to_document``.

    The returned model answers queries by matching the queried state or
    effect against the stored vectors (up to global phase).
    """
    def decode(pairs) -> PureState:
        return PureState(np.array([complex(re, im) for re, im in pairs]))

    dim = int(doc["dim"])
    states = {name: decode(vec) for name, vec in doc["states"].items()}
    effects = {name: decode(vec) for name, vec in doc["effects"].items()}
    weights = {name: np.asarray(vals, dtype=float) for name, vals in doc["weights"].items()}
    responses = {name: np.asarray(vals, dtype=float) for name, vals in doc["responses"].items()}
    ontic = OnticSpace(labels=tuple(doc["ontic_labels"]))

    def rho(psi: PureState) -> np.ndarray:
        names = list(states)
        i = _match_state([states[n] for n in names], psi, "prepared state")
        return weights[names[i]]

    def response(phi: PureState) -> np.ndarray:
        names = list(effects)
        i = _match_state([effects[n] for n in names], phi, "effect")
        return responses[names[i]]

    return OntoModel(dim=dim, ontic=ontic, rho=rho, response=response)
