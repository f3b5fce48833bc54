"""Born-rule reproduction as finite LP feasibility, plus alternating search.

A candidate realistic description with K ontic points must satisfy
P rho = T where T holds the quantum target probabilities, rho columns are
probability weights over the points and P entries are conditional response
probabilities in [0, 1].  With one block frozen the system is an LP; the
joint problem is bilinear and is attacked heuristically by alternating
exact LP minimizations from random restarts.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..qcore import PureState, born_probability
from .linprog import LinearProgram, LPOutcome, simplex_solve

TARGET_ATOL = 1e-12
DIST_ATOL = 1e-10
RESP_ATOL = 1e-12


def _frozen(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


def target_matrix(states: list[PureState], effects: list[PureState]) -> np.ndarray:
    """E x S matrix of Born probabilities, T[j, i] = |<phi_j|psi_i>|^2."""
    dims = {s.dim for s in states} | {e.dim for e in effects}
    if len(dims) != 1:
        raise ValueError(f"states and effects must share one dimension, got {sorted(dims)}")
    return np.array([[born_probability(psi, phi) for psi in states] for phi in effects])


@dataclass(frozen=True)
class FeasibilityProblem:
    """Reproduce the target matrix of (states, effects) with K ontic points."""

    dim: int
    states: tuple[PureState, ...]
    effects: tuple[PureState, ...]
    ontic_size: int
    targets: np.ndarray

    def __post_init__(self):
        states = tuple(self.states)
        effects = tuple(self.effects)
        if self.ontic_size < 1:
            raise ValueError("ontic_size must be >= 1")
        T = np.asarray(self.targets, dtype=float)
        if T.shape != (len(effects), len(states)):
            raise ValueError(f"targets shape {T.shape} != ({len(effects)}, {len(states)})")
        if T.min() < -TARGET_ATOL or T.max() > 1.0 + TARGET_ATOL:
            raise ValueError("target entries must lie in [0, 1]")
        if np.abs(T - target_matrix(list(states), list(effects))).max() > TARGET_ATOL:
            raise ValueError("targets disagree with the Born probabilities of states/effects")
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "effects", effects)
        object.__setattr__(self, "targets", _frozen(T))

    @classmethod
    def build(cls, states, effects, ontic_size: int) -> "FeasibilityProblem":
        states = list(states)
        effects = list(effects)
        return cls(
            dim=states[0].dim,
            states=tuple(states),
            effects=tuple(effects),
            ontic_size=ontic_size,
            targets=target_matrix(states, effects),
        )

    @property
    def num_states(self) -> int:
        return len(self.states)

    @property
    def num_effects(self) -> int:
        return len(self.effects)


def _check_responses(problem: FeasibilityProblem, responses: np.ndarray) -> np.ndarray:
    P = np.asarray(responses, dtype=float)
    if P.shape != (problem.num_effects, problem.ontic_size):
        raise ValueError(
            f"responses shape {P.shape} != ({problem.num_effects}, {problem.ontic_size})"
        )
    if P.min() < -RESP_ATOL or P.max() > 1.0 + RESP_ATOL:
        raise ValueError("response entries must lie in [0, 1]")
    return P


def _check_weights(problem: FeasibilityProblem, weights: np.ndarray) -> np.ndarray:
    rho = np.asarray(weights, dtype=float)
    if rho.shape != (problem.ontic_size, problem.num_states):
        raise ValueError(
            f"weights shape {rho.shape} != ({problem.ontic_size}, {problem.num_states})"
        )
    if rho.min() < -RESP_ATOL:
        raise ValueError("weight entries must be nonnegative")
    if np.abs(rho.sum(axis=0) - 1.0).max() > DIST_ATOL:
        raise ValueError("each weight column must sum to 1")
    return rho


def solve_rho(problem: FeasibilityProblem, responses: np.ndarray, state_index: int) -> LPOutcome:
    """With responses P frozen, find weights for one prepared state.

    Searches rho >= 0 with sum(rho) = 1 and P rho = T[:, state_index];
    returns the LP verdict, with a Farkas certificate when no such
    distribution exists.  Certificate rows are ordered: the E response
    constraints first, the normalization row last.
    """
    P = _check_responses(problem, responses)
    if not 0 <= state_index < problem.num_states:
        raise ValueError(f"state_index {state_index} out of range")
    K = problem.ontic_size
    A = np.vstack([P, np.ones((1, K))])
    b = np.concatenate([problem.targets[:, state_index], [1.0]])
    lp = LinearProgram(c=np.zeros(K), A=A, b=b, lower=np.zeros(K), upper=np.full(K, np.inf))
    return simplex_solve(lp)


def solve_responses(problem: FeasibilityProblem, weights: np.ndarray) -> LPOutcome:
    """With weights rho frozen, find responses P in [0,1] with P rho = T.

    Constraint rows are ordered (effect j, state i) with i fastest; the
    solution vector flattens P row-major.
    """
    rho = _check_weights(problem, weights)
    E, S, K = problem.num_effects, problem.num_states, problem.ontic_size
    A = np.zeros((E * S, E * K))
    for j in range(E):
        A[j * S:(j + 1) * S, j * K:(j + 1) * K] = rho.T
    b = problem.targets.reshape(-1)
    lp = LinearProgram(
        c=np.zeros(E * K), A=A, b=b, lower=np.zeros(E * K), upper=np.ones(E * K)
    )
    out = simplex_solve(lp)
    if out.status == "optimal":
        return LPOutcome(
            status="optimal",
            x=out.x.reshape(E, K),
            objective=out.objective,
            iterations=out.iterations,
        )
    return out


def _minimax_step(M: np.ndarray, target: np.ndarray, var_upper: float, simplex_row: bool):
    """minimize t  s.t.  |M v - target| <= t  over v in the given box.

    ``simplex_row`` adds sum(v) = 1.  Returns (t, v).  Used for both
    half-steps of the alternation; rows M are dense and small.
    """
    m, nv = M.shape
    # variables: v (nv), t, then one slack per inequality row
    n_all = nv + 1 + 2 * m
    A = np.zeros((2 * m + (1 if simplex_row else 0), n_all))
    b = np.zeros(A.shape[0])
    A[:m, :nv] = M
    A[m:2 * m, :nv] = -M
    A[:2 * m, nv] = -1.0
    A[:2 * m, nv + 1:] = np.eye(2 * m)
    b[:m] = target
    b[m:2 * m] = -target
    if simplex_row:
        A[2 * m, :nv] = 1.0
        b[2 * m] = 1.0
    lower = np.zeros(n_all)
    upper = np.full(n_all, np.inf)
    upper[:nv] = var_upper
    c = np.zeros(n_all)
    c[nv] = 1.0
    out = simplex_solve(LinearProgram(c=c, A=A, b=b, lower=lower, upper=upper))
    if out.status != "optimal":  # the min-t system is always feasible and bounded
        raise RuntimeError(f"minimax step unexpectedly {out.status}")
    return float(out.objective), out.x[:nv]


@dataclass(frozen=True)
class AlternationReport:
    """Every residual trace is nonincreasing within its restart because each
    half-step is an exact LP minimization of the shared max-norm objective."""

    restarts: int
    iterations: tuple[int, ...]
    residual_traces: tuple[tuple[float, ...], ...]
    best_residual: float
    best_weights: np.ndarray
    best_responses: np.ndarray
    best_restart: int

    def __post_init__(self):
        object.__setattr__(self, "best_weights", _frozen(self.best_weights))
        object.__setattr__(self, "best_responses", _frozen(self.best_responses))


def _residual(P, rho, T) -> float:
    return float(np.abs(P @ rho - T).max())


def alternate_search(
    problem: FeasibilityProblem,
    restarts: int,
    max_iters: int,
    seed: int,
) -> AlternationReport:
    """Alternating exact minimax LPs over the response and weight blocks.

    Restart 0 starts from the delta construction when K equals the number
    of states (weights = indicator columns, responses = targets); the other
    restarts draw flat-Dirichlet weight columns and uniform responses from
    ``default_rng([seed, restart])``.  Both half-step LPs decompose into
    independent per-row / per-column subproblems, which is exact because
    the max-norm objective separates over them.

    Deterministic for fixed inputs; the best pair is selected by lowest
    residual with ties broken by restart index.
    """
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    E, S, K = problem.num_effects, problem.num_states, problem.ontic_size
    T = problem.targets

    best = None
    traces: list[tuple[float, ...]] = []
    iters: list[int] = []
    for r in range(restarts):
        if r == 0 and K == S:
            rho = np.eye(K)
            P = T.copy()
        else:
            rng = np.random.default_rng([seed, r])
            rho = rng.dirichlet(np.ones(K), size=S).T
            P = rng.uniform(size=(E, K))
        trace = [_residual(P, rho, T)]
        it = 0
        while it < max_iters and trace[-1] > 1e-12:
            # response rows are independent given rho
            P = np.vstack([_minimax_step(rho.T, T[j], 1.0, False)[1] for j in range(E)])
            trace.append(_residual(P, rho, T))
            # weight columns are independent given P
            rho = np.column_stack(
                [_minimax_step(P, T[:, i], np.inf, True)[1] for i in range(S)]
            )
            trace.append(_residual(P, rho, T))
            it += 1
            if len(trace) >= 5 and trace[-5] - trace[-1] < 1e-14:
                break
        traces.append(tuple(trace))
        iters.append(it)
        if best is None or trace[-1] < best[0]:
            best = (trace[-1], r, rho.copy(), P.copy())

    return AlternationReport(
        restarts=restarts,
        iterations=tuple(iters),
        residual_traces=tuple(traces),
        best_residual=best[0],
        best_weights=best[2],
        best_responses=best[3],
        best_restart=best[1],
    )
