import numpy as np
import pytest

from onticlab.feasopt import (
    FeasibilityProblem,
    alternate_search,
    solve_responses,
    solve_rho,
    target_matrix,
    verify_certificate,
)
from onticlab.feasopt.linprog import LinearProgram
from onticlab.qcore import PureState, basis_state, born_probability, random_pure_state

Z0 = basis_state(2, 0)
Z1 = basis_state(2, 1)
PLUS = PureState([1.0, 1.0])


def forward_instance(seed: int, dim: int = 3, ontic: int = 4, n_effects: int = 6):
    """Problem generated from a hidden delta-style model: ontic point k is the
    state chi_k, responses are its Born probabilities, weights are indicators."""
    chis = [random_pure_state(dim, 10_000 + 17 * seed + k) for k in range(ontic)]
    effects = [random_pure_state(dim, 20_000 + 17 * seed + j) for j in range(n_effects)]
    problem = FeasibilityProblem.build(chis, effects, ontic)
    responses = np.array([[born_probability(chi, phi) for chi in chis] for phi in effects])
    weights = np.eye(ontic)
    return problem, responses, weights


class TestTargetMatrix:
    def test_mixed_row(self):
        T = target_matrix([Z0, Z1, PLUS], [Z0])
        assert np.allclose(T, [[1.0, 0.0, 0.5]], atol=1e-12)

    def test_diagonal_identity(self):
        states = [random_pure_state(3, s) for s in range(3)]
        T = target_matrix(states, states)
        assert np.allclose(np.diag(T), 1.0, atol=1e-12)

    def test_recompute_oracle(self):
        states = [random_pure_state(4, s) for s in range(5)]
        effects = [random_pure_state(4, 100 + s) for s in range(7)]
        T = target_matrix(states, effects)
        for j, phi in enumerate(effects):
            for i, psi in enumerate(states):
                assert abs(T[j, i] - born_probability(psi, phi)) < 1e-12

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="dimension"):
            target_matrix([Z0], [basis_state(3, 0)])

    def test_problem_rejects_foreign_targets(self):
        with pytest.raises(ValueError, match="disagree"):
            FeasibilityProblem(
                dim=2, states=(Z0, Z1), effects=(Z0,), ontic_size=2,
                targets=np.array([[0.3, 0.3]]),
            )


class TestSolveRho:
    def test_single_point_conflict_is_infeasible(self):
        problem = FeasibilityProblem.build([Z0, Z1], [Z0], 1)
        responses = np.array([[1.0]])
        good = solve_rho(problem, responses, 0)
        assert good.status == "optimal"
        bad = solve_rho(problem, responses, 1)  # target 0 but response forced to 1
        assert bad.status == "infeasible"
        lp = LinearProgram(
            c=np.zeros(1), A=np.array([[1.0], [1.0]]), b=np.array([0.0, 1.0]),
            lower=np.zeros(1), upper=np.full(1, np.inf),
        )
        assert verify_certificate(lp, bad.certificate)

    def test_delta_responses_recover_indicator(self):
        problem, responses, _ = forward_instance(0)
        for i in range(problem.num_states):
            out = solve_rho(problem, responses, i)
            assert out.status == "optimal"
            assert np.abs(responses @ out.x - problem.targets[:, i]).max() < 1e-8

    def test_forward_generated_always_feasible(self):
        for seed in range(20):
            problem, responses, _ = forward_instance(seed)
            out = solve_rho(problem, responses, seed % problem.num_states)
            assert out.status == "optimal"


class TestSolveResponses:
    def test_indicator_weights_return_targets(self):
        problem, _, weights = forward_instance(1)
        out = solve_responses(problem, weights)
        assert out.status == "optimal"
        assert np.abs(out.x @ weights - problem.targets).max() < 1e-8

    def test_identical_mixtures_with_distinct_targets_infeasible(self):
        problem = FeasibilityProblem.build([Z0, Z1], [Z0], 2)
        weights = np.full((2, 2), 0.5)  # both states prepare the same mixture
        out = solve_responses(problem, weights)
        assert out.status == "infeasible"
        assert out.certificate is not None

    def test_forward_generated_always_feasible(self):
        for seed in range(20):
            problem, _, weights = forward_instance(seed + 50)
            out = solve_responses(problem, weights)
            assert out.status == "optimal"
            assert np.abs(out.x @ weights - problem.targets).max() < 1e-8


class TestAlternateSearch:
    def test_delta_initialization_is_exact_at_iteration_zero(self):
        states = [random_pure_state(3, s) for s in range(4)]
        effects = [random_pure_state(3, 70 + s) for s in range(5)]
        problem = FeasibilityProblem.build(states, effects, 4)  # K == S
        report = alternate_search(problem, restarts=1, max_iters=5, seed=0)
        assert report.residual_traces[0][0] < 1e-12
        assert report.best_residual < 1e-12

    def test_single_point_minimax_value(self):
        # K = 1 on targets {1, 0}: best response 0.5 splits the difference
        problem = FeasibilityProblem.build([Z0, Z1], [Z0], 1)
        report = alternate_search(problem, restarts=4, max_iters=20, seed=3)
        assert report.best_residual == pytest.approx(0.5, abs=1e-9)

    def test_traces_nonincreasing_within_each_restart(self):
        states = [random_pure_state(2, s) for s in range(4)]
        effects = [random_pure_state(2, 200 + s) for s in range(3)]
        problem = FeasibilityProblem.build(states, effects, 2)
        report = alternate_search(problem, restarts=6, max_iters=15, seed=9)
        for trace in report.residual_traces:
            diffs = np.diff(np.asarray(trace))
            assert np.all(diffs <= 1e-12)

    def test_deterministic_for_fixed_seed(self):
        problem, _, _ = forward_instance(7, ontic=3)
        a = alternate_search(problem, restarts=3, max_iters=10, seed=11)
        b = alternate_search(problem, restarts=3, max_iters=10, seed=11)
        assert a.best_residual == b.best_residual
        assert np.array_equal(a.best_weights, b.best_weights)
        assert np.array_equal(a.best_responses, b.best_responses)
        assert a.residual_traces == b.residual_traces

    def test_feasible_pair_satisfies_model_constraints(self):
        problem, _, _ = forward_instance(3, ontic=4)
        report = alternate_search(problem, restarts=3, max_iters=20, seed=1)
        rho, P = report.best_weights, report.best_responses
        assert rho.min() >= -1e-9
        assert np.abs(rho.sum(axis=0) - 1.0).max() < 1e-8
        assert P.min() >= -1e-9 and P.max() <= 1.0 + 1e-9
        assert np.abs(P @ rho - problem.targets).max() <= report.best_residual + 1e-10

    def test_restarts_must_be_positive(self):
        problem = FeasibilityProblem.build([Z0, Z1], [Z0], 1)
        with pytest.raises(ValueError, match="restarts"):
            alternate_search(problem, restarts=0, max_iters=5, seed=0)

    def test_input_validation(self):
        problem = FeasibilityProblem.build([Z0, Z1], [Z0], 2)
        with pytest.raises(ValueError, match="shape"):
            solve_rho(problem, np.ones((2, 2)), 0)
        with pytest.raises(ValueError, match="lie in"):
            solve_rho(problem, np.full((1, 2), 1.5), 0)
        with pytest.raises(ValueError, match="sum"):
            solve_responses(problem, np.full((2, 2), 0.3))
