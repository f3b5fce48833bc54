import numpy as np
import pytest

from onticlab.feasopt import _simplex_py
from onticlab.feasopt.linprog import (
    LinearProgram,
    SimplexError,
    simplex_solve,
    verify_certificate,
)

try:
    from onticlab.feasopt import _simplex_cy
except ImportError:
    _simplex_cy = None

try:
    from scipy.optimize import linprog as scipy_linprog
except ImportError:
    scipy_linprog = None


def test_trivial_equality():
    lp = LinearProgram(c=[0.0], A=[[1.0]], b=[3.0], lower=[0.0], upper=[10.0])
    out = simplex_solve(lp)
    assert out.status == "optimal"
    assert out.x[0] == pytest.approx(3.0, abs=1e-8)
    assert out.certificate is None


def test_infeasible_sign_conflict():
    lp = LinearProgram(c=[0.0], A=[[1.0]], b=[-1.0], lower=[0.0], upper=[np.inf])
    out = simplex_solve(lp)
    assert out.status == "infeasible"
    assert out.x is None
    assert verify_certificate(lp, out.certificate)


def test_zero_vector_is_no_certificate():
    lp = LinearProgram(c=[0.0], A=[[1.0]], b=[-1.0], lower=[0.0], upper=[np.inf])
    assert not verify_certificate(lp, np.zeros(1))


def test_perturbed_certificate_fails_on_crafted_instance():
    # x >= 0 unbounded above with rows x = 1 and x = 0: y = (1, -1) certifies,
    # but adding 1.0 to the first entry pushes z = A^T y out of the cone.
    lp = LinearProgram(
        c=[0.0], A=[[1.0], [1.0]], b=[1.0, 0.0], lower=[0.0], upper=[np.inf]
    )
    y = np.array([1.0, -1.0])
    assert verify_certificate(lp, y)
    assert not verify_certificate(lp, y + np.array([1.0, 0.0]))


def test_solver_certificate_on_bounded_conflict():
    # single variable in [0, 1] required to equal 1, 0 and 0.5 at once
    lp = LinearProgram(
        c=[0.0], A=[[1.0], [1.0], [1.0]], b=[1.0, 0.0, 0.5], lower=[0.0], upper=[1.0]
    )
    out = simplex_solve(lp)
    assert out.status == "infeasible"
    assert verify_certificate(lp, out.certificate)


def test_unbounded():
    lp = LinearProgram(
        c=[-1.0, 0.0], A=[[1.0, -1.0]], b=[0.0], lower=[0.0, 0.0], upper=[np.inf, np.inf]
    )
    out = simplex_solve(lp)
    assert out.status == "unbounded"
    assert out.x is None and out.certificate is None


def test_beale_cycling_instance_terminates():
    # classic degenerate instance that cycles without an anti-cycling rule
    c = np.concatenate([[-0.75, 150.0, -0.02, 6.0], np.zeros(3)])
    A = np.hstack(
        [
            np.array(
                [
                    [0.25, -60.0, -1.0 / 25.0, 9.0],
                    [0.5, -90.0, -1.0 / 50.0, 3.0],
                    [0.0, 0.0, 1.0, 0.0],
                ]
            ),
            np.eye(3),
        ]
    )
    lp = LinearProgram(
        c=c, A=A, b=[0.0, 0.0, 1.0], lower=np.zeros(7), upper=np.full(7, np.inf)
    )
    out = simplex_solve(lp)
    assert out.status == "optimal"
    assert out.objective == pytest.approx(-0.05, abs=1e-9)


def _random_feasible_lp(rng):
    m, n = int(rng.integers(1, 6)), int(rng.integers(1, 9))
    A = rng.normal(size=(m, n))
    lo = np.where(rng.random(n) < 0.7, 0.0, -np.inf)
    hi = np.where(rng.random(n) < 0.5, rng.uniform(0.5, 3.0, n), np.inf)
    lo = np.minimum(lo, hi - 0.1)
    x0 = np.clip(
        rng.normal(size=n),
        np.where(np.isfinite(lo), lo, -2.0),
        np.where(np.isfinite(hi), hi, 2.0),
    )
    return LinearProgram(c=rng.normal(size=n), A=A, b=A @ x0, lower=lo, upper=hi)


def test_constructed_feasible_round_trip():
    rng = np.random.default_rng(1)
    for _ in range(150):
        lp = _random_feasible_lp(rng)
        out = simplex_solve(lp)
        assert out.status in ("optimal", "unbounded")
        if out.status == "optimal":
            assert np.abs(lp.A @ out.x - lp.b).max() < 1e-8
            assert np.all(out.x >= lp.lower - 1e-8)
            assert np.all(out.x <= lp.upper + 1e-8)


@pytest.mark.skipif(scipy_linprog is None, reason="scipy not installed")
def test_against_scipy_oracle():
    rng = np.random.default_rng(2)
    for _ in range(100):
        lp = _random_feasible_lp(rng)
        out = simplex_solve(lp)
        ref = scipy_linprog(
            lp.c, A_eq=lp.A, b_eq=lp.b, bounds=list(zip(lp.lower, lp.upper)),
            method="highs",
        )
        if out.status == "optimal":
            assert ref.success
            assert out.objective == pytest.approx(ref.fun, abs=1e-6, rel=1e-6)
        elif out.status == "unbounded":
            assert ref.status == 3


def test_contradictory_rows_certified():
    rng = np.random.default_rng(3)
    for _ in range(100):
        n = int(rng.integers(1, 7))
        row = rng.normal(size=n)
        A = np.vstack([row, rng.normal(size=(1, n)), row])
        b = np.array([0.5, float(rng.normal()), 1.5])  # row repeated, rhs differs
        lp = LinearProgram(
            c=np.zeros(n), A=A, b=b, lower=np.zeros(n), upper=np.full(n, np.inf)
        )
        out = simplex_solve(lp)
        if out.status == "infeasible":
            assert verify_certificate(lp, out.certificate)
            assert out.x is None
        else:
            assert out.status in ("optimal", "unbounded")


def test_never_solution_and_certificate_together():
    lp_feasible = LinearProgram(c=[1.0], A=[[1.0]], b=[2.0], lower=[0.0], upper=[np.inf])
    lp_infeasible = LinearProgram(c=[1.0], A=[[1.0]], b=[-2.0], lower=[0.0], upper=[np.inf])
    for lp in (lp_feasible, lp_infeasible):
        out = simplex_solve(lp)
        assert (out.x is None) != (out.status == "optimal")
        assert (out.certificate is None) != (out.status == "infeasible")


def test_validation_errors():
    with pytest.raises(ValueError, match="shape"):
        LinearProgram(c=[1.0, 2.0], A=[[1.0]], b=[1.0], lower=[0.0, 0.0], upper=[1.0, 1.0])
    with pytest.raises(ValueError, match="lower bound exceeds"):
        LinearProgram(c=[1.0], A=[[1.0]], b=[1.0], lower=[2.0], upper=[1.0])
    with pytest.raises(ValueError, match="finite"):
        LinearProgram(c=[np.nan], A=[[1.0]], b=[1.0], lower=[0.0], upper=[1.0])


def test_free_variable_handling():
    # free variable solved through the split representation
    lp = LinearProgram(
        c=[1.0, 0.0],
        A=[[1.0, 1.0]],
        b=[0.0],
        lower=[-np.inf, 0.0],
        upper=[np.inf, 5.0],
    )
    out = simplex_solve(lp)
    assert out.status in ("optimal", "unbounded")
    # minimizing x0 with x0 = -x1 and x1 <= 5 pins x0 = -5
    assert out.status == "optimal"
    assert out.x[0] == pytest.approx(-5.0, abs=1e-8)


@pytest.mark.skipif(_simplex_cy is None, reason="compiled kernel not built")
def test_kernel_equivalence():
    rng = np.random.default_rng(4)
    for _ in range(200):
        m, n = int(rng.integers(1, 8)), int(rng.integers(1, 14))
        A = rng.normal(size=(m, n))
        b = np.abs(rng.normal(size=m))
        c = rng.normal(size=n)
        res_py = _simplex_py.solve_standard_form(A, b, c)
        res_cy = _simplex_cy.solve_standard_form(A, b, c)
        assert res_py[0] == res_cy[0]
        assert res_py[3] == res_cy[3]
        if res_py[0] == _simplex_py.OPTIMAL:
            assert np.abs(res_py[1] - res_cy[1]).max() < 1e-12
        if res_py[0] == _simplex_py.INFEASIBLE:
            assert np.abs(res_py[2] - res_cy[2]).max() < 1e-12


def test_ill_conditioned_raises_simplex_error():
    # unsolvable within one pivot because the kernel is capped at one iteration
    lp = LinearProgram(
        c=[-1.0, -1.0],
        A=[[1.0, 2.0], [2.0, 1.0]],
        b=[1.0, 1.0],
        lower=[0.0, 0.0],
        upper=[1.0, 1.0],
    )
    from onticlab.feasopt import kernel

    original = kernel.solve_standard_form

    def capped(A, b, c, pivot_tol=1e-10, feas_tol=1e-8, max_iter=0):
        return original(A, b, c, pivot_tol, feas_tol, max_iter=1)

    from onticlab.feasopt import linprog as linprog_mod

    saved = linprog_mod.kernel.solve_standard_form
    linprog_mod.kernel.solve_standard_form = capped
    try:
        with pytest.raises(SimplexError, match="ill-conditioned"):
            simplex_solve(lp)
    finally:
        linprog_mod.kernel.solve_standard_form = saved
