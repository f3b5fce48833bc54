"""Benchmark the compiled simplex kernel against the pure-numpy fallback.

Times the exact standard-form systems the alternation search generates for
the bundled MUB-9 problem (both half-step families plus the whole-response
feasibility LP), then one macro run of ``alternate_search`` per backend.
Both kernels execute the same pivot sequence, so the check column also
confirms the results agree bit-for-bit in status and iteration count.

Usage: python benchmarks/bench_simplex.py [--repeats 30]
"""

from __future__ import annotations

import argparse
import time
from importlib import resources

import numpy as np

from onticlab.cli import parse_problem
from onticlab.feasopt import FeasibilityProblem, alternate_search
from onticlab.feasopt import _simplex_py
from onticlab.feasopt import linprog as linprog_mod
from onticlab.feasopt.linprog import LinearProgram, _standardize

try:
    from onticlab.feasopt import _simplex_cy
except ImportError:
    _simplex_cy = None


def _mub_problem(ontic_size: int) -> FeasibilityProblem:
    text = resources.files("onticlab.data").joinpath("mub9_d3.json").read_text()
    doc = parse_problem(text)
    return FeasibilityProblem.build(
        list(doc.states.values()), list(doc.effects.values()), ontic_size
    )


def _minimax_lp(M: np.ndarray, target: np.ndarray, var_upper: float, simplex_row: bool):
    m, nv = M.shape
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
    return LinearProgram(c=c, A=A, b=b, lower=lower, upper=upper)


def _instances():
    problem = _mub_problem(6)
    rng = np.random.default_rng(0)
    rho = rng.dirichlet(np.ones(6), size=9).T
    responses = rng.uniform(size=(9, 6))
    yield "response half-step (K=6)", _minimax_lp(rho.T, problem.targets[0], 1.0, False)
    yield "weight half-step (K=6)", _minimax_lp(responses, problem.targets[:, 0], np.inf, True)

    big = _mub_problem(9)
    E, S, K = 9, 9, 9
    A = np.zeros((E * S, E * K))
    for j in range(E):
        A[j * S:(j + 1) * S, j * K:(j + 1) * K] = np.eye(K)
    yield "full response system (81 vars)", LinearProgram(
        c=np.zeros(E * K),
        A=A,
        b=big.targets.reshape(-1),
        lower=np.zeros(E * K),
        upper=np.ones(E * K),
    )


def _time_kernel(kernel, A, b, c, repeats: int):
    best = np.inf
    result = None
    for _ in range(repeats):
        start = time.perf_counter()
        result = kernel.solve_standard_form(A, b, c)
        best = min(best, time.perf_counter() - start)
    return best, result


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=30)
    args = parser.parse_args()

    if _simplex_cy is None:
        print("compiled kernel is not built; run `pip install -e .` first")
        return 1

    print(f"{'instance':36s} {'size':>9s} {'python':>10s} {'cython':>10s} "
          f"{'speedup':>8s}  match")
    for name, lp in _instances():
        A, b, c, *_ = _standardize(lp)
        t_py, r_py = _time_kernel(_simplex_py, A, b, c, args.repeats)
        t_cy, r_cy = _time_kernel(_simplex_cy, A, b, c, args.repeats)
        same = r_py[0] == r_cy[0] and r_py[3] == r_cy[3]
        size = f"{A.shape[0]}x{A.shape[1]}"
        print(
            f"{name:36s} {size:>9s} {t_py * 1e3:8.3f}ms {t_cy * 1e3:8.3f}ms "
            f"{t_py / t_cy:7.1f}x  {same}"
        )

    problem = _mub_problem(6)
    saved = linprog_mod.kernel.solve_standard_form
    macro = {}
    for label, kernel in (("python", _simplex_py), ("cython", _simplex_cy)):
        linprog_mod.kernel.solve_standard_form = kernel.solve_standard_form
        start = time.perf_counter()
        report = alternate_search(problem, restarts=5, max_iters=25, seed=0)
        macro[label] = (time.perf_counter() - start, report.best_residual)
    linprog_mod.kernel.solve_standard_form = saved
    print(
        f"\nalternate_search (MUB-9, K=6, 5 restarts): "
        f"python {macro['python'][0]:.2f}s, cython {macro['cython'][0]:.2f}s, "
        f"speedup {macro['python'][0] / macro['cython'][0]:.1f}x, "
        f"residuals match: {macro['python'][1] == macro['cython'][1]}"
    )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
