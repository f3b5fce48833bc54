"""Command-line front end, file formats and report generation.

Documents are JSON: complex amplitudes are two-element [re, im] arrays,
state/effect vectors live under unique names, and free-form options carry
per-command settings (seed, tolerances, lattice sizes...).  Command-line
flags override document options, which override built-in defaults; the
resolved values are echoed in the report.  Reports are printed as sorted
JSON, so a rerun with the same document, flags and seed is byte-identical.
Exit codes: 0 all checks pass, 1 a check failed, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from . import __version__, bellchsh, dwigner, onto, qcore
from .feasopt import (
    BACKEND,
    FeasibilityProblem,
    RaySet,
    alternate_search,
    ks_assignment_count,
    solve_responses,
    validate_ray_set,
    verify_certificate,
)
from .feasopt.linprog import LinearProgram

COMMANDS = ("verify-model", "theorem-check", "feasibility", "ks-search", "chsh", "wigner", "bohm")

DEFAULTS = {
    "seed": 0,
    "tol": None,  # per-command fallback applied at resolution time
    "ontic_size": 1,
    "restarts": 20,
    "lattice": 200000,
    "grid": 1000,
    "model": "delta",
    "coarse_steps": 12,
    "refine_iters": 4,
    "max_iters": 25,
}


class DocumentError(ValueError):
    """Malformed document: syntax or content."""


@dataclass(frozen=True)
class ProblemDocument:
    """Parsed problem file: named states/effects plus free-form options."""

    dim: int
    states: dict[str, qcore.PureState]
    effects: dict[str, qcore.PureState]
    options: dict
    original_norms: dict[str, float] = field(default_factory=dict)


def _reject_duplicate_keys(pairs):
    d = {}
    for key, value in pairs:
        if key in d:
            raise DocumentError(f"duplicate name {key!r} in document")
        d[key] = value
    return d


def _load_json(text: str) -> dict:
    try:
        return json.loads(text, object_pairs_hook=_reject_duplicate_keys)
    except json.JSONDecodeError as exc:
        raise DocumentError(
            f"malformed document at line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from exc


def _decode_amplitude(entry, where: str) -> complex:
    if isinstance(entry, (int, float)):
        return complex(entry)
    if isinstance(entry, list) and len(entry) == 2 and all(
        isinstance(x, (int, float)) for x in entry
    ):
        return complex(entry[0], entry[1])
    raise DocumentError(f"{where}: amplitudes must be numbers or [re, im] pairs")


def _decode_vectors(section, dim: int, kind: str, norms: dict[str, float]):
    out: dict[str, qcore.PureState] = {}
    for name, vec in (section or {}).items():
        if not isinstance(vec, list):
            raise DocumentError(f"{kind} {name!r} must be a list of amplitudes")
        amps = np.array([_decode_amplitude(x, f"{kind} {name!r}") for x in vec])
        if amps.size != dim:
            raise DocumentError(f"{kind} {name!r} has length {amps.size}, expected dim {dim}")
        norm = float(np.linalg.norm(amps))
        if norm < 1e-9:
            raise DocumentError(f"{kind} {name!r} has degenerate norm {norm:.3e}")
        norms[f"{kind}:{name}"] = norm
        out[name] = qcore.PureState(amps)
    return out


def parse_problem(text: str) -> ProblemDocument:
    """Parse a problem document; vectors are normalized with their original
    norms recorded.  Raises DocumentError with a line position on bad
    syntax and names the offending entry on content errors."""
    doc = _load_json(text)
    if not isinstance(doc, dict) or "dim" not in doc:
        raise DocumentError("document must be a JSON object with a 'dim' entry")
    dim = doc["dim"]
    if not isinstance(dim, int) or dim < 2:
        raise DocumentError(f"dim must be an integer >= 2, got {dim!r}")
    norms: dict[str, float] = {}
    states = _decode_vectors(doc.get("states"), dim, "state", norms)
    effects = _decode_vectors(doc.get("effects"), dim, "effect", norms)
    options = doc.get("options") or {}
    if not isinstance(options, dict):
        raise DocumentError("options must be a JSON object")
    return ProblemDocument(
        dim=dim, states=states, effects=effects, options=options, original_norms=norms
    )


def parse_ray_document(text: str) -> RaySet:
    """Parse a ray-set document: dim, rays (component vectors, scalar or
    [re, im] entries), bases (index lists).  Rays are normalized on load;
    ``validate_ray_set`` re-establishes correctness at runtime."""
    doc = _load_json(text)
    for key in ("dim", "rays", "bases"):
        if key not in doc:
            raise DocumentError(f"ray document is missing {key!r}")
    dim = int(doc["dim"])
    rays = []
    for idx, vec in enumerate(doc["rays"]):
        amps = np.array([_decode_amplitude(x, f"ray {idx}") for x in vec])
        norm = float(np.linalg.norm(amps))
        if norm < 1e-9:
            raise DocumentError(f"ray {idx} has degenerate norm {norm:.3e}")
        rays.append(amps / norm)
    bases = tuple(tuple(int(i) for i in group) for group in doc["bases"])
    return RaySet(dim=dim, rays=tuple(rays), bases=bases)


# --- report plumbing -------------------------------------------------------


def _digest(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def _py(value):
    """Convert numpy scalars/arrays into JSON-serializable python values."""
    if isinstance(value, (np.floating, np.integer, np.bool_)):
        return value.item()
    if isinstance(value, np.ndarray):
        return [_py(v) for v in value]
    if isinstance(value, dict):
        return {k: _py(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_py(v) for v in value]
    return value


@dataclass(frozen=True)
class RunReport:
    """Everything a rerun needs: command, resolved options, input digest,
    numeric results, and pass/fail flags for the declared checks."""

    command: str
    options: dict
    input_digest: str
    results: dict
    checks: dict

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_json(self) -> str:
        payload = {
            "command": self.command,
            "options": _py(self.options),
            "input_digest": self.input_digest,
            "results": _py(self.results),
            "checks": _py(self.checks),
            "passed": self.passed,
            "version": __version__,
            "kernel_backend": BACKEND,
        }
        return json.dumps(payload, sort_keys=True, indent=1)


def _fmt(x: float) -> str:
    return "%.17g" % float(x)


def _write_csv(path: str, header: list[str], rows: list[list]) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) if isinstance(v, float) else str(v) for v in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _resolve(flags: dict, options: dict, **defaults):
    """flag > document option > default, echoing every resolved value."""
    resolved = {}
    for key, fallback in defaults.items():
        if flags.get(key) is not None:
            resolved[key] = flags[key]
        elif key in options:
            resolved[key] = options[key]
        else:
            resolved[key] = fallback
    return resolved


# --- commands --------------------------------------------------------------


def _build_model(doc: ProblemDocument, opts: dict, text: str | None = None):
    states = list(doc.states.values())
    kind = opts["model"]
    if kind == "delta":
        return onto.delta_model(states)
    if kind == "ks":
        return onto.ks_model_qubit(int(opts["lattice"]))
    if kind == "bell":
        return onto.bell_model_qubit(states, int(opts["grid"]))
    if kind == "tabulated":
        # the document itself is an exported model (weights/responses tables)
        if text is None:
            raise DocumentError("tabulated model needs the raw document")
        raw = _load_json(text)
        for key in ("ontic_labels", "weights", "responses"):
            if key not in raw:
                raise DocumentError(f"tabulated model document is missing {key!r}")
        return onto.model_from_document(raw)
    raise DocumentError(f"unknown model {kind!r} (expected delta, ks, bell or tabulated)")


def _cmd_verify_model(doc: ProblemDocument, flags: dict) -> RunReport:
    opts = _resolve(flags, doc.options, model=DEFAULTS["model"], lattice=DEFAULTS["lattice"],
                    grid=DEFAULTS["grid"], tol=None)
    tol = opts["tol"] = float(opts["tol"]) if opts["tol"] is not None else (
        2e-3 if opts["model"] == "ks" else 1e-12
    )
    model = _build_model(doc, opts, text=flags.get("_text"))
    residual = 0.0
    rows = []
    for sname, psi in doc.states.items():
        for ename, phi in doc.effects.items():
            p = onto.predict(model, psi, phi)
            target = qcore.born_probability(psi, phi)
            residual = max(residual, abs(p - target))
            rows.append([sname, ename, float(p), float(target), float(abs(p - target))])
    results = {
        "model": opts["model"],
        "ontic_size": model.ontic.size,
        "max_born_residual": residual,
        "pairs": len(rows),
    }
    if flags.get("out"):
        _write_csv(flags["out"], ["state", "effect", "predicted", "born", "abs_error"], rows)
    if flags.get("export_model"):
        with open(flags["export_model"], "w") as fh:
            json.dump(onto.model_to_document(model, doc.states, doc.effects), fh, sort_keys=True)
    return RunReport(
        command="verify-model",
        options=opts,
        input_digest=flags["digest"],
        results=results,
        checks={"born_reproduced_within_tol": residual < tol},
    )


def _cmd_theorem_check(doc: ProblemDocument, flags: dict) -> RunReport:
    opts = _resolve(flags, doc.options, model=DEFAULTS["model"], lattice=2000, tol=None)
    tol = opts["tol"] = float(opts["tol"]) if opts["tol"] is not None else 1e-9
    model = _build_model(doc, opts)
    prepared = list(doc.states.values())
    ic = list(doc.effects.values())
    report = onto.theorem_structure_check(model, prepared, ic)
    results = {
        "born_residual": report.born_residual,
        "reconstruction_residual": report.reconstruction_residual,
        "max_proportionality_deviation": report.max_proportionality_deviation,
        "max_lambda_mean_residual": report.max_lambda_mean_residual,
        "born_response_residual": report.born_response_residual,
        "supports_disjoint": report.supports_disjoint,
        "support_violation_count": report.support_violation_count,
    }
    if opts["model"] == "ks":
        # the d = 2 exception: overlapping supports are the expected outcome
        checks = {"supports_overlap": not report.supports_disjoint}
    else:
        checks = {
            "reconstruction_within_tol": report.reconstruction_residual < tol,
            "lambda_factors_unit": report.max_proportionality_deviation < tol
            and report.max_lambda_mean_residual < tol,
            "supports_disjoint": report.supports_disjoint,
        }
    return RunReport(
        command="theorem-check",
        options=opts,
        input_digest=flags["digest"],
        results=results,
        checks=checks,
    )


def _cmd_feasibility(doc: ProblemDocument, flags: dict) -> RunReport:
    opts = _resolve(flags, doc.options, ontic_size=DEFAULTS["ontic_size"],
                    restarts=DEFAULTS["restarts"], seed=DEFAULTS["seed"],
                    max_iters=DEFAULTS["max_iters"], tol=None)
    opts["tol"] = float(opts["tol"]) if opts["tol"] is not None else 1e-8
    K = int(opts["ontic_size"])
    states = list(doc.states.values())
    effects = list(doc.effects.values())
    problem = FeasibilityProblem.build(states, effects, K)
    report = alternate_search(
        problem, restarts=int(opts["restarts"]), max_iters=int(opts["max_iters"]),
        seed=int(opts["seed"]),
    )
    results = {
        "ontic_size": K,
        "best_residual": report.best_residual,
        "best_restart": report.best_restart,
        "iterations": list(report.iterations),
    }
    checks = {}
    if K == 1:
        # rho is forced to the unit column, so the LP verdict is exact
        outcome = solve_responses(problem, np.ones((1, problem.num_states)))
        results["lp_status"] = outcome.status
        if outcome.status == "infeasible":
            E, S = problem.num_effects, problem.num_states
            lp = LinearProgram(
                c=np.zeros(E), A=np.kron(np.eye(E), np.ones((S, 1))).reshape(E * S, E),
                b=problem.targets.reshape(-1), lower=np.zeros(E), upper=np.ones(E),
            )
            results["certificate"] = list(outcome.certificate)
            checks["certificate_verified"] = verify_certificate(lp, outcome.certificate)
    if flags.get("out"):
        rows = [
            [r, len(trace) - 1, float(trace[-1])]
            for r, trace in enumerate(report.residual_traces)
        ]
        _write_csv(flags["out"], ["restart", "half_steps", "final_residual"], rows)
    checks["search_completed"] = True
    return RunReport(
        command="feasibility",
        options=opts,
        input_digest=flags["digest"],
        results=results,
        checks=checks,
    )


def _cmd_ks_search(text: str, flags: dict) -> RunReport:
    rayset = parse_ray_document(text)
    validation = validate_ray_set(rayset)
    results = {
        "dim": rayset.dim,
        "num_rays": rayset.num_rays,
        "num_bases": len(rayset.bases),
        "violations": list(validation.violations),
    }
    checks = {"ray_set_valid": validation.ok}
    if validation.ok:
        count, assignments = ks_assignment_count(rayset)
        results["assignment_count"] = count
        results["assignments_recorded"] = assignments is not None
        if flags.get("out") and assignments is not None:
            rows = [[i] + list(a) for i, a in enumerate(assignments)]
            header = ["assignment"] + [f"ray_{r}" for r in range(rayset.num_rays)]
            _write_csv(flags["out"], header, rows)
    return RunReport(
        command="ks-search",
        options={},
        input_digest=flags["digest"],
        results=results,
        checks=checks,
    )


def _angles(v: np.ndarray) -> tuple[float, float]:
    return float(np.arccos(np.clip(v[2], -1, 1))), float(np.arctan2(v[1], v[0]))


def _cmd_chsh(doc: ProblemDocument, flags: dict) -> RunReport:
    opts = _resolve(flags, doc.options, coarse_steps=DEFAULTS["coarse_steps"],
                    refine_iters=DEFAULTS["refine_iters"], seed=DEFAULTS["seed"], tol=None)
    opts["tol"] = float(opts["tol"]) if opts["tol"] is not None else 1e-6
    tsirelson = 2.0 * math.sqrt(2.0)
    rows = []
    per_state = {}
    ok_bound = True
    ok_tsirelson = True
    for name, psi in doc.states.items():
        bound = bellchsh.horodecki_max(psi)
        value, setting = bellchsh.chsh_grid_max(
            psi, int(opts["coarse_steps"]), int(opts["refine_iters"]), int(opts["seed"])
        )
        ok_bound &= value <= bound + opts["tol"]
        ok_tsirelson &= value <= tsirelson + 1e-9
        per_state[name] = {"grid_max": value, "horodecki_bound": bound}
        angles = []
        for vec in (setting.a, setting.a_prime, setting.b, setting.b_prime):
            angles.extend(_angles(vec.components))
        rows.append([name] + [float(a) for a in angles] + [float(value), float(bound)])
    if flags.get("out"):
        header = ["state", "a_polar", "a_azimuth", "ap_polar", "ap_azimuth",
                  "b_polar", "b_azimuth", "bp_polar", "bp_azimuth",
                  "chsh_value", "horodecki_bound"]
        _write_csv(flags["out"], header, rows)
    return RunReport(
        command="chsh",
        options=opts,
        input_digest=flags["digest"],
        results={"states": per_state, "tsirelson": tsirelson},
        checks={
            "grid_below_horodecki": ok_bound,
            "below_tsirelson": ok_tsirelson,
        },
    )


def _cmd_wigner(doc: ProblemDocument, flags: dict) -> RunReport:
    opts = _resolve(flags, doc.options, tol=None)
    opts["tol"] = float(opts["tol"]) if opts["tol"] is not None else 1e-10
    tol = opts["tol"]
    pps = dwigner.phase_point_operators(doc.dim)
    per_state = {}
    rows = []
    ok = True
    for name, psi in doc.states.items():
        proj = qcore.Projector.from_state(psi)
        op = qcore.HermitianOperator(proj.matrix)
        table = dwigner.wigner(op, pps)
        neg = dwigner.negativity(table)
        row_marg = table.values.sum(axis=1)
        born_rows = np.array(
            [qcore.born_probability(psi, qcore.basis_state(doc.dim, q)) for q in range(doc.dim)]
        )
        rec = dwigner.reconstruct_from_wigner(table, pps)
        round_trip = float(np.abs(rec.matrix - op.matrix).max())
        marg_err = float(np.abs(row_marg - born_rows).max())
        sum_err = float(abs(table.values.sum() - 1.0))
        ok &= sum_err < tol and marg_err < tol and round_trip < tol
        per_state[name] = {
            "sum": float(table.values.sum()),
            "min_entry": float(table.values.min()),
            "negativity": neg,
            "row_marginal_error": marg_err,
            "round_trip_error": round_trip,
        }
        for q in range(doc.dim):
            rows.append([name, str(q)] + [float(v) for v in table.values[q]])
        summary = [float(table.values.sum()), float(table.values.min()), neg]
        rows.append([name, "summary"] + summary + [""] * (doc.dim - 3))
    if flags.get("out"):
        header = ["state", "q"] + [f"p{p}" for p in range(doc.dim)]
        _write_csv(flags["out"], header, rows)
    return RunReport(
        command="wigner",
        options=opts,
        input_digest=flags["digest"],
        results={"dim": doc.dim, "states": per_state},
        checks={"table_invariants": bool(ok)},
    )


def _cmd_bohm(doc: ProblemDocument, flags: dict) -> RunReport:
    params = doc.options.get("bohm")
    if not isinstance(params, dict):
        raise DocumentError("bohm command needs an options.bohm object in the document")
    if "gaussian" in params:
        g = params["gaussian"]
        xs = np.linspace(float(g["xmin"]), float(g["xmax"]), int(g["points"]))
        mean, sigma = float(g.get("mean", 0.0)), float(g.get("sigma", 1.0))
        density = np.exp(-((xs - mean) ** 2) / (2 * sigma**2)) / (sigma * math.sqrt(2 * math.pi))
    elif "xs" in params and "density" in params:
        xs = np.asarray(params["xs"], dtype=float)
        density = np.asarray(params["density"], dtype=float)
    else:
        raise DocumentError("options.bohm needs either a 'gaussian' block or xs/density arrays")
    region = params.get("region")
    if not (isinstance(region, list) and len(region) == 2):
        raise DocumentError("options.bohm.region must be [a, b]")
    result = onto.bohm_region_probability(xs, density, (float(region[0]), float(region[1])))
    results = {
        "region": [float(region[0]), float(region[1])],
        "probability": result.value,
        "clipped": result.clipped,
        "grid_points": int(xs.size),
    }
    checks = {}
    if "expected" in params:
        tol = float(params.get("tol", 1e-4))
        results["expected"] = float(params["expected"])
        checks["matches_expected"] = abs(result.value - float(params["expected"])) < tol
    checks["region_inside_grid"] = not result.clipped
    if flags.get("out"):
        _write_csv(flags["out"], ["a", "b", "probability"],
                   [[float(region[0]), float(region[1]), result.value]])
    return RunReport(
        command="bohm",
        options=_resolve(flags, doc.options),
        input_digest=flags["digest"],
        results=results,
        checks=checks,
    )


def run(command: str, document_text: str, flags: dict) -> RunReport:
    """Dispatch one command against a parsed document; returns the report."""
    if command not in COMMANDS:
        raise DocumentError(f"unknown command {command!r}")
    flags = dict(flags)
    flags["digest"] = _digest(document_text)
    flags["_text"] = document_text
    if command == "ks-search":
        return _cmd_ks_search(document_text, flags)
    doc = parse_problem(document_text)
    handler = {
        "verify-model": _cmd_verify_model,
        "theorem-check": _cmd_theorem_check,
        "feasibility": _cmd_feasibility,
        "chsh": _cmd_chsh,
        "wigner": _cmd_wigner,
        "bohm": _cmd_bohm,
    }[command]
    return handler(doc, flags)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="onticlab",
        description="Numerical laboratory for ontological models of finite quantum systems",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("document", help="path to a JSON problem or ray document")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--tol", type=float, default=None)
    parser.add_argument("--ontic-size", dest="ontic_size", type=int, default=None)
    parser.add_argument("--restarts", type=int, default=None)
    parser.add_argument("--lattice", type=int, default=None)
    parser.add_argument("--out", default=None, help="write tabular results as CSV")
    parser.add_argument("--export-model", dest="export_model", default=None,
                        help="verify-model: write the tabulated model document here")
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        with open(args.document) as fh:
            text = fh.read()
    except OSError as exc:
        print(f"error: cannot read document: {exc}", file=sys.stderr)
        return 2
    flags = {
        "seed": args.seed,
        "tol": args.tol,
        "ontic_size": args.ontic_size,
        "restarts": args.restarts,
        "lattice": args.lattice,
        "out": args.out,
        "export_model": args.export_model,
    }
    try:
        report = run(args.command, text, flags)
    except DocumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(report.to_json())
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
