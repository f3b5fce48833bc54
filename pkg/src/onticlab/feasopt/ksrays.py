"""Noncontextual 0/1 assignments over shared-ray orthonormal bases.

A ray set bundles rays (stored raw, so validation can flag bad data) and
index groups that each name an orthonormal basis.  ``ks_assignment_count``
counts the dispersion-free valuations that mark exactly one ray per basis;
an empty count on a valid set witnesses contextuality.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ORTHO_ATOL = 1e-9


def _frozen(values, dtype) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class RaySet:
    """Rays in C^d plus bases given as index groups of size d.

    Ray vectors are kept exactly as supplied (no normalization), so a
    malformed file shows up in ``validate_ray_set`` instead of being
    silently repaired.
    """

    dim: int
    rays: tuple[np.ndarray, ...]
    bases: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        rays = tuple(_frozen(np.asarray(r, dtype=complex).reshape(-1), complex) for r in self.rays)
        for idx, r in enumerate(rays):
            if r.size != self.dim:
                raise ValueError(f"ray {idx} has length {r.size}, expected {self.dim}")
        bases = tuple(tuple(int(i) for i in group) for group in self.bases)
        for g, group in enumerate(bases):
            if len(group) != self.dim:
                raise ValueError(f"basis {g} has {len(group)} rays, expected {self.dim}")
            if len(set(group)) != len(group):
                raise ValueError(f"basis {g} repeats a ray index")
            if any(i < 0 or i >= len(rays) for i in group):
                raise ValueError(f"basis {g} references a ray index out of range")
        object.__setattr__(self, "rays", rays)
        object.__setattr__(self, "bases", bases)

    @property
    def num_rays(self) -> int:
        return len(self.rays)


@dataclass(frozen=True)
class RayValidationReport:
    violations: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_ray_set(rayset: RaySet) -> RayValidationReport:
    """Recompute norms and pairwise orthogonality; report every violation.

    Checks each ray for unit norm, each basis group for orthonormality
    within 1e-9, and that every ray is used by at least one group.
    Report-only: never raises.
    """
    violations: list[str] = []
    for idx, r in enumerate(rayset.rays):
        norm = float(np.linalg.norm(r))
        if abs(norm - 1.0) > ORTHO_ATOL:
            violations.append(f"ray {idx} has norm {norm:.6g}, expected 1")
    used = set()
    for g, group in enumerate(rayset.bases):
        used.update(group)
        for a_pos, a in enumerate(group):
            for b in group[a_pos + 1:]:
                ov = abs(complex(np.vdot(rayset.rays[a], rayset.rays[b])))
                if ov > ORTHO_ATOL:
                    violations.append(
                        f"basis {g}: rays {a} and {b} overlap by {ov:.6g}"
                    )
    for idx in range(rayset.num_rays):
        if idx not in used:
            violations.append(f"ray {idx} appears in no basis group")
    return RayValidationReport(violations=tuple(violations))


def ks_assignment_count(rayset: RaySet, max_kept: int = 1000):
    """Count 0/1 valuations with exactly one 1 per basis group.

    Backtracks over rays in index order, branching on 0 before 1, so the
    kept assignments come out in lexicographic order.  Returns
    ``(count, assignments)`` with the assignment list only when the count
    does not exceed ``max_kept``.  Raises on a ray set that fails
    validation.
    """
    report = validate_ray_set(rayset)
    if not report.ok:
        raise ValueError(
            "invalid ray set: " + "; ".join(report.violations[:5])
        )
    n = rayset.num_rays
    bases_of = [[] for _ in range(n)]
    for g, group in enumerate(rayset.bases):
        for i in group:
            bases_of[i].append(g)
    ones = [0] * len(rayset.bases)
    unassigned = [len(group) for group in rayset.bases]
    values = [0] * n
    count = 0
    kept: list[tuple[int, ...]] = []

    def feasible(g: int) -> bool:
        if ones[g] > 1:
            return False
        return not (unassigned[g] == 0 and ones[g] != 1)

    def recurse(i: int):
        nonlocal count
        if i == n:
            count += 1
            if count <= max_kept:
                kept.append(tuple(values))
            return
        for v in (0, 1):
            values[i] = v
            ok = True
            for g in bases_of[i]:
                unassigned[g] -= 1
                ones[g] += v
                if not feasible(g):
                    ok = False
            if ok:
                recurse(i + 1)
            for g in bases_of[i]:
                unassigned[g] += 1
                ones[g] -= v

    recurse(0)
    return count, (kept if count <= max_kept else None)
