"""Simplex kernel selection.

Prefers the compiled Cython kernel and falls back to the pure-numpy one.
Set ``ONTICLAB_SIMPLEX=py`` (or ``cy``) to force a backend; forcing ``cy``
raises if the extension is not built.  Both kernels execute the same pivot
sequence, so results do not depend on which one is active.
"""

from __future__ import annotations

import os

from . import _simplex_py

_forced = os.environ.get("ONTICLAB_SIMPLEX", "").strip().lower()

if _forced == "py":
    BACKEND = "python"
    solve_standard_form = _simplex_py.solve_standard_form
else:
    try:
        from . import _simplex_cy

        BACKEND = "cython"
        solve_standard_form = _simplex_cy.solve_standard_form
    except ImportError:
        if _forced == "cy":
            raise ImportError(
                "ONTICLAB_SIMPLEX=cy but the compiled simplex kernel is not built"
            )
        BACKEND = "python"
        solve_standard_form = _simplex_py.solve_standard_form

OPTIMAL = _simplex_py.OPTIMAL
INFEASIBLE = _simplex_py.INFEASIBLE
UNBOUNDED = _simplex_py.UNBOUNDED
FAILED = _simplex_py.FAILED
