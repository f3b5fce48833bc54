"""Build script: compiles the simplex pivot kernel when a toolchain is present.

The package is fully functional without the extension; the pure-numpy
kernel in ``onticlab.feasopt._simplex_py`` is selected at import time as a
fallback (see ``onticlab.feasopt.kernel``).
"""

import warnings

from setuptools import setup
from setuptools.command.build_ext import build_ext


def _extensions():
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        return []
    ext = Extension(
        "onticlab.feasopt._simplex_cy",
        ["src/onticlab/feasopt/_simplex_cy.pyx"],
        include_dirs=[np.get_include()],
        extra_compile_args=["-O3"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    return cythonize([ext], compiler_directives={"language_level": "3"})


class OptionalBuildExt(build_ext):
    """Build the extension if possible; fall back to pure Python otherwise."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # missing compiler, etc.
            warnings.warn(f"simplex extension not built ({exc}); using pure-Python kernel")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            warnings.warn(f"simplex extension not built ({exc}); using pure-Python kernel")


setup(ext_modules=_extensions(), cmdclass={"build_ext": OptionalBuildExt})
