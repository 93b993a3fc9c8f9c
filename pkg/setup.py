"""Build the optional compiled kernel.

If Cython or a C compiler is missing the package still installs and
``arena`` falls back to the pure-Python kernel at import time.
"""
import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pragma: no cover
    cythonize = None

ext_modules = []
if cythonize is not None:
    ext_modules = cythonize(
        [
            Extension(
                "arena._core",
                ["src/arena/_core.pyx"],
                include_dirs=[np.get_include()],
                # no fast-math / fp contraction: results must match the fallback bit for bit
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
