"""Build script: compiles the optional Cython kernel.

The package is fully functional without the extension (a numpy fallback is
selected at import time); set CVBENCH_SKIP_EXT=1 to skip compilation.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("CVBENCH_SKIP_EXT"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "cvbench._kernels._gaussian_fock",
                    ["src/cvbench/_kernels/_gaussian_fock.pyx"],
                )
            ],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
