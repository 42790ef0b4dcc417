"""Build script for the optional compiled kernel.

The package works without the extension (a pure-Python twin of the kernels
is selected at import time); set ROBUSTNEWTON_PURE=1 to skip compilation.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("ROBUSTNEWTON_PURE") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "robustnewton._core",
                    sources=["src/robustnewton/_core.pyx"],
                    # fp-contract off keeps per-operation IEEE rounding so the
                    # compiled kernels agree with the pure-Python twin bit for bit
                    extra_compile_args=["-O3", "-ffp-contract=off"],
                )
            ],
            compiler_directives={
                "language_level": 3,
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
            },
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
