"""Build script: compiles the RK4 shooting kernel if Cython and a C compiler
are available.  The package works without the extension (a pure-Python kernel
is selected at import time), so a failed extension build is not fatal.

    pip install -e . --no-build-isolation
"""
import sys

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        "src/specsing/_shoot.pyx",
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
except Exception as exc:  # pragma: no cover - build environment dependent
    sys.stderr.write(f"specsing: skipping compiled kernel ({exc!r}); "
                     "pure-Python fallback will be used\n")

setup(ext_modules=ext_modules)
