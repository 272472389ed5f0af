"""Build script: compiles the branch-and-bound search kernels when Cython and a
C compiler are available.  The package falls back to the pure-Python kernels at
import time if the extension is missing, so a failed extension build is not
fatal."""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/entrolab/_kernels_c.pyx"],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - build-environment dependent
    import sys

    print(f"entrolab: skipping compiled kernels ({exc})", file=sys.stderr)

setup(ext_modules=ext_modules)
