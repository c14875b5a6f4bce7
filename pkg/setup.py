"""Build script for the optional compiled kernel backend.

The package works without the extension (a numpy fallback is selected at
import time), so failures here only cost speed, not functionality.
"""

import os

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
    import numpy

    HAVE_CYTHON = True
except ImportError:
    HAVE_CYTHON = False


def native_extensions():
    if not HAVE_CYTHON:
        return []
    # -ffp-contract=off keeps FMA fusion from changing float results
    # between this backend and the numpy one.
    compile_args = ["-O3", "-fopenmp", "-ffp-contract=off"]
    link_args = ["-fopenmp"]
    if os.environ.get("RESTEREO_NO_OPENMP"):
        compile_args = ["-O3", "-ffp-contract=off"]
        link_args = []
    ext = Extension(
        "restereo.kernels._native",
        sources=["src/restereo/kernels/_native.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=compile_args,
        extra_link_args=link_args,
    )
    return cythonize([ext], language_level=3)


setup(ext_modules=native_extensions())
