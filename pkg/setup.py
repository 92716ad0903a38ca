"""Build script: compiles the Cython trial kernel when a toolchain is available.

The package is fully functional without the extension (a NumPy fallback with
identical semantics is selected at import time), so any compile failure here
downgrades to a pure-Python install instead of aborting.
"""

import os

from setuptools import Extension, setup


def _extensions():
    try:
        import numpy as np
        from Cython.Build import cythonize
    except ImportError:
        return []
    rnd_lib = os.path.join(os.path.dirname(np.random.__file__), "lib")
    ext = Extension(
        "seqfuse._kernels._core",
        ["src/seqfuse/_kernels/_core.pyx"],
        include_dirs=[np.get_include()],
        library_dirs=[rnd_lib],
        libraries=["npyrandom"],
        # -ffp-contract=off: the fallback kernel must stay bit-identical to
        # this one, and fused multiply-adds would change the rounding.
        extra_compile_args=["-O2", "-ffp-contract=off"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    try:
        return cythonize([ext], language_level=3)
    except Exception:
        return []


setup(ext_modules=_extensions())
