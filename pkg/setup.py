"""Build script: compiles the optional fast solver kernel.

The package works without the extension (a pure NumPy twin is selected at
import time), so any failure here only costs speed. Set EXOTIC_SKIP_EXT=1
to skip the compilation step entirely.
"""

import os

from setuptools import Extension, setup


def _extensions():
    if os.environ.get("EXOTIC_SKIP_EXT") == "1":
        return []
    try:
        import numpy as np
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "exotic._kernels",
        ["src/exotic/_kernels.pyx"],
        include_dirs=[np.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O3"],
    )
    return cythonize([ext], compiler_directives={"language_level": "3"})


setup(ext_modules=_extensions())
