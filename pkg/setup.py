"""Build script: compiles the optional quadrature kernel extension.

The package works without the extension (a numpy fallback is selected at
import time), so failures here degrade to a pure-Python install rather
than aborting.
"""

import os
import sys

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext = Extension(
        "qcc._core._kernels",
        sources=[os.path.join("src", "qcc", "_core", "_kernels.pyx")],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O3"],
    )
    ext_modules = cythonize(
        [ext],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
except Exception as err:  # pragma: no cover - exercised only on broken toolchains
    sys.stderr.write(
        "qcc: building without the compiled kernel extension (%s)\n" % err
    )

setup(ext_modules=ext_modules)
