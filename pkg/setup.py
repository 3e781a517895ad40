"""Build script: compiles the optional Cython projection kernel.

The package works without the extension (a pure-numpy fallback is selected
at import time), so a failed compile only costs speed, never correctness.
"""

import sys

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "hullcert._kernels",
                ["src/hullcert/_kernels.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover
    print(f"hullcert: skipping Cython extension ({exc}); "
          "pure-python kernels will be used", file=sys.stderr)

setup(ext_modules=ext_modules)
