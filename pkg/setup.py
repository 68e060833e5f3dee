"""Build script.

The compiled kernel extension is optional: when Cython (or a C compiler)
is unavailable the package installs pure-Python and selects the numpy
backend at import time.
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("CQESIM_NO_EXT") != "1":
    try:
        import numpy
        from Cython.Build import cythonize

        ext_modules = cythonize(
            ["src/cqesim/_kernels.pyx"],
            language_level=3,
        )
        for ext in ext_modules:
            ext.include_dirs.append(numpy.get_include())
            ext.define_macros.append(("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION"))
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
