"""Build script for the optional compiled kernel extension.

The package is fully functional without the extension (a pure numpy
fallback is selected at import time), so a failed compile must not fail
the install: the extension is marked optional.
"""

import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

if cythonize is not None:
    extensions = cythonize(
        [
            Extension(
                "jointemb._kernels._fast",
                ["src/jointemb/_kernels/_fast.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                optional=True,
            )
        ],
        language_level=3,
    )
else:
    extensions = []

setup(ext_modules=extensions)
