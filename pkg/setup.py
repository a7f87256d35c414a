"""Build script: compiles the optional Cython kernel extension.

If the extension cannot be built (no compiler, no Cython), the package
still installs and falls back to the pure-numpy kernels at import time.
"""

import numpy as np
from setuptools import setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        "src/orlicz_qha/_kernels/_core.pyx",
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    ext_modules = []

try:
    setup(
        ext_modules=ext_modules,
        include_dirs=[np.get_include()],
    )
except SystemExit:
    # Compiler failure: install pure-Python anyway.
    setup(ext_modules=[])
