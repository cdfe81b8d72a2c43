"""Build script: compiles the optional integration kernel.

The package works without the extension (a pure-Python integrator is
selected at import time); the kernel only accelerates the hot stepping
loop of the torus phase model.
"""

from setuptools import Extension, setup

try:
    import numpy as np
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

ext_modules = []
if cythonize is not None:
    ext_modules = cythonize(
        [
            Extension(
                "d2osc._speedups",
                ["src/d2osc/_speedups.pyx"],
                include_dirs=[np.get_include()],
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
