"""Build script: compiles the optional fast-kernel extension when Cython is present.

``pip install -e .`` works without Cython (pure-Python kernels are used).
``python setup.py build_ext --inplace`` builds the compiled core. Set
DRAFTCOACH_NO_EXT=1 to force a pure-Python build.
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("DRAFTCOACH_NO_EXT") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "draftcoach.kernels._fast",
                    ["src/draftcoach/kernels/_fast.pyx"],
                    include_dirs=[np.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3", "boundscheck": False, "wraparound": False},
        )
    except ImportError:
        pass

setup(ext_modules=ext_modules)
