import os

import numpy as np
from setuptools import Extension, setup

# OPTOENT_NO_EXT=1 installs the pure-Python fallback only.
ext_modules = []
if not os.environ.get("OPTOENT_NO_EXT"):
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        extensions = [
            Extension(
                "optoent._ckernels",
                ["src/optoent/_ckernels.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
        ]
        ext_modules = cythonize(
            extensions,
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
