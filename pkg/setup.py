import os
import sys

import numpy as np
from setuptools import Extension, setup

extra_compile_args = ["-O3"]
if sys.platform.startswith("win"):
    extra_compile_args = ["/O2"]

ext_modules = []
if os.environ.get("BRAGG_BACKFLOW_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [
                Extension(
                    "bragg_backflow._kernels",
                    ["src/bragg_backflow/_kernels.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=extra_compile_args,
                    libraries=[] if sys.platform.startswith("win") else ["m"],
                )
            ],
            compiler_directives={
                "language_level": 3,
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
                "initializedcheck": False,
            },
        )

setup(ext_modules=ext_modules)
