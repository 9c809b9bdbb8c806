import os

import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup

# ANTIMOD_NO_OPENMP=1 builds the kernels single-threaded
openmp = [] if os.environ.get("ANTIMOD_NO_OPENMP") else ["-fopenmp"]

extensions = [
    Extension(
        "antimod._kernels",
        ["src/antimod/_kernels.pyx"],
        include_dirs=[np.get_include()],
        extra_compile_args=["-O3"] + openmp,
        extra_link_args=openmp,
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        # a failed compile leaves the pure-Python fallback in charge
        optional=True,
    )
]

setup(
    ext_modules=cythonize(
        extensions,
        compiler_directives={"language_level": "3"},
    )
)
