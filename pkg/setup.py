import numpy as np
from setuptools import Extension, setup
from Cython.Build import cythonize

# -ffp-contract=off keeps the compiled kernels bit-identical to the NumPy
# fallback (no FMA contraction of the interpolation arithmetic).
ext = Extension(
    "papertab.kernels._ckern",
    ["src/papertab/kernels/_ckern.pyx"],
    include_dirs=[np.get_include()],
    extra_compile_args=["-O3", "-ffp-contract=off"],
)

setup(
    ext_modules=cythonize(ext, compiler_directives={"language_level": "3"}),
)
