import os

from setuptools import Extension, setup

# The compiled kernel is optional: without Cython (or a C compiler) the
# package installs pure and falls back to the numpy reference kernels.
ext_modules = []
if not os.environ.get("K2ALPHA_NO_EXT"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "k2alpha.kernels._fastkern",
                    ["src/k2alpha/kernels/_fastkern.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={
                "language_level": 3,
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
            },
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
