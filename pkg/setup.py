import os

from setuptools import Extension, setup

# The compiled kernels are optional: the package falls back to the pure
# numpy implementations in maxrank._kernels_py when the extension is
# missing.  Set MAXRANK_NO_EXT=1 to skip the build entirely.
ext_modules = []
if not os.environ.get("MAXRANK_NO_EXT"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [Extension("maxrank._kernels", ["src/maxrank/_kernels.pyx"])],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
