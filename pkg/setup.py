"""Build hook for the optional compiled kernel.

The package is pure Python plus one Cython extension for the urn path
recursion. If Cython (or a C compiler) is unavailable the extension is
skipped and cidlab falls back to the numpy implementation at import time.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("cidlab._kernels", ["src/cidlab/_kernels.pyx"])],
        language_level=3,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
