"""Build script for the optional compiled propagation kernels.

The package is fully functional without the extension; `utcontrol._backend`
falls back to the pure-Python kernels when the import fails.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "utcontrol._kernels",
                ["src/utcontrol/_kernels.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level="3",
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
