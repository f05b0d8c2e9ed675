"""Build script: compiles the optional SAT kernel extension.

The package works without the extension (a pure-Python kernel is selected at
import time), so any failure here degrades to a source-only install.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "elfe.sat._satcore",
                sources=["src/elfe/sat/_satcore.pyx"],
                extra_compile_args=["-O2"],
            )
        ],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
