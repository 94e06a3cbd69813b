"""Build script: compiles the optional triangulation kernel extension.

The package works without the extension (a pure-Python twin is selected
at import time), so any failure here degrades to a pure install.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/polarbec/_kernels/_peel.pyx"],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
