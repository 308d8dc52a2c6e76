"""Build script for the optional compiled scan kernel.

The package works without the extension (a pure-Python scan backend is
selected at import time); building it just makes the inner recurrences fast.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("chflow._scan_ext", ["src/chflow/_scan_ext.pyx"])],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
