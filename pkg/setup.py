"""Build script: compiles the Cython simulation kernel.

Set CHIPCHAT_NO_EXT=1 to skip the extension; the package then falls back
to the pure-Python kernel (identical semantics, much slower).
"""

import os

from setuptools import setup

ext_modules = []
if not os.environ.get("CHIPCHAT_NO_EXT"):
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/chipchat/sim/_kernel.pyx"],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
