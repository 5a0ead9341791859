"""Build script: compiles the optional Cython kernel extension.

The package works without the extension (a pure-Python twin of every
kernel lives in gcgt._kernels._slow); the build therefore tolerates a
missing compiler or Cython and falls back to a pure install.
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("GCGT_NO_EXTENSION") != "1":
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "gcgt._kernels._fast",
                    ["src/gcgt/_kernels/_fast.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
