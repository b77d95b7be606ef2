"""Build script for the compiled DTW kernel.

The extension is optional: if compilation fails (no compiler, no Cython),
the package installs anyway and falls back to the pure-NumPy kernels in
``tsucast._kernels._dtw_py``.
"""

import warnings

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # missing toolchain
            warnings.warn(f"skipping compiled DTW kernel: {exc}")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            warnings.warn(f"skipping compiled DTW kernel {ext.name}: {exc}")


ext = Extension(
    "tsucast._kernels._dtw_cy",
    sources=["src/tsucast/_kernels/_dtw_cy.pyx"],
)

try:
    from Cython.Build import cythonize

    ext_modules = cythonize([ext], language_level="3")
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules, cmdclass={"build_ext": OptionalBuildExt})
