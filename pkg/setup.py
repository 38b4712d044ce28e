"""Build script: compiles the optional fast root-solving kernel.

The compiled extension is a pure accelerator.  If Cython or a C compiler
is unavailable the build degrades to the numpy fallback selected at
import time by ``rootlift._kernels``.
"""

import sys

from setuptools import setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """Let extension compilation fail without failing the install."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # noqa: BLE001 - any build failure is non-fatal
            self._warn(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # noqa: BLE001
            self._warn(exc)

    @staticmethod
    def _warn(exc):
        print(
            "WARNING: building the compiled kernel failed (%s); "
            "rootlift will use the numpy fallback." % exc,
            file=sys.stderr,
        )


def _extensions():
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        return []
    ext = Extension(
        "rootlift._kernels._fastroots",
        ["src/rootlift/_kernels/_fastroots.pyx"],
        include_dirs=[np.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    return cythonize([ext], language_level="3")


setup(
    ext_modules=_extensions(),
    cmdclass={"build_ext": optional_build_ext},
)
