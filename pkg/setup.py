"""Build script: compiles the optional native kernel extension.

The extension is a speedup only; if Cython or a C toolchain is missing the
install proceeds and tilecast falls back to the pure-Python kernels.
Set TILECAST_NO_NATIVE=1 to skip the extension entirely.
"""

import os
import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """build_ext that degrades to a warning instead of failing the install."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # toolchain missing
            self._warn(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            self._warn(exc)

    @staticmethod
    def _warn(exc):
        print(
            f"warning: native kernel build failed ({exc}); "
            "tilecast will use the pure-Python kernels",
            file=sys.stderr,
        )


def extensions():
    if os.environ.get("TILECAST_NO_NATIVE") == "1":
        return []
    try:
        from Cython.Build import cythonize
    except ImportError:
        print("warning: Cython unavailable; skipping native kernels", file=sys.stderr)
        return []
    ext = Extension(
        "tilecast._kernels",
        ["src/tilecast/_kernels.pyx"],
        libraries=["crypto"],
    )
    return cythonize([ext], language_level=3)


setup(
    ext_modules=extensions(),
    cmdclass={"build_ext": OptionalBuildExt},
)
