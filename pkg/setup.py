"""Build script: compiles the optional row-reduction extension.

The package is fully functional without the extension (a pure-Python
implementation of the same kernel is selected at import time), so any
failure here is demoted to a warning rather than aborting the install.
"""

import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """build_ext that carries on when no compiler is available."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # pragma: no cover - depends on toolchain
            self._warn(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # pragma: no cover - depends on toolchain
            self._warn(exc)

    @staticmethod
    def _warn(exc):
        sys.stderr.write(
            "warning: building the compiled kernel failed (%s); "
            "falling back to the pure-Python implementation\n" % (exc,)
        )


def extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:  # pragma: no cover - cython is present in CI
        sys.stderr.write(
            "warning: Cython not found; the compiled kernel will not be built\n"
        )
        return []
    return cythonize(
        [
            Extension(
                "tautring._kernel._speedups",
                ["src/tautring/_kernel/_speedups.pyx"],
            )
        ],
        language_level="3",
    )


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
