"""Build script for the optional compiled kernel.

The stride-update extension is a performance add-on: if it fails to build
(no compiler, no OpenMP), installation still succeeds and the package falls
back to the numpy kernel at import time.
"""

from setuptools import setup, Extension
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Swallow compiler failures so the pure-Python install still works."""

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
        import warnings

        warnings.warn(
            f"compiled kernel build failed ({exc!r}); "
            "svsim will use the pure numpy kernel",
            stacklevel=1,
        )


def extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "svsim.kernel._stride_cy",
        ["src/svsim/kernel/_stride_cy.pyx"],
        # -ffp-contract=off: no fused multiply-add, so the compiled kernel
        # is bit-identical to the numpy fallback, not just close
        extra_compile_args=["-O3", "-fopenmp", "-ffp-contract=off"],
        extra_link_args=["-fopenmp"],
    )
    return cythonize([ext], compiler_directives={"language_level": "3"})


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
