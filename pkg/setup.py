"""Build script.  The compiled kernel is optional: if Cython or a C compiler
is unavailable the package installs anyway and falls back to the numpy
implementation of the same kernel (see cubicform.kernel)."""

import os

from setuptools import setup
from setuptools.command.build_ext import build_ext


def _extensions():
    if os.environ.get("CUBICFORM_NO_EXT"):
        return []
    if not os.path.exists("src/cubicform/_kernel_cy.pyx"):
        return []
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        return []
    ext = Extension(
        "cubicform._kernel_cy",
        ["src/cubicform/_kernel_cy.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    return cythonize(
        [ext],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )


class optional_build_ext(build_ext):
    """Swallow compiler failures; the pure backend still works."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # pragma: no cover - depends on toolchain
            print(f"warning: compiled kernel skipped ({exc})")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # pragma: no cover
            print(f"warning: compiled kernel skipped ({exc})")


setup(ext_modules=_extensions(), cmdclass={"build_ext": optional_build_ext})
