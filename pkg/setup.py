"""Build the optional compiled closure kernel.

The package works without it (a pure-Python kernel is selected at import
time), so a failed compile only costs speed.
"""
from setuptools import setup, Extension
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # pragma: no cover - toolchain dependent
            print(f"warning: compiled kernel skipped ({exc}); using pure-Python fallback")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # pragma: no cover
            print(f"warning: {ext.name} skipped ({exc}); using pure-Python fallback")


def extensions():
    try:
        from Cython.Build import cythonize
        import numpy
    except ImportError:  # pragma: no cover
        return []
    ext = Extension(
        "linecoal._closurekernel",
        ["src/linecoal/_closurekernel.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    return cythonize([ext], language_level=3)


setup(ext_modules=extensions(), cmdclass={"build_ext": optional_build_ext})
