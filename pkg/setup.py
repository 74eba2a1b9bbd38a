"""Build script: compiles the optional dispatch kernel extension.

The package is fully functional without the extension (a pure-Python kernel
is selected at import time), so a missing compiler only costs speed.
"""

import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """Skip the extension instead of failing when no compiler is usable."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # noqa: BLE001 - any build failure is non-fatal
            print(f"warning: compiled kernel skipped ({exc}); "
                  "falling back to the pure-Python kernel", file=sys.stderr)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # noqa: BLE001
            print(f"warning: building {ext.name} failed ({exc}); "
                  "falling back to the pure-Python kernel", file=sys.stderr)


# -ffp-contract=off keeps the compiled kernel bit-identical to the Python
# kernel (no fused multiply-add contraction).
compile_args = [] if sys.platform == "win32" else ["-O2", "-ffp-contract=off"]

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "mgems._speedups",
                ["src/mgems/_speedups.pyx"],
                extra_compile_args=compile_args,
            )
        ],
        language_level=3,
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions, cmdclass={"build_ext": optional_build_ext})
