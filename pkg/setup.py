"""Build script: compiles the optional reachability kernel.

The package is pure Python except for one hot kernel (bitmask transitive
closure used by the zigzag oracle).  If Cython or a C compiler is missing
the extension is skipped and the pure-Python fallback is used at import
time, so installation never fails on that account.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "cicsim._reach_c",
                ["src/cicsim/_reach_c.pyx"],
                extra_compile_args=["-O2"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except Exception as exc:  # pragma: no cover - build environment dependent
    print("cicsim: building without compiled kernel (%s)" % exc)

setup(ext_modules=ext_modules)
