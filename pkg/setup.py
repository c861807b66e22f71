"""Build script: compiles the Gibbs sweep kernel when Cython is available.

Without Cython (or without a C toolchain) the package still installs and
falls back to the pure-Python kernel at import time.
"""

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools.extension import Extension

    ext_modules = cythonize(
        [
            Extension(
                "reputex.topics._gibbs_cy",
                ["src/reputex/topics/_gibbs_cy.pyx"],
                include_dirs=[numpy.get_include()],
                # -ffp-contract=off: the pure-Python fallback must produce
                # bit-identical sampling chains, so FMA contraction is banned.
                extra_compile_args=["-O3", "-ffp-contract=off"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
