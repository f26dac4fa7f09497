"""Build the optional compiled kernel extension.

    pip install -e . --no-build-isolation

falls back to the pure-Python kernels automatically if Cython or a C
compiler is unavailable (the Extension is marked optional).
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

ext_modules = []
if cythonize is not None:
    ext_modules = cythonize(
        [Extension(
            "qcd_srp._kernels",
            ["src/qcd_srp/_kernels.pyx"],
            # contraction off: keeps arithmetic identical to the fallback
            extra_compile_args=["-O3", "-ffp-contract=off"],
            optional=True,
        )],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
