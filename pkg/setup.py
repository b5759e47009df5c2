"""Build script. The Cython extension is optional: if no compiler (or no
Cython) is available the package installs anyway and selects the NumPy
backend at import time."""

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools.extension import Extension

    ext_modules = cythonize(
        [
            Extension(
                "fso_miso._kernels",
                sources=["src/fso_miso/_kernels.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - depends on build host
    print(f"fso-miso: skipping compiled kernels ({exc}); NumPy fallback will be used")

setup(ext_modules=ext_modules)
