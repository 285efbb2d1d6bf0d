"""Build hook for the compiled amplitude kernels.

The package works without the extension (a pure-NumPy fallback is selected
at import time), so a missing compiler or missing Cython only costs speed.
"""

from setuptools import Extension, setup

try:
    import numpy as np
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "qscatter._kernels._core",
                ["src/qscatter/_kernels/_core.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
