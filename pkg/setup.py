"""Build the optional Cython core.

The package works without it: ``fbmac.kernels`` falls back to the numpy
implementations in ``fbmac._fallback`` when the extension is missing.
"""
import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("FBMAC_NO_EXT") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "fbmac._speedups",
                    ["src/fbmac/_speedups.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    optional=True,
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
