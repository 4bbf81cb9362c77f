"""Build script for the optional compiled stage-solver core.

The package is pure Python plus one accelerator extension. If Cython or a C
compiler is unavailable the build falls back to the numpy implementation in
csprk._pycore; nothing else changes.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
    import numpy as np

    extensions = [
        Extension(
            "csprk._cycore",
            sources=["src/csprk/_cycore.pyx"],
            include_dirs=[np.get_include()],
            extra_compile_args=["-O3"],
            define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        )
    ]
    ext_modules = cythonize(extensions, compiler_directives={"language_level": "3"})
except Exception:
    ext_modules = []

setup(ext_modules=ext_modules)
