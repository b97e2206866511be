import os

from setuptools import setup

ext_modules = []
if not os.environ.get("BIGKTYPE_NO_EXT"):
    try:
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        print("Cython not available; installing the pure-Python kernels only")
    else:
        ext_modules = cythonize(
            [Extension("bigktype._core", ["src/bigktype/_core.pyx"], extra_compile_args=["-O3", "-fcx-limited-range"])],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
