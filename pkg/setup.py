from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    # Pure-Python fallback still works without the compiled core.
    ext_modules = []
else:
    ext_modules = cythonize(
        [Extension("fhnchain._core", ["src/fhnchain/_core.pyx"],
                   extra_compile_args=["-O3"])],
        language_level=3,
    )

setup(ext_modules=ext_modules)
