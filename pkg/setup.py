from Cython.Build import cythonize
from setuptools import Extension, setup

extensions = [
    Extension(
        "molfuse.chem._speedups",
        sources=["src/molfuse/chem/_speedups.pyx"],
        language="c++",
        extra_compile_args=["-O3"],
    )
]

setup(ext_modules=cythonize(extensions, language_level=3))
