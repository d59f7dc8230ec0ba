from setuptools import Extension, setup
from Cython.Build import cythonize

# -fcx-limited-range: plain 4-mul complex products instead of __muldc3 calls;
# identical results for finite data. OpenMP threads the CSR row loop.
setup(
    ext_modules=cythonize(
        [
            Extension(
                "spinboson._rk4",
                ["src/spinboson/_rk4.pyx"],
                extra_compile_args=["-O3", "-fcx-limited-range", "-fopenmp"],
                extra_link_args=["-fopenmp"],
            )
        ],
        language_level=3,
    )
)
