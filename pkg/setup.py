"""Builds the compiled integration kernel.

src/dotsim/_kernel_impl.py is written in Cython pure-Python syntax: it runs
unmodified as the fallback backend and compiles here to dotsim._kernel_c,
the fast backend picked up automatically at import.  -ffp-contract=off keeps
the compiled arithmetic bit-compatible with the interpreted fallback (no FMA
contraction) and the no-builtin flags stop GCC from fusing sin/cos pairs
into glibc's sincos (rounds differently in the last ulp), so both backends
produce bit-identical trajectories.
"""

from Cython.Build import cythonize
from setuptools import Extension, setup

extensions = [
    Extension(
        "dotsim._kernel_c",
        ["src/dotsim/_kernel_impl.py"],
        extra_compile_args=["-O3", "-ffp-contract=off", "-fno-builtin-sin", "-fno-builtin-cos"],
    )
]

setup(
    ext_modules=cythonize(
        extensions,
        compiler_directives={"language_level": "3"},
    )
)
